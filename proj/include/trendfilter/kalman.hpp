#pragma once

#include <span>
#include <vector>

#include "trendfilter/model.hpp"

namespace trendfilter::kalman {

/// A-posteriori estimate mu_hat_{k/k} and its error variance Gamma_{k/k}.
struct KalmanState {
  double mu_hat = 0.0;
  double gamma = 0.0;
};

/// Result of one recursion step: the updated state, the one-step prediction
/// law of the observation and the gain that was applied.
struct StepResult {
  KalmanState state;
  GaussianLaw prediction;
  double gain = 0.0;
};

struct FilterResult {
  std::vector<KalmanState> states;
  double log_likelihood = 0.0;
};

/// Stationary quantities of the discrete and continuous-time filters.
struct SteadyState {
  double gamma_inf = 0.0;  ///< a-posteriori variance fixed point
  double k_inf = 0.0;      ///< stationary gain
  double beta = 1.0;       ///< sqrt(1 + sigma_mu^2 / (lambda_mu^2 sigma_s^2))
  double p_inf = 0.0;      ///< continuous-time error variance sigma_s^2 lambda_mu (beta - 1)
};

/// mu_0 = 0 known: Gamma_{0/0} = 0.
KalmanState initial_state();
/// mu_0 drawn from the stationary law: Gamma_{0/0} = sigma_mu^2 / (2 lambda_mu).
KalmanState stationary_initial_state(const TrendParams& trend);

StepResult kalman_step(const KalmanState& state, double y, const MarketParams& params);

/// Runs the recursion over `y` and accumulates the prediction-error
/// log-likelihood. Throws EmptySeriesError on an empty series.
FilterResult kalman_filter(std::span<const double> y, const MarketParams& params,
                           KalmanState init = initial_state());

double beta(const TrendParams& trend, double sigma_s);

SteadyState steady_state(const MarketParams& params);

/// Stationary-gain recursion mu_{n+1} = phi (1 - K_inf) mu_n + K_inf y_{n+1},
/// started at mu_0 = 0.
std::vector<double> ewma_filter(std::span<const double> y, const MarketParams& params);

/// Same recursion with an arbitrary gain; used to compare against perturbed gains.
std::vector<double> fixed_gain_filter(std::span<const double> y, const MarketParams& params,
                                      double gain);

/// Euler step of d mu_hat = -lambda beta mu_hat dt + lambda (beta - 1) dS/S,
/// where `dy` is the return increment dS/S over `dt`.
double continuous_filter_step(double mu_hat, double dy, double dt, const TrendParams& theta,
                              double sigma_s);

}  // namespace trendfilter::kalman
