#pragma once

#include <Eigen/Dense>
#include <array>
#include <span>

#include "trendfilter/model.hpp"
#include "trendfilter/optimizer.hpp"
#include "trendfilter/quadrature.hpp"

namespace trendfilter::inference {

inline constexpr double kObservationsPerYear = 252.0;

/// Index into theta = (lambda_mu, sigma_mu).
enum class TrendParam { kLambda = 0, kSigmaMu = 1 };

/// Per-observation Fisher information I_1(theta) in the order (lambda_mu, sigma_mu).
/// The information of N observations is N * i1.
struct FisherInfo {
  Eigen::Matrix2d i1 = Eigen::Matrix2d::Zero();
  std::size_t quadrature_intervals = 0;

  /// Cramer-Rao bound I_N^{-1} = I_1^{-1} / N.
  Eigen::Matrix2d crb(double n_observations) const;
};

struct FisherOptions {
  double fd_relative_step = 1e-6;
  QuadratureOptions quadrature{};
  /// Entries whose last refinement moved by more than this (relative) raise NumericalError.
  double failure_tolerance = 1e-8;
};

/// Spectral density of the return series on [-pi, pi], normalized so that
/// gamma(k) = (1 / 2 pi) * integral of f(w) cos(k w).
double spectral_density(const MarketParams& params, double omega);

/// Central finite-difference partials (df/dlambda_mu, df/dsigma_mu).
std::array<double, 2> spectral_density_gradient(const MarketParams& params, double omega,
                                                double relative_step = 1e-6);

/// Stationary autocovariance of y at lag k: sigma_mu^2/(2 lambda_mu) phi^k, plus r at lag 0.
double autocov_y(const MarketParams& params, std::size_t lag);

/// Fourier inversion of the spectral density by quadrature; equals autocov_y.
double spectral_autocov(const MarketParams& params, std::size_t lag,
                        const QuadratureOptions& options = {});

/// Whittle formula (1 / 4 pi) * integral of f^{-2} df/dtheta_i df/dtheta_j.
FisherInfo fisher_info(const MarketParams& params, const FisherOptions& options = {});

/// Years of daily observations needed for the CRB standard deviation of
/// `param` to reach `target_std`: (I_1^{-1})_ii / (252 x^2).
double crb_horizon(const MarketParams& params, double target_std, TrendParam param);
double crb_horizon(const FisherInfo& info, double target_std, TrendParam param);

/// Years T such that |mu_hat| = q_alpha sigma_s / sqrt(T): q^2 sigma_s^2 / mu_hat^2.
/// Returns +infinity for mu_hat = 0.
double t_test_horizon(double sigma_s, double mu_hat, double q_alpha);

struct MleOptions {
  SimplexOptions simplex{};
  /// |log lambda| or |log sigma| above this marks a boundary solution, as does a
  /// fit whose likelihood equals the pure-noise (zero trend variance) limit.
  double log_param_bound = 12.0;
};

struct MleResult {
  TrendParams theta;
  double log_likelihood = 0.0;
  double initial_log_likelihood = 0.0;
  std::size_t iterations = 0;
  bool converged = false;
  bool at_boundary = false;
};

/// Maximizes the Kalman log-likelihood over (log lambda_mu, log sigma_mu)
/// with sigma_s and delta held fixed. Requires at least 10 observations.
MleResult mle_fit(std::span<const double> y, double sigma_s, double delta, const TrendParams& init,
                  const MleOptions& options = {});

}  // namespace trendfilter::inference
