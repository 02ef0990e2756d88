#include "trendfilter/kalman.hpp"

#include <cmath>

#include "trendfilter/error.hpp"

namespace trendfilter::kalman {

KalmanState initial_state() { return {}; }

KalmanState stationary_initial_state(const TrendParams& trend) {
  return {0.0, trend_stationary_variance(trend)};
}

StepResult kalman_step(const KalmanState& state, double y, const MarketParams& params) {
  if (state.gamma < 0.0) throw InvalidParameter("kalman_step: negative error variance");
  const double phi = params.phi();
  const double r = params.r();

  const double mean_pred = phi * state.mu_hat;
  const double gamma_pred = phi * phi * state.gamma + params.q();
  const double gain = gamma_pred / (gamma_pred + r);

  StepResult out;
  out.prediction = {mean_pred, gamma_pred + r};
  out.gain = gain;
  out.state.mu_hat = mean_pred + gain * (y - mean_pred);
  // (1 - K) Gamma_pred written as Gamma_pred r / (Gamma_pred + r) to avoid cancellation.
  out.state.gamma = gamma_pred * r / (gamma_pred + r);
  return out;
}

FilterResult kalman_filter(std::span<const double> y, const MarketParams& params,
                           KalmanState init) {
  validate(params);
  if (y.empty()) throw EmptySeriesError("kalman_filter");
  FilterResult result;
  result.states.reserve(y.size());
  KalmanState state = init;
  for (const double obs : y) {
    const StepResult step = kalman_step(state, obs, params);
    result.log_likelihood += step.prediction.log_density(obs);
    state = step.state;
    result.states.push_back(state);
  }
  return result;
}

double beta(const TrendParams& trend, double sigma_s) {
  const double ratio = trend.sigma_mu / (trend.lambda_mu * sigma_s);
  return std::sqrt(1.0 + ratio * ratio);
}

SteadyState steady_state(const MarketParams& params) {
  validate(params);
  const double lambda = params.trend.lambda_mu;
  const double sigma_mu = params.trend.sigma_mu;
  const double delta = params.delta;
  const double s2 = params.sigma_s * params.sigma_s;
  const double phi2 = std::exp(-2.0 * lambda * delta);
  const double one_minus_phi2 = -std::expm1(-2.0 * lambda * delta);

  // Gamma_inf = (g - f) / (2 phi^2) with g = sqrt(f^2 + h); evaluated as
  // h / ((g + f) 2 phi^2) so that small-delta inputs do not cancel.
  const double f = (s2 / delta + sigma_mu * sigma_mu / (2.0 * lambda)) * one_minus_phi2;
  const double h = 2.0 * s2 * sigma_mu * sigma_mu / (lambda * delta) * phi2 * one_minus_phi2;
  const double g = std::sqrt(f * f + h);

  SteadyState ss;
  ss.gamma_inf = h / ((g + f) * 2.0 * phi2);
  const double gamma_pred = phi2 * ss.gamma_inf + params.q();
  ss.k_inf = gamma_pred / (gamma_pred + params.r());
  ss.beta = beta(params.trend, params.sigma_s);
  ss.p_inf = s2 * lambda * (ss.beta - 1.0);
  return ss;
}

std::vector<double> fixed_gain_filter(std::span<const double> y, const MarketParams& params,
                                      double gain) {
  if (y.empty()) throw EmptySeriesError("ewma_filter");
  const double decay = params.phi() * (1.0 - gain);
  std::vector<double> out(y.size());
  double estimate = 0.0;
  for (std::size_t i = 0; i < y.size(); ++i) {
    estimate = decay * estimate + gain * y[i];
    out[i] = estimate;
  }
  return out;
}

std::vector<double> ewma_filter(std::span<const double> y, const MarketParams& params) {
  if (y.empty()) throw EmptySeriesError("ewma_filter");
  return fixed_gain_filter(y, params, steady_state(params).k_inf);
}

double continuous_filter_step(double mu_hat, double dy, double dt, const TrendParams& theta,
                              double sigma_s) {
  if (!(dt > 0.0)) throw InvalidParameter("continuous_filter_step: dt must be positive");
  const double b = beta(theta, sigma_s);
  const double lambda = theta.lambda_mu;
  return mu_hat - lambda * b * mu_hat * dt + lambda * (b - 1.0) * dy;
}

}  // namespace trendfilter::kalman
