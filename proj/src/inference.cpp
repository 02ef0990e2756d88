#include "trendfilter/inference.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>

#include "trendfilter/error.hpp"
#include "trendfilter/likelihood.hpp"

namespace trendfilter::inference {

namespace {

constexpr std::size_t kMinFitObservations = 10;

// Trend contribution q / D to the spectral density, where
// D = 1 + phi^2 - 2 phi cos w = (1 - phi)^2 + 4 phi sin^2(w / 2);
// the second form avoids cancellation near w = 0.
double trend_spectrum(const MarketParams& params, double omega) {
  const double phi = params.phi();
  const double one_minus_phi = -std::expm1(-params.trend.lambda_mu * params.delta);
  const double s = std::sin(0.5 * omega);
  return params.q() / (one_minus_phi * one_minus_phi + 4.0 * phi * s * s);
}

}  // namespace

Eigen::Matrix2d FisherInfo::crb(double n_observations) const {
  return i1.inverse() / n_observations;
}

double spectral_density(const MarketParams& params, double omega) {
  // [q + r(1 + phi^2 - 2 phi cos w)] / (1 + phi^2 - 2 phi cos w) = q / D + r
  return trend_spectrum(params, omega) + params.r();
}

std::array<double, 2> spectral_density_gradient(const MarketParams& params, double omega,
                                                double relative_step) {
  // r does not depend on theta, so only the trend part is differenced.
  std::array<double, 2> grad{};
  for (int i = 0; i < 2; ++i) {
    MarketParams up = params;
    MarketParams down = params;
    double& value_up = i == 0 ? up.trend.lambda_mu : up.trend.sigma_mu;
    double& value_down = i == 0 ? down.trend.lambda_mu : down.trend.sigma_mu;
    const double h = relative_step * value_up;
    value_up += h;
    value_down -= h;
    grad[static_cast<std::size_t>(i)] =
        (trend_spectrum(up, omega) - trend_spectrum(down, omega)) / (2.0 * h);
  }
  return grad;
}

double autocov_y(const MarketParams& params, std::size_t lag) {
  const double trend_var = trend_stationary_variance(params.trend);
  if (lag == 0) return trend_var + params.r();
  return std::exp(-params.trend.lambda_mu * params.delta * static_cast<double>(lag)) * trend_var;
}

double spectral_autocov(const MarketParams& params, std::size_t lag,
                        const QuadratureOptions& options) {
  validate(params);
  const double k = static_cast<double>(lag);
  const QuadratureResult res = simpson_refine(
      [&](double w, std::span<double> out) { out[0] = spectral_density(params, w) * std::cos(k * w); },
      1, 0.0, std::numbers::pi, options);
  // Even integrand: (1/2pi) * 2 * integral over [0, pi].
  return res.values[0] / std::numbers::pi;
}

FisherInfo fisher_info(const MarketParams& params, const FisherOptions& options) {
  validate(params);
  const double h = options.fd_relative_step;
  const QuadratureResult res = simpson_refine(
      [&](double w, std::span<double> out) {
        const double f = spectral_density(params, w);
        const auto g = spectral_density_gradient(params, w, h);
        const double inv_f2 = 1.0 / (f * f);
        out[0] = g[0] * g[0] * inv_f2;
        out[1] = g[0] * g[1] * inv_f2;
        out[2] = g[1] * g[1] * inv_f2;
      },
      3, 0.0, std::numbers::pi, options.quadrature);

  double scale = 0.0;
  for (const double v : res.values) scale = std::max(scale, std::abs(v));
  if (!res.converged && res.last_change > options.failure_tolerance * scale) {
    throw NumericalError("fisher_info: quadrature did not converge (last change " +
                         std::to_string(res.last_change) + ")");
  }

  // (1 / 4pi) * 2 * integral over [0, pi]
  const double norm = 1.0 / (2.0 * std::numbers::pi);
  FisherInfo info;
  info.i1(0, 0) = norm * res.values[0];
  info.i1(0, 1) = norm * res.values[1];
  info.i1(1, 0) = info.i1(0, 1);
  info.i1(1, 1) = norm * res.values[2];
  info.quadrature_intervals = res.intervals;
  return info;
}

double crb_horizon(const FisherInfo& info, double target_std, TrendParam param) {
  if (!(target_std > 0.0)) throw InvalidParameter("crb_horizon: target_std must be positive");
  const auto i = static_cast<Eigen::Index>(param);
  const double variance_one_obs = info.i1.inverse()(i, i);
  return variance_one_obs / (kObservationsPerYear * target_std * target_std);
}

double crb_horizon(const MarketParams& params, double target_std, TrendParam param) {
  if (!(target_std > 0.0)) throw InvalidParameter("crb_horizon: target_std must be positive");
  return crb_horizon(fisher_info(params), target_std, param);
}

double t_test_horizon(double sigma_s, double mu_hat, double q_alpha) {
  if (!(sigma_s > 0.0)) throw InvalidParameter("t_test_horizon: sigma_s must be positive");
  if (mu_hat == 0.0) return std::numeric_limits<double>::infinity();
  return q_alpha * q_alpha * sigma_s * sigma_s / (mu_hat * mu_hat);
}

MleResult mle_fit(std::span<const double> y, double sigma_s, double delta, const TrendParams& init,
                  const MleOptions& options) {
  validate(init);
  if (y.size() < kMinFitObservations) {
    throw InvalidParameter("mle_fit: needs at least " + std::to_string(kMinFitObservations) +
                           " observations, got " + std::to_string(y.size()));
  }
  MarketParams base{init, sigma_s, delta};
  validate(base);

  auto loglik_at = [&](double log_lambda, double log_sigma) {
    MarketParams p = base;
    p.trend = {std::exp(log_lambda), std::exp(log_sigma)};
    return likelihood::loglik_kalman(y, p);
  };
  const double bound = options.log_param_bound;
  // Beyond the bound the objective is flat at +inf so the simplex is pushed back.
  const Objective objective = [&](std::span<const double> x) {
    if (std::abs(x[0]) > bound + 1.0 || std::abs(x[1]) > bound + 1.0) {
      return std::numeric_limits<double>::infinity();
    }
    return -loglik_at(x[0], x[1]);
  };

  const std::array<double, 2> start{std::log(init.lambda_mu), std::log(init.sigma_mu)};
  const SimplexResult sr = nelder_mead(objective, start, options.simplex);

  MleResult out;
  out.initial_log_likelihood = loglik_at(start[0], start[1]);
  out.theta = {std::exp(sr.x[0]), std::exp(sr.x[1])};
  out.log_likelihood = -sr.value;
  out.iterations = sr.iterations;
  out.converged = sr.converged;
  // The trend variance collapsing to zero is the other edge of the parameter
  // space: the likelihood then matches white noise of variance r.
  double noise_only = 0.0;
  for (const double v : y) noise_only += GaussianLaw{0.0, base.r()}.log_density(v);
  const bool collapsed =
      out.log_likelihood - noise_only <= 1e-9 * std::max(1.0, std::abs(noise_only));
  out.at_boundary = std::abs(sr.x[0]) > bound || std::abs(sr.x[1]) > bound || collapsed;
  return out;
}

}  // namespace trendfilter::inference
