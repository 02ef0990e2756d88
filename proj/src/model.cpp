#include "trendfilter/model.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "trendfilter/error.hpp"
#include "trendfilter/rng.hpp"

namespace trendfilter {

namespace {

void require_positive(double value, const char* name) {
  if (!(value > 0.0) || !std::isfinite(value)) {
    throw InvalidParameter(std::string(name) + " must be positive and finite, got " +
                           std::to_string(value));
  }
}

}  // namespace

double MarketParams::phi() const { return std::exp(-trend.lambda_mu * delta); }

double MarketParams::q() const {
  const double two_lambda = 2.0 * trend.lambda_mu;
  return trend.sigma_mu * trend.sigma_mu / two_lambda * -std::expm1(-two_lambda * delta);
}

double MarketParams::r() const { return sigma_s * sigma_s / delta; }

double GaussianLaw::stddev() const { return std::sqrt(variance); }

double GaussianLaw::log_density(double x) const {
  const double z = x - mean;
  return -0.5 * (std::log(2.0 * std::numbers::pi * variance) + z * z / variance);
}

void validate(const TrendParams& trend) {
  require_positive(trend.lambda_mu, "lambda_mu");
  require_positive(trend.sigma_mu, "sigma_mu");
}

void validate(const MarketParams& params) {
  validate(params.trend);
  require_positive(params.sigma_s, "sigma_s");
  require_positive(params.delta, "delta");
}

double ou_cov(const TrendParams& trend, double s, double t) {
  if (s < 0.0 || t < 0.0) throw InvalidParameter("ou_cov: times must be nonnegative");
  const double lambda = trend.lambda_mu;
  const double lo = std::min(s, t);
  const double hi = std::max(s, t);
  // e^{-lambda(s+t)} (e^{2 lambda min} - 1) = e^{-lambda |s-t|} - e^{-lambda (s+t)}
  return trend.sigma_mu * trend.sigma_mu / (2.0 * lambda) *
         (std::exp(-lambda * (hi - lo)) - std::exp(-lambda * (hi + lo)));
}

double trend_stationary_variance(const TrendParams& trend) {
  return trend.sigma_mu * trend.sigma_mu / (2.0 * trend.lambda_mu);
}

double trend_stationary_std(const TrendParams& trend) {
  return std::sqrt(trend_stationary_variance(trend));
}

PathSample simulate(const MarketParams& params, std::size_t n, std::uint64_t seed,
                    TrendStart start, std::uint64_t path_index) {
  validate(params);
  if (n == 0) throw EmptySeriesError("simulate");

  NormalStream trend_noise(seed, 2 * path_index);
  NormalStream obs_noise(seed, 2 * path_index + 1);
  const double phi = params.phi();
  const double trend_sd = std::sqrt(params.q());
  const double obs_sd = std::sqrt(params.r());

  PathSample path;
  path.n = n;
  path.seed = seed;
  path.mu.resize(n);
  path.y.resize(n);

  double mu = 0.0;
  if (start == TrendStart::kStationary) {
    mu = trend_stationary_std(params.trend) * trend_noise();
  }
  for (std::size_t k = 0; k < n; ++k) {
    mu = phi * mu + trend_sd * trend_noise();
    path.mu[k] = mu;
    path.y[k] = mu + obs_sd * obs_noise();
  }
  return path;
}

}  // namespace trendfilter
