#pragma once

#include <cstdint>
#include <vector>

namespace trendfilter {

/// Parameters of the hidden Ornstein-Uhlenbeck trend
///   d mu = -lambda_mu mu dt + sigma_mu dW.
struct TrendParams {
  double lambda_mu = 1.0;  ///< mean-reversion rate (1/year)
  double sigma_mu = 0.9;   ///< trend volatility (1/year)
};

/// Full model configuration: trend dynamics, spot volatility and sampling step.
struct MarketParams {
  TrendParams trend;
  double sigma_s = 0.3;          ///< spot volatility (1/sqrt(year))
  double delta = 1.0 / 252.0;    ///< observation step (years)

  /// AR(1) coefficient exp(-lambda_mu delta).
  double phi() const;
  /// Variance of the trend innovation v_k.
  double q() const;
  /// Variance of the observation noise u_k, sigma_s^2 / delta.
  double r() const;
};

/// (mean, variance) of a scalar Gaussian.
struct GaussianLaw {
  double mean = 0.0;
  double variance = 0.0;

  double stddev() const;
  double log_density(double x) const;
};

/// Simulated hidden trend mu_1..mu_n and returns y_1..y_n; index k holds
/// time (k + 1) * delta.
struct PathSample {
  std::vector<double> mu;
  std::vector<double> y;
  std::size_t n = 0;
  std::uint64_t seed = 0;
};

enum class TrendStart {
  kZero,        ///< mu_0 = 0
  kStationary,  ///< mu_0 ~ N(0, sigma_mu^2 / (2 lambda_mu))
};

/// Throws InvalidParameter unless both entries are strictly positive and finite.
void validate(const TrendParams& trend);
void validate(const MarketParams& params);

/// Cov(mu_s, mu_t) for the OU trend started at mu_0 = 0.
double ou_cov(const TrendParams& trend, double s, double t);

/// sigma_mu / sqrt(2 lambda_mu).
double trend_stationary_std(const TrendParams& trend);
double trend_stationary_variance(const TrendParams& trend);

/// Exact simulation of the discrete model. Path `path_index` of a Monte Carlo
/// run draws its trend innovations from stream 2 * path_index and its
/// observation noise from stream 2 * path_index + 1, both keyed by `seed`.
PathSample simulate(const MarketParams& params, std::size_t n, std::uint64_t seed,
                    TrendStart start = TrendStart::kZero,
                    std::uint64_t path_index = 0);

}  // namespace trendfilter
