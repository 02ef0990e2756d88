#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "trendfilter/model.hpp"

namespace trendfilter::misspec {

/// Data generated under `theta_star`; the agent filters with `theta`.
struct MisspecConfig {
  TrendParams theta_star;
  TrendParams theta;
  double sigma_s = 0.3;

  static MisspecConfig well_specified(const TrendParams& truth, double sigma_s) {
    return {truth, truth, sigma_s};
  }
};

void validate(const MisspecConfig& cfg);

/// Standard normal CDF.
double normal_cdf(double z);

/// Var[mu_hat_t] for the continuous filter started at mu_hat_0 = 0.
double filter_variance_t(const MisspecConfig& cfg, double t);
/// Cov[mu_hat_t, mu*_t].
double filter_trend_covariance_t(const MisspecConfig& cfg, double t);
/// Var[mu_hat_t - mu*_t] assembled from the two quantities above.
double residual_variance_t(const MisspecConfig& cfg, double t);

/// t -> infinity limits.
double filter_variance_asym(const MisspecConfig& cfg);
double filter_std_asym(const MisspecConfig& cfg);
double filter_trend_covariance_asym(const MisspecConfig& cfg);
double residual_variance_asym(const MisspecConfig& cfg);
double residual_std_asym(const MisspecConfig& cfg);

/// Well-specified residual variance over trend variance:
/// 2 / (1 + sqrt(1 + sigma*^2 / (lambda*^2 sigma_s^2))).
double residual_std_ratio_wellspec(const TrendParams& theta_star, double sigma_s);

/// Asymptotic law of mu* given mu_hat = x.
GaussianLaw conditional_trend_law(const MisspecConfig& cfg, double x);

/// P(mu* > 0 | mu_hat = x) in the stationary limit.
double positive_trend_prob(const MisspecConfig& cfg, double x);

/// Terminal values of one simulated path: hidden trend and the filter reading.
struct TerminalPair {
  double trend = 0.0;
  double estimate = 0.0;
};

/// Simulates `n_paths` exact discrete paths under theta_star over `horizon`
/// years and runs the Euler-stepped filter under theta on each. Path p uses
/// the same RNG streams as simulate(..., seed, TrendStart::kZero, p), so the
/// output does not depend on the thread count.
std::vector<TerminalPair> simulate_terminal_pairs(const MisspecConfig& cfg, double delta,
                                                  double horizon, std::size_t n_paths,
                                                  std::uint64_t seed);

struct McEstimate {
  double variance = 0.0;
  double standard_error = 0.0;  ///< of the variance estimate
  double mean = 0.0;
  std::size_t n_paths = 0;
  bool short_horizon = false;   ///< transients not decayed below 1%
};

/// Sample variance with its standard error sqrt((m4 - s^4) / n).
McEstimate variance_estimate(std::span<const double> samples);

McEstimate residual_mc_check(const MisspecConfig& cfg, double delta, double horizon,
                             std::size_t n_paths, std::uint64_t seed);
McEstimate filter_variance_mc(const MisspecConfig& cfg, double delta, double horizon,
                              std::size_t n_paths, std::uint64_t seed);

struct SignConditioning {
  double probability = 0.0;
  double standard_error = 0.0;
  std::size_t hits = 0;  ///< samples that fell in the conditioning window
};

/// Fraction of paths with sign(mu*) = sign(x) among those with
/// |mu_hat| within `half_width` of |x| (both signs pooled by symmetry).
SignConditioning sign_conditioning(std::span<const TerminalPair> pairs, double x,
                                   double half_width);

bool short_horizon(const MisspecConfig& cfg, double horizon);

}  // namespace trendfilter::misspec
