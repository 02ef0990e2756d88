#include "trendfilter/misspec.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "trendfilter/error.hpp"
#include "trendfilter/kalman.hpp"

namespace trendfilter::misspec {

namespace {

// Rates of the filter (lambda beta), the trend (lambda*) and the filter gain lambda (beta - 1).
struct Rates {
  double filter;
  double trend;
  double gain;
  double beta;
  double beta_star;
};

Rates rates_of(const TrendParams& theta, const TrendParams& theta_star, double sigma_s) {
  const double b = kalman::beta(theta, sigma_s);
  return {theta.lambda_mu * b, theta_star.lambda_mu, theta.lambda_mu * (b - 1.0), b,
          kalman::beta(theta_star, sigma_s)};
}

// (e^{-d t} - 1) / d, continuous through d = 0 where it equals -t.
double expm1_ratio(double d, double t) {
  const double dt = d * t;
  if (dt == 0.0) return -t;
  return std::expm1(-dt) / d;
}

}  // namespace

void validate(const MisspecConfig& cfg) {
  trendfilter::validate(cfg.theta_star);
  trendfilter::validate(cfg.theta);
  if (!(cfg.sigma_s > 0.0) || !std::isfinite(cfg.sigma_s)) {
    throw InvalidParameter("sigma_s must be positive and finite");
  }
}

double normal_cdf(double z) { return 0.5 * std::erfc(-z / std::numbers::sqrt2); }

// The finite-horizon moments below are written in terms of d = lambda beta - lambda*
// through expm1_ratio, so they stay exact as the two rates coincide. With
// a = lambda beta, b = lambda*, c the gain and x = a + b:
//   Var[mu_hat_t] = c^2 sigma*^2 / (2b) (J1 - J2) + c^2 sigma_s^2 (1 - e^{-2at}) / (2a)
//   J1 = 2 [1 - e^{-xt} + x e^{-xt} (e^{-dt} - 1) / d] / (x 2a)
//   J2 = e^{-2bt} ((e^{-dt} - 1) / d)^2
//   Cov[mu_hat_t, mu*_t] = c sigma*^2 / (2b) [(1 - e^{-xt}) / x + e^{-2bt} (e^{-dt} - 1) / d]
double filter_variance_t(const MisspecConfig& cfg, double t) {
  validate(cfg);
  if (t < 0.0) throw InvalidParameter("filter_variance_t: t must be nonnegative");
  const Rates r = rates_of(cfg.theta, cfg.theta_star, cfg.sigma_s);
  const double a = r.filter;
  const double b = r.trend;
  const double d = a - b;
  const double x = a + b;
  const double s2_star = cfg.theta_star.sigma_mu * cfg.theta_star.sigma_mu;
  const double m = expm1_ratio(d, t);
  const double e_x = std::exp(-x * t);

  const double j1 = 2.0 * (-std::expm1(-x * t) + x * e_x * m) / (x * 2.0 * a);
  const double j2 = std::exp(-2.0 * b * t) * m * m;
  const double trend_part = r.gain * r.gain * s2_star / (2.0 * b) * (j1 - j2);
  const double noise_part = cfg.theta.lambda_mu * (r.beta - 1.0) * (r.beta - 1.0) * cfg.sigma_s *
                            cfg.sigma_s / (2.0 * r.beta) * -std::expm1(-2.0 * a * t);
  return trend_part + noise_part;
}

double filter_trend_covariance_t(const MisspecConfig& cfg, double t) {
  validate(cfg);
  if (t < 0.0) throw InvalidParameter("filter_trend_covariance_t: t must be nonnegative");
  const Rates r = rates_of(cfg.theta, cfg.theta_star, cfg.sigma_s);
  const double a = r.filter;
  const double b = r.trend;
  const double x = a + b;
  const double s2_star = cfg.theta_star.sigma_mu * cfg.theta_star.sigma_mu;
  return r.gain * s2_star / (2.0 * b) *
         (-std::expm1(-x * t) / x + std::exp(-2.0 * b * t) * expm1_ratio(a - b, t));
}

double residual_variance_t(const MisspecConfig& cfg, double t) {
  const double trend_var = trend_stationary_variance(cfg.theta_star) *
                           -std::expm1(-2.0 * cfg.theta_star.lambda_mu * t);
  return filter_variance_t(cfg, t) + trend_var - 2.0 * filter_trend_covariance_t(cfg, t);
}

double filter_variance_asym(const MisspecConfig& cfg) {
  validate(cfg);
  const Rates r = rates_of(cfg.theta, cfg.theta_star, cfg.sigma_s);
  const double s2_star = cfg.theta_star.sigma_mu * cfg.theta_star.sigma_mu;
  // The 1/(lambda beta - lambda*) factor cancels in the limit.
  return cfg.theta.lambda_mu * (r.beta - 1.0) * (r.beta - 1.0) / (2.0 * r.beta) *
         (s2_star / (r.trend * (r.filter + r.trend)) + cfg.sigma_s * cfg.sigma_s);
}

double filter_std_asym(const MisspecConfig& cfg) { return std::sqrt(filter_variance_asym(cfg)); }

double filter_trend_covariance_asym(const MisspecConfig& cfg) {
  validate(cfg);
  const Rates r = rates_of(cfg.theta, cfg.theta_star, cfg.sigma_s);
  const double s2_star = cfg.theta_star.sigma_mu * cfg.theta_star.sigma_mu;
  return r.gain * s2_star / (2.0 * r.trend * (r.filter + r.trend));
}

double residual_variance_asym(const MisspecConfig& cfg) {
  validate(cfg);
  const Rates r = rates_of(cfg.theta, cfg.theta_star, cfg.sigma_s);
  const double lambda = cfg.theta.lambda_mu;
  const double lambda_star = cfg.theta_star.lambda_mu;
  const double b = r.beta;
  const double bs2 = r.beta_star * r.beta_star;
  return cfg.sigma_s * cfg.sigma_s / (2.0 * b) *
         (lambda * (b - 1.0) * (b - 1.0) +
          lambda_star * (bs2 - 1.0) * (lambda_star * b + lambda) / (lambda * b + lambda_star));
}

double residual_std_asym(const MisspecConfig& cfg) { return std::sqrt(residual_variance_asym(cfg)); }

double residual_std_ratio_wellspec(const TrendParams& theta_star, double sigma_s) {
  trendfilter::validate(theta_star);
  return 2.0 / (1.0 + kalman::beta(theta_star, sigma_s));
}

GaussianLaw conditional_trend_law(const MisspecConfig& cfg, double x) {
  validate(cfg);
  const Rates r = rates_of(cfg.theta, cfg.theta_star, cfg.sigma_s);
  const double lambda = cfg.theta.lambda_mu;
  const double lambda_star = cfg.theta_star.lambda_mu;
  const double b = r.beta;
  const double bs2m1 = r.beta_star * r.beta_star - 1.0;
  const double denom = lambda * b + lambda_star * (bs2m1 + 1.0);

  GaussianLaw law;
  law.mean = lambda_star * b * bs2m1 / ((b - 1.0) * denom) * x;
  law.variance = trend_stationary_variance(cfg.theta_star) *
                 (1.0 - lambda_star * lambda * b * bs2m1 / ((lambda_star + lambda * b) * denom));
  return law;
}

double positive_trend_prob(const MisspecConfig& cfg, double x) {
  const GaussianLaw law = conditional_trend_law(cfg, x);
  return 1.0 - normal_cdf(-law.mean / law.stddev());
}

bool short_horizon(const MisspecConfig& cfg, double horizon) {
  const double filter_rate = cfg.theta.lambda_mu * kalman::beta(cfg.theta, cfg.sigma_s);
  const double slowest = std::min(filter_rate, cfg.theta_star.lambda_mu);
  return std::exp(-2.0 * slowest * horizon) > 0.01;
}

std::vector<TerminalPair> simulate_terminal_pairs(const MisspecConfig& cfg, double delta,
                                                  double horizon, std::size_t n_paths,
                                                  std::uint64_t seed) {
  validate(cfg);
  if (!(delta > 0.0)) throw InvalidParameter("delta must be positive");
  if (!(horizon >= delta)) throw InvalidParameter("horizon must cover at least one step");
  const auto steps = static_cast<std::size_t>(std::llround(horizon / delta));
  const MarketParams truth{cfg.theta_star, cfg.sigma_s, delta};

  std::vector<TerminalPair> pairs(n_paths);
  const auto count = static_cast<long long>(n_paths);
#pragma omp parallel for schedule(static)
  for (long long p = 0; p < count; ++p) {
    const PathSample path =
        simulate(truth, steps, seed, TrendStart::kZero, static_cast<std::uint64_t>(p));
    double estimate = 0.0;
    for (const double y : path.y) {
      estimate = kalman::continuous_filter_step(estimate, y * delta, delta, cfg.theta, cfg.sigma_s);
    }
    pairs[static_cast<std::size_t>(p)] = {path.mu.back(), estimate};
  }
  return pairs;
}

McEstimate variance_estimate(std::span<const double> samples) {
  const auto n = static_cast<double>(samples.size());
  if (samples.size() < 2) throw InvalidParameter("variance_estimate: needs two samples");
  double mean = 0.0;
  for (const double s : samples) mean += s;
  mean /= n;
  double m2 = 0.0;
  double m4 = 0.0;
  for (const double s : samples) {
    const double d2 = (s - mean) * (s - mean);
    m2 += d2;
    m4 += d2 * d2;
  }
  McEstimate est;
  est.mean = mean;
  est.n_paths = samples.size();
  est.variance = m2 / (n - 1.0);
  m2 /= n;
  m4 /= n;
  est.standard_error = std::sqrt(std::max(m4 - m2 * m2, 0.0) / n);
  return est;
}

McEstimate residual_mc_check(const MisspecConfig& cfg, double delta, double horizon,
                             std::size_t n_paths, std::uint64_t seed) {
  if (n_paths < 100) throw InvalidParameter("residual_mc_check: needs at least 100 paths");
  const auto pairs = simulate_terminal_pairs(cfg, delta, horizon, n_paths, seed);
  std::vector<double> residuals(pairs.size());
  std::transform(pairs.begin(), pairs.end(), residuals.begin(),
                 [](const TerminalPair& p) { return p.estimate - p.trend; });
  McEstimate est = variance_estimate(residuals);
  est.short_horizon = short_horizon(cfg, horizon);
  return est;
}

McEstimate filter_variance_mc(const MisspecConfig& cfg, double delta, double horizon,
                              std::size_t n_paths, std::uint64_t seed) {
  if (n_paths < 100) throw InvalidParameter("filter_variance_mc: needs at least 100 paths");
  const auto pairs = simulate_terminal_pairs(cfg, delta, horizon, n_paths, seed);
  std::vector<double> estimates(pairs.size());
  std::transform(pairs.begin(), pairs.end(), estimates.begin(),
                 [](const TerminalPair& p) { return p.estimate; });
  McEstimate est = variance_estimate(estimates);
  est.short_horizon = short_horizon(cfg, horizon);
  return est;
}

SignConditioning sign_conditioning(std::span<const TerminalPair> pairs, double x,
                                   double half_width) {
  SignConditioning out;
  std::size_t agree = 0;
  const double level = std::abs(x);
  for (const TerminalPair& p : pairs) {
    if (std::abs(std::abs(p.estimate) - level) > half_width) continue;
    ++out.hits;
    if ((p.estimate > 0.0) == (p.trend > 0.0)) ++agree;
  }
  if (out.hits == 0) return out;
  const auto n = static_cast<double>(out.hits);
  out.probability = static_cast<double>(agree) / n;
  out.standard_error = std::sqrt(out.probability * (1.0 - out.probability) / n);
  return out;
}

}  // namespace trendfilter::misspec
