#include <gtest/gtest.h>

#include <cmath>
#include <random>
#include <vector>

#include "test_helpers.hpp"
#include "trendfilter/error.hpp"
#include "trendfilter/kalman.hpp"
#include "trendfilter/misspec.hpp"

namespace trendfilter::misspec {
namespace {

constexpr double kDaily = 1.0 / 252.0;

const TrendParams kBest{1.0, 0.9};
const TrendParams kWorst{5.0, 0.1};

MisspecConfig well(const TrendParams& t, double sigma_s = 0.3) {
  return MisspecConfig::well_specified(t, sigma_s);
}

// Composite Simpson on [a, b] with n (even) intervals.
template <class F>
double simpson_n(F f, double a, double b, int n) {
  const double h = (b - a) / n;
  double sum = f(a) + f(b);
  for (int i = 1; i < n; ++i) sum += (i % 2 ? 4.0 : 2.0) * f(a + i * h);
  return sum * h / 3.0;
}

// Simpson at n and 2n intervals with one Richardson step (error O(h^6)).
template <class F>
double simpson(F f, double a, double b, int n) {
  const double coarse = simpson_n(f, a, b, n);
  const double fine = simpson_n(f, a, b, 2 * n);
  return fine + (fine - coarse) / 15.0;
}

// Var[mu_hat_t] and Cov[mu_hat_t, mu*_t] for d mu_hat = -a mu_hat dt + c dy,
// dy = mu* dt + sigma_s dW, by direct integration of the OU covariance kernel.
struct FiniteTimeOracle {
  double variance;
  double covariance;
};

FiniteTimeOracle integrate_filter_moments(const MisspecConfig& cfg, double t) {
  const double beta = kalman::beta(cfg.theta, cfg.sigma_s);
  const double a = cfg.theta.lambda_mu * beta;
  const double c = cfg.theta.lambda_mu * (beta - 1.0);
  constexpr int kNodes = 200;
  // Symmetric kernel: twice the integral over the triangle u <= s.
  const double trend = 2.0 * simpson(
                                 [&](double s) {
                                   return simpson(
                                       [&](double u) {
                                         return std::exp(-a * (2.0 * t - s - u)) *
                                                ou_cov(cfg.theta_star, u, s);
                                       },
                                       0.0, s, kNodes);
                                 },
                                 0.0, t, kNodes);
  const double noise = cfg.sigma_s * cfg.sigma_s * (1.0 - std::exp(-2.0 * a * t)) / (2.0 * a);
  const double cov = simpson(
      [&](double s) { return std::exp(-a * (t - s)) * ou_cov(cfg.theta_star, s, t); }, 0.0, t,
      4 * kNodes);
  return {c * c * (trend + noise), c * cov};
}

TEST(NormalCdf, ReferenceValues) {
  EXPECT_EQ(normal_cdf(0.0), 0.5);
  EXPECT_NEAR(normal_cdf(1.96), 0.9750021048517795, 1e-15);
  EXPECT_NEAR(normal_cdf(-3.0), 0.0013498980316300946, 1e-16);
  for (double z = -8.0; z <= 8.0; z += 0.37) {
    EXPECT_NEAR(normal_cdf(z) + normal_cdf(-z), 1.0, 1e-15);
  }
}

TEST(ResidualAsym, ReferenceConfigurations) {
  EXPECT_NEAR(residual_std_asym(well(kBest)), std::sqrt(0.09 * (std::sqrt(10.0) - 1.0)), 1e-12);
  EXPECT_NEAR(residual_std_asym(well(kBest)), 0.4411, 5e-5);
  EXPECT_NEAR(residual_std_asym(well(kWorst)), 0.03161, 5e-6);
  EXPECT_NEAR(residual_std_asym({kWorst, kBest, 0.3}), 0.2592, 5e-5);
  EXPECT_NEAR(residual_std_asym({kBest, kWorst, 0.3}), 0.6352, 5e-5);
}

TEST(ResidualAsym, WellSpecifiedRatioIdentity) {
  const double ratio = residual_std_ratio_wellspec(kBest, 0.3);
  EXPECT_NEAR(ratio, 2.0 / (1.0 + std::sqrt(10.0)), 1e-15);
  EXPECT_NEAR(ratio, 0.194605 / 0.405, 5e-6);
  std::mt19937_64 gen(21);
  for (int trial = 0; trial < 50; ++trial) {
    const MarketParams p = testing::random_params(gen);
    const double trend_var = trend_stationary_variance(p.trend);
    EXPECT_NEAR(residual_variance_asym(well(p.trend, p.sigma_s)) / trend_var,
                residual_std_ratio_wellspec(p.trend, p.sigma_s), 1e-12);
    // The stationary residual variance of the well-specified filter is P_inf.
    EXPECT_NEAR(residual_variance_asym(well(p.trend, p.sigma_s)),
                kalman::steady_state({p.trend, p.sigma_s, p.delta}).p_inf, 1e-12 * trend_var);
  }
}

TEST(ResidualAsym, RatioLimitsAndMonotonicity) {
  EXPECT_NEAR(residual_std_ratio_wellspec({1.0, 1e-9}, 0.3), 1.0, 1e-15);
  for (int i = 0; i < 20; ++i) {
    for (int j = 0; j < 20; ++j) {
      const TrendParams here{0.2 + 0.5 * i, 0.05 + 0.1 * j};
      const TrendParams more_lambda{here.lambda_mu + 0.5, here.sigma_mu};
      const TrendParams more_sigma{here.lambda_mu, here.sigma_mu + 0.1};
      EXPECT_GT(residual_std_ratio_wellspec(more_lambda, 0.3), residual_std_ratio_wellspec(here, 0.3));
      EXPECT_LT(residual_std_ratio_wellspec(more_sigma, 0.3), residual_std_ratio_wellspec(here, 0.3));
    }
  }
}

TEST(FilterAsym, WellSpecifiedIsTrendVarianceMinusPinf) {
  EXPECT_NEAR(filter_variance_asym(well(kBest)), 0.405 - 0.09 * (std::sqrt(10.0) - 1.0), 1e-12);
  EXPECT_NEAR(filter_variance_asym(well(kBest)), 0.210395, 5e-7);
  EXPECT_NEAR(filter_std_asym(well(kBest)), 0.4587, 5e-5);
  std::mt19937_64 gen(22);
  for (int trial = 0; trial < 50; ++trial) {
    const MarketParams p = testing::random_params(gen);
    const double trend_var = trend_stationary_variance(p.trend);
    const double p_inf = p.sigma_s * p.sigma_s * p.trend.lambda_mu *
                         (kalman::beta(p.trend, p.sigma_s) - 1.0);
    EXPECT_NEAR(filter_variance_asym(well(p.trend, p.sigma_s)), trend_var - p_inf,
                1e-10 * trend_var);
  }
}

TEST(FilterAsym, QuadraticHomogeneity) {
  const MisspecConfig base{{2.0, 0.4}, {0.7, 1.1}, 0.25};
  for (const double c : {0.1, 3.0}) {
    MisspecConfig scaled = base;
    scaled.theta_star.sigma_mu *= c;
    scaled.theta.sigma_mu *= c;
    scaled.sigma_s *= c;
    EXPECT_NEAR(filter_variance_asym(scaled), c * c * filter_variance_asym(base),
                1e-12 * c * c * filter_variance_asym(base));
    EXPECT_NEAR(residual_variance_asym(scaled), c * c * residual_variance_asym(base),
                1e-12 * c * c * residual_variance_asym(base));
  }
}

TEST(FilterFiniteTime, StartsAtZeroAndReachesLimit) {
  std::mt19937_64 gen(23);
  std::uniform_real_distribution<double> lam(1.0, 8.0);
  std::uniform_real_distribution<double> sig(0.05, 1.5);
  for (int trial = 0; trial < 30; ++trial) {
    const MisspecConfig cfg{{lam(gen), sig(gen)}, {lam(gen), sig(gen)}, 0.3};
    EXPECT_EQ(filter_variance_t(cfg, 0.0), 0.0);
    EXPECT_EQ(filter_trend_covariance_t(cfg, 0.0), 0.0);
    EXPECT_NEAR(residual_variance_t(cfg, 0.0), 0.0, 1e-15);
    EXPECT_NEAR(filter_variance_t(cfg, 50.0), filter_variance_asym(cfg),
                1e-10 * filter_variance_asym(cfg));
    EXPECT_NEAR(filter_trend_covariance_t(cfg, 50.0), filter_trend_covariance_asym(cfg),
                1e-10 * filter_trend_covariance_asym(cfg));
    EXPECT_NEAR(residual_variance_t(cfg, 50.0), residual_variance_asym(cfg),
                1e-10 * residual_variance_asym(cfg));
  }
  EXPECT_THROW(filter_variance_t(well(kBest), -1.0), InvalidParameter);
}

TEST(FilterFiniteTime, MatchesDirectIntegrationOfKernel) {
  const MisspecConfig cases[] = {well(kBest), {kWorst, kBest, 0.3}, {kBest, kWorst, 0.3},
                                 {{0.3, 0.5}, {2.0, 0.2}, 0.15}};
  for (const auto& cfg : cases) {
    for (const double t : {0.05, 0.5, 2.0}) {
      const FiniteTimeOracle oracle = integrate_filter_moments(cfg, t);
      EXPECT_NEAR(filter_variance_t(cfg, t), oracle.variance, 1e-8 * oracle.variance) << t;
      EXPECT_NEAR(filter_trend_covariance_t(cfg, t), oracle.covariance,
                  1e-8 * std::abs(oracle.covariance))
          << t;
    }
  }
}

TEST(FilterFiniteTime, MonteCarloAtShortHorizons) {
  // Transient terms matter here, so the finite-t forms are checked directly.
  for (const MisspecConfig& cfg : {well(kBest), MisspecConfig{kWorst, kBest, 0.3}}) {
    for (const double t : {0.25, 1.0}) {
      const auto pairs = simulate_terminal_pairs(cfg, kDaily / 4.0, t, 10000, 77);
      std::vector<double> est;
      std::vector<double> res;
      for (const auto& p : pairs) {
        est.push_back(p.estimate);
        res.push_back(p.estimate - p.trend);
      }
      const McEstimate e = variance_estimate(est);
      const McEstimate r = variance_estimate(res);
      EXPECT_LT(std::abs(e.variance - filter_variance_t(cfg, t)), 3.0 * e.standard_error)
          << "t=" << t << " empirical " << e.variance << " closed form " << filter_variance_t(cfg, t);
      EXPECT_LT(std::abs(r.variance - residual_variance_t(cfg, t)), 3.0 * r.standard_error)
          << "t=" << t << " empirical " << r.variance << " closed form " << residual_variance_t(cfg, t);
    }
  }
}

TEST(FilterFiniteTime, ExactAtAndAroundCoincidingRates) {
  // Choose the agent's lambda so that lambda * beta equals lambda*.
  const TrendParams star{3.0, 0.8};
  const double sigma_s = 0.3;
  const double ratio = star.sigma_mu / sigma_s;
  const double singular_lambda = std::sqrt(star.lambda_mu * star.lambda_mu - ratio * ratio);
  for (const double rel : {0.0, 1e-12, -1e-10, 1e-8, -1e-6, 1e-4}) {
    const TrendParams agent{singular_lambda * (1.0 + rel), star.sigma_mu};
    const MisspecConfig cfg{star, agent, sigma_s};
    for (const double t : {0.1, 1.0, 5.0}) {
      const FiniteTimeOracle oracle = integrate_filter_moments(cfg, t);
      EXPECT_NEAR(filter_variance_t(cfg, t), oracle.variance, 1e-8 * oracle.variance)
          << "rel=" << rel << " t=" << t;
      EXPECT_NEAR(filter_trend_covariance_t(cfg, t), oracle.covariance, 1e-8 * oracle.covariance)
          << "rel=" << rel << " t=" << t;
    }
  }
}

TEST(Decomposition, CovarianceRecoveredFromVariances) {
  std::mt19937_64 gen(24);
  std::uniform_real_distribution<double> lam(0.2, 8.0);
  std::uniform_real_distribution<double> sig(0.05, 1.5);
  for (int trial = 0; trial < 50; ++trial) {
    const MisspecConfig cfg{{lam(gen), sig(gen)}, {lam(gen), sig(gen)}, 0.3};
    const double var_hat = filter_variance_asym(cfg);
    const double var_star = trend_stationary_variance(cfg.theta_star);
    const double cov = 0.5 * (var_hat + var_star - residual_variance_asym(cfg));
    EXPECT_NEAR(cov, filter_trend_covariance_asym(cfg), 1e-10 * var_star);
    const double x = 0.37;
    const GaussianLaw law = conditional_trend_law(cfg, x);
    EXPECT_NEAR(law.mean, cov / var_hat * x, 1e-10 * std::abs(law.mean));
    EXPECT_NEAR(law.variance, var_star - cov * cov / var_hat, 1e-10 * var_star);
  }
}

TEST(ConditionalLaw, WellSpecifiedReduction) {
  std::mt19937_64 gen(25);
  for (int trial = 0; trial < 50; ++trial) {
    const MarketParams p = testing::random_params(gen);
    const MisspecConfig cfg = well(p.trend, p.sigma_s);
    const GaussianLaw law = conditional_trend_law(cfg, 1.7);
    EXPECT_NEAR(law.mean, 1.7, 1e-12);
    const double beta_star = kalman::beta(p.trend, p.sigma_s);
    const double expected = 2.0 * trend_stationary_variance(p.trend) / (beta_star + 1.0);
    EXPECT_NEAR(law.variance, expected, 1e-12 * expected);
  }
  const GaussianLaw best = conditional_trend_law(well(kBest), 0.3);
  EXPECT_NEAR(best.variance, 2.0 * 0.405 / (std::sqrt(10.0) + 1.0), 1e-12);
  EXPECT_NEAR(best.variance, kalman::steady_state({kBest, 0.3, kDaily}).p_inf, 1e-5);
}

TEST(ConditionalLaw, ZeroEstimateHasZeroMean) {
  const MisspecConfig cfgs[] = {well(kBest), {kWorst, kBest, 0.3}, {kBest, kWorst, 0.3}};
  for (const auto& cfg : cfgs) EXPECT_EQ(conditional_trend_law(cfg, 0.0).mean, 0.0);
}

TEST(ContinuityAtWellSpecification, FiveDirections) {
  const double dirs[5][2] = {{1, 0}, {0, 1}, {1, 1}, {1, -1}, {-0.6, 0.8}};
  const double target_var = residual_variance_asym(well(kBest));
  for (const auto& d : dirs) {
    for (const double eps : {1e-3, 1e-4, 1e-5, 1e-6}) {
      const MisspecConfig cfg{kBest, {kBest.lambda_mu * (1 + eps * d[0]), kBest.sigma_mu * (1 + eps * d[1])}, 0.3};
      EXPECT_NEAR(residual_variance_asym(cfg), target_var, 10.0 * eps * target_var);
      const GaussianLaw law = conditional_trend_law(cfg, 0.5);
      EXPECT_NEAR(law.mean, 0.5, 10.0 * eps);
      EXPECT_NEAR(law.variance, 2.0 * 0.405 / (std::sqrt(10.0) + 1.0), 10.0 * eps);
      // Finite-t forms stay smooth as well.
      EXPECT_NEAR(residual_variance_t(cfg, 3.0), residual_variance_t(well(kBest), 3.0),
                  10.0 * eps * target_var);
    }
  }
}

TEST(MisspecificationPenalty, TrueParametersMinimizeResidualVariance) {
  for (const TrendParams& star : {kBest, kWorst}) {
    const double best = residual_variance_asym(well(star));
    for (int i = 0; i < 20; ++i) {
      for (int j = 0; j < 20; ++j) {
        const TrendParams agent{star.lambda_mu * std::exp(-2.0 + 4.0 * i / 19.0),
                                star.sigma_mu * std::exp(-2.0 + 4.0 * j / 19.0)};
        EXPECT_GE(residual_variance_asym({star, agent, 0.3}), best * (1.0 - 1e-12));
      }
    }
  }
}

TEST(DetectionProbability, Values) {
  EXPECT_EQ(positive_trend_prob(well(kBest), 0.0), 0.5);
  EXPECT_EQ(positive_trend_prob({kWorst, kBest, 0.3}, 0.0), 0.5);
  const MisspecConfig cfg = well(kBest);
  const double x = filter_std_asym(cfg);
  const double p = positive_trend_prob(cfg, x);
  EXPECT_NEAR(p, normal_cdf(x / residual_std_asym(cfg)), 1e-14);
  EXPECT_NEAR(p, 0.851, 0.002);
}

TEST(DetectionProbability, IncreasingInEstimateAndAboveHalf) {
  const MisspecConfig cfgs[] = {well(kBest), well(kWorst), {kWorst, kBest, 0.3}, {kBest, kWorst, 0.3}};
  for (const auto& cfg : cfgs) {
    double previous = 0.5;
    for (int k = 1; k <= 200; ++k) {
      const double x = 0.01 * k * filter_std_asym(cfg);
      const double p = positive_trend_prob(cfg, x);
      EXPECT_GT(p, 0.5);
      EXPECT_LT(p, 1.0 + 1e-15);
      if (p < 1.0) EXPECT_GT(p, previous);
      previous = p;
    }
  }
}

TEST(DetectionProbability, DecreasingInSpotVolatility) {
  for (const TrendParams& star : {kBest, kWorst, TrendParams{2.0, 0.5}}) {
    for (const TrendParams& agent : {kBest, kWorst, star}) {
      double previous = 1.0;
      for (int k = 0; k < 30; ++k) {
        const MisspecConfig cfg{star, agent, 0.05 + 0.02 * k};
        const double p = positive_trend_prob(cfg, filter_std_asym(cfg));
        EXPECT_LT(p, previous) << "sigma_s=" << cfg.sigma_s;
        previous = p;
      }
    }
  }
}

TEST(DetectionProbability, WellSpecifiedAtFixedEstimate) {
  // At a fixed reading x the conditional variance P_inf shrinks with lambda* and
  // grows with sigma*, so the probability moves the opposite way.
  const double x = 0.2;
  for (int i = 0; i < 10; ++i) {
    for (int j = 0; j < 10; ++j) {
      const TrendParams here{0.5 + 0.5 * i, 0.1 + 0.1 * j};
      const double p = positive_trend_prob(well(here), x);
      EXPECT_GT(positive_trend_prob(well({here.lambda_mu + 0.5, here.sigma_mu}), x), p);
      EXPECT_LT(positive_trend_prob(well({here.lambda_mu, here.sigma_mu + 0.1}), x), p);
    }
  }
}

TEST(DetectionProbability, WellSpecifiedAtFilterStdEasierWithHighSigmaLowLambda) {
  auto prob = [](const TrendParams& t) {
    const MisspecConfig cfg = well(t);
    return positive_trend_prob(cfg, filter_std_asym(cfg));
  };
  for (int i = 0; i < 10; ++i) {
    for (int j = 0; j < 10; ++j) {
      const TrendParams here{0.5 + 0.5 * i, 0.1 + 0.1 * j};
      const double p = prob(here);
      EXPECT_LT(prob({here.lambda_mu + 0.5, here.sigma_mu}), p);
      EXPECT_GT(prob({here.lambda_mu, here.sigma_mu + 0.1}), p);
    }
  }
}

TEST(MonteCarlo, VarianceEstimateOfKnownSample) {
  const std::vector<double> s{1.0, -1.0, 1.0, -1.0};
  const McEstimate e = variance_estimate(s);
  EXPECT_DOUBLE_EQ(e.mean, 0.0);
  EXPECT_DOUBLE_EQ(e.variance, 4.0 / 3.0);
  EXPECT_DOUBLE_EQ(e.standard_error, 0.0);
  // Deviations 1, 1, 1, 9: m2 = 3, m4 = 21, SE = sqrt((21 - 9) / 4).
  const std::vector<double> skew{0.0, 0.0, 0.0, 4.0};
  const McEstimate k = variance_estimate(skew);
  EXPECT_DOUBLE_EQ(k.mean, 1.0);
  EXPECT_DOUBLE_EQ(k.variance, 4.0);
  EXPECT_DOUBLE_EQ(k.standard_error, std::sqrt(3.0));
}

TEST(MonteCarlo, WellSpecifiedResidualWithinThreeStandardErrors) {
  const MisspecConfig cfg = well(kBest);
  const McEstimate mc = residual_mc_check(cfg, kDaily, 30.0, 10000, 1);
  EXPECT_FALSE(mc.short_horizon);
  EXPECT_LT(std::abs(mc.variance - residual_variance_asym(cfg)), 3.0 * mc.standard_error)
      << "empirical std " << std::sqrt(mc.variance);
}

TEST(MonteCarlo, MisspecifiedResidualWithinThreeStandardErrors) {
  const MisspecConfig cfg{kBest, kWorst, 0.3};
  const McEstimate mc = residual_mc_check(cfg, kDaily, 30.0, 10000, 2);
  EXPECT_LT(std::abs(mc.variance - residual_variance_asym(cfg)), 3.0 * mc.standard_error)
      << "empirical std " << std::sqrt(mc.variance);
}

TEST(MonteCarlo, FilterVarianceWithinThreeStandardErrors) {
  for (const MisspecConfig& cfg : {well(kBest), MisspecConfig{kWorst, kBest, 0.3}}) {
    const McEstimate mc = filter_variance_mc(cfg, kDaily, 30.0, 10000, 3);
    EXPECT_LT(std::abs(mc.variance - filter_variance_asym(cfg)), 3.0 * mc.standard_error);
  }
}

TEST(MonteCarlo, StandardErrorShrinksWithPaths) {
  const MisspecConfig cfg = well(kBest);
  const McEstimate small = residual_mc_check(cfg, kDaily, 10.0, 2000, 4);
  const McEstimate large = residual_mc_check(cfg, kDaily, 10.0, 4000, 4);
  EXPECT_NEAR(small.standard_error / large.standard_error, std::sqrt(2.0), 0.15);
}

TEST(MonteCarlo, DeterministicGivenSeed) {
  const MisspecConfig cfg{kWorst, kBest, 0.3};
  const auto a = simulate_terminal_pairs(cfg, kDaily, 2.0, 200, 9);
  const auto b = simulate_terminal_pairs(cfg, kDaily, 2.0, 200, 9);
  ASSERT_EQ(a.size(), b.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    EXPECT_EQ(a[i].trend, b[i].trend);
    EXPECT_EQ(a[i].estimate, b[i].estimate);
  }
}

TEST(MonteCarlo, SignConditioningMatchesClosedForm) {
  const MisspecConfig cfg = well(kBest);
  const auto pairs = simulate_terminal_pairs(cfg, kDaily, 20.0, 20000, 5);
  const double x = filter_std_asym(cfg);
  const SignConditioning sc = sign_conditioning(pairs, x, 0.1 * x);
  EXPECT_GT(sc.hits, 500u);
  EXPECT_LT(std::abs(sc.probability - positive_trend_prob(cfg, x)), 3.0 * sc.standard_error);
}

TEST(MonteCarlo, ShortHorizonFlagAndPreconditions) {
  EXPECT_TRUE(short_horizon(well(kBest), 1.0));
  EXPECT_FALSE(short_horizon(well(kBest), 30.0));
  // The slow rate is lambda* = 1 here: exp(-2 * 2) > 0.01 > exp(-2 * 3).
  EXPECT_TRUE(short_horizon(well(kBest), 2.0));
  EXPECT_FALSE(short_horizon(well(kBest), 3.0));
  EXPECT_TRUE(residual_mc_check(well(kBest), kDaily, 1.0, 100, 1).short_horizon);
  EXPECT_THROW(residual_mc_check(well(kBest), kDaily, 10.0, 99, 1), InvalidParameter);
  EXPECT_THROW(filter_variance_mc(well(kBest), kDaily, 10.0, 50, 1), InvalidParameter);
  EXPECT_THROW(validate(MisspecConfig{kBest, {0.0, 1.0}, 0.3}), InvalidParameter);
}

}  // namespace
}  // namespace trendfilter::misspec
