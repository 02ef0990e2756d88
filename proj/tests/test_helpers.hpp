#pragma once

#include <cmath>
#include <random>

#include "trendfilter/model.hpp"

namespace trendfilter::testing {

/// Log-uniform draws over realistic ranges of (lambda_mu, sigma_mu, sigma_s, delta).
inline MarketParams random_params(std::mt19937_64& gen) {
  auto log_uniform = [&](double lo, double hi) {
    std::uniform_real_distribution<double> u(std::log(lo), std::log(hi));
    return std::exp(u(gen));
  };
  MarketParams p;
  p.trend.lambda_mu = log_uniform(0.1, 10.0);
  p.trend.sigma_mu = log_uniform(0.05, 2.0);
  p.sigma_s = log_uniform(0.05, 0.6);
  p.delta = log_uniform(1.0 / 252.0, 1.0 / 12.0);
  return p;
}

inline MarketParams reference_params() { return {{1.0, 0.9}, 0.3, 1.0 / 252.0}; }

}  // namespace trendfilter::testing
