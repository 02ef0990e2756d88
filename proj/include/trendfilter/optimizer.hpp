#pragma once

#include <functional>
#include <span>
#include <vector>

namespace trendfilter {

struct SimplexOptions {
  std::size_t max_iterations = 500;
  /// Converged once the largest vertex distance from the best vertex is below this.
  double diameter_tolerance = 1e-8;
  double initial_step = 0.1;
};

struct SimplexResult {
  std::vector<double> x;
  double value = 0.0;
  std::size_t iterations = 0;
  std::size_t evaluations = 0;
  bool converged = false;
};

using Objective = std::function<double(std::span<const double>)>;

/// Nelder-Mead minimization with the standard coefficients
/// (reflection 1, expansion 2, contraction 1/2, shrink 1/2).
/// Non-finite objective values are treated as +infinity.
SimplexResult nelder_mead(const Objective& f, std::span<const double> start,
                          const SimplexOptions& options = {});

}  // namespace trendfilter
