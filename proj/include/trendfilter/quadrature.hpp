#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <vector>

namespace trendfilter {

struct QuadratureOptions {
  std::size_t initial_intervals = 1024;
  std::size_t max_intervals = std::size_t{1} << 22;
  /// Stop when every component changes by less than
  /// relative_tolerance * max_k |I_k| + absolute_tolerance between refinements.
  double relative_tolerance = 1e-10;
  double absolute_tolerance = 0.0;
};

struct QuadratureResult {
  std::vector<double> values;
  std::size_t intervals = 0;
  double last_change = 0.0;  ///< max componentwise change at the final refinement
  bool converged = false;
};

/// Vector-valued integrand: writes `out.size()` components at `x`.
using VectorIntegrand = std::function<void(double x, std::span<double> out)>;

/// Composite Simpson on [a, b] obtained as the Richardson extrapolation
/// (4 T_{2n} - T_n) / 3 of nested trapezoid sums; the interval count doubles
/// until successive Simpson estimates agree.
QuadratureResult simpson_refine(const VectorIntegrand& f, std::size_t components, double a,
                                double b, const QuadratureOptions& options = {});

}  // namespace trendfilter
