#include "trendfilter/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "trendfilter/error.hpp"

namespace trendfilter {

QuadratureResult simpson_refine(const VectorIntegrand& f, std::size_t components, double a,
                                double b, const QuadratureOptions& options) {
  if (!(b > a)) throw InvalidParameter("simpson_refine: empty interval");
  if (options.initial_intervals < 1) throw InvalidParameter("simpson_refine: no intervals");

  std::vector<double> buffer(components);
  std::vector<double> endpoint_sum(components, 0.0);
  std::vector<double> interior_sum(components, 0.0);

  f(a, buffer);
  for (std::size_t c = 0; c < components; ++c) endpoint_sum[c] += 0.5 * buffer[c];
  f(b, buffer);
  for (std::size_t c = 0; c < components; ++c) endpoint_sum[c] += 0.5 * buffer[c];

  // Trapezoid with n intervals: h * (endpoint_sum + interior_sum).
  std::size_t n = options.initial_intervals;
  {
    const double h = (b - a) / static_cast<double>(n);
    for (std::size_t i = 1; i < n; ++i) {
      f(a + static_cast<double>(i) * h, buffer);
      for (std::size_t c = 0; c < components; ++c) interior_sum[c] += buffer[c];
    }
  }
  auto trapezoid = [&](std::size_t intervals) {
    const double h = (b - a) / static_cast<double>(intervals);
    std::vector<double> t(components);
    for (std::size_t c = 0; c < components; ++c) t[c] = h * (endpoint_sum[c] + interior_sum[c]);
    return t;
  };

  auto add_midpoints = [&](std::size_t intervals) {
    const double h = (b - a) / static_cast<double>(intervals);
    for (std::size_t i = 0; i < intervals; ++i) {
      f(a + (static_cast<double>(i) + 0.5) * h, buffer);
      for (std::size_t c = 0; c < components; ++c) interior_sum[c] += buffer[c];
    }
  };

  std::vector<double> coarse = trapezoid(n);
  add_midpoints(n);
  n *= 2;
  std::vector<double> fine = trapezoid(n);

  QuadratureResult result;
  result.last_change = std::numeric_limits<double>::infinity();
  result.values.resize(components);
  std::vector<double> previous;
  while (true) {
    for (std::size_t c = 0; c < components; ++c) {
      result.values[c] = (4.0 * fine[c] - coarse[c]) / 3.0;
    }
    result.intervals = n;
    if (!previous.empty()) {
      double scale = 0.0;
      double change = 0.0;
      for (std::size_t c = 0; c < components; ++c) {
        scale = std::max(scale, std::abs(result.values[c]));
        change = std::max(change, std::abs(result.values[c] - previous[c]));
      }
      result.last_change = change;
      if (change <= options.relative_tolerance * scale + options.absolute_tolerance) {
        result.converged = true;
        return result;
      }
    }
    if (2 * n > options.max_intervals) return result;
    previous = result.values;
    coarse = fine;
    add_midpoints(n);
    n *= 2;
    fine = trapezoid(n);
  }
}

}  // namespace trendfilter
