#include "trendfilter/optimizer.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "trendfilter/error.hpp"

namespace trendfilter {

namespace {

using Point = std::vector<double>;

Point affine(const Point& base, const Point& toward, double t) {
  Point p(base.size());
  for (std::size_t i = 0; i < base.size(); ++i) p[i] = base[i] + t * (toward[i] - base[i]);
  return p;
}

}  // namespace

SimplexResult nelder_mead(const Objective& f, std::span<const double> start,
                          const SimplexOptions& options) {
  const std::size_t dim = start.size();
  if (dim == 0) throw InvalidParameter("nelder_mead: empty starting point");

  SimplexResult result;
  auto eval = [&](const Point& p) {
    ++result.evaluations;
    const double v = f(p);
    return std::isfinite(v) ? v : std::numeric_limits<double>::infinity();
  };

  std::vector<Point> vertices(dim + 1, Point(start.begin(), start.end()));
  for (std::size_t i = 0; i < dim; ++i) vertices[i + 1][i] += options.initial_step;
  std::vector<double> values(dim + 1);
  for (std::size_t i = 0; i <= dim; ++i) values[i] = eval(vertices[i]);

  std::vector<std::size_t> order(dim + 1);
  auto sort_vertices = [&] {
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return values[a] < values[b]; });
    std::vector<Point> v2(dim + 1);
    std::vector<double> f2(dim + 1);
    for (std::size_t i = 0; i <= dim; ++i) {
      v2[i] = std::move(vertices[order[i]]);
      f2[i] = values[order[i]];
    }
    vertices = std::move(v2);
    values = std::move(f2);
  };
  auto diameter = [&] {
    double d = 0.0;
    for (std::size_t i = 1; i <= dim; ++i) {
      double s = 0.0;
      for (std::size_t j = 0; j < dim; ++j) {
        const double diff = vertices[i][j] - vertices[0][j];
        s += diff * diff;
      }
      d = std::max(d, std::sqrt(s));
    }
    return d;
  };

  sort_vertices();
  while (result.iterations < options.max_iterations) {
    if (diameter() < options.diameter_tolerance) {
      result.converged = true;
      break;
    }
    ++result.iterations;

    Point centroid(dim, 0.0);
    for (std::size_t i = 0; i < dim; ++i) {
      for (std::size_t j = 0; j < dim; ++j) centroid[j] += vertices[i][j] / static_cast<double>(dim);
    }
    const Point& worst = vertices[dim];

    const Point reflected = affine(centroid, worst, -1.0);
    const double f_reflected = eval(reflected);
    if (f_reflected < values[0]) {
      const Point expanded = affine(centroid, worst, -2.0);
      const double f_expanded = eval(expanded);
      if (f_expanded < f_reflected) {
        vertices[dim] = expanded;
        values[dim] = f_expanded;
      } else {
        vertices[dim] = reflected;
        values[dim] = f_reflected;
      }
    } else if (f_reflected < values[dim - 1]) {
      vertices[dim] = reflected;
      values[dim] = f_reflected;
    } else {
      const bool outside = f_reflected < values[dim];
      const Point contracted = outside ? affine(centroid, reflected, 0.5)
                                       : affine(centroid, worst, 0.5);
      const double f_contracted = eval(contracted);
      if (f_contracted < std::min(f_reflected, values[dim])) {
        vertices[dim] = contracted;
        values[dim] = f_contracted;
      } else {
        for (std::size_t i = 1; i <= dim; ++i) {
          vertices[i] = affine(vertices[0], vertices[i], 0.5);
          values[i] = eval(vertices[i]);
        }
      }
    }
    sort_vertices();
  }
  if (!result.converged && diameter() < options.diameter_tolerance) result.converged = true;

  result.x = vertices[0];
  result.value = values[0];
  return result;
}

}  // namespace trendfilter
