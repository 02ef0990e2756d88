#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "trendfilter/kalman.hpp"
#include "trendfilter/model.hpp"

namespace trendfilter::csv {

/// 15 significant digits, dot decimal.
std::string format(double value);

/// A return series read back from CSV. `t` is empty when the file has no t column.
struct Series {
  std::vector<double> t;
  std::vector<double> y;
};

/// Header `t,mu,y`; row k holds t = (k + 1) delta.
void write_path(std::ostream& out, const PathSample& path, double delta);

/// Header `t,y,mu_hat,gamma`.
void write_filter(std::ostream& out, const Series& series,
                  const std::vector<kalman::KalmanState>& states);

/// Reads any CSV with a header containing a `y` column (and optionally `t`).
/// Throws InvalidParameter on malformed input.
Series read_series(std::istream& in);

void write_row(std::ostream& out, const std::vector<double>& values);

}  // namespace trendfilter::csv
