#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace trendfilter::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 2;
inline constexpr int kExitNumerical = 3;

/// One axis of a parameter sweep, written `name=min:max:steps[:log]`.
/// Endpoints are inclusive.
struct GridSpec {
  std::string name;
  double min = 0.0;
  double max = 0.0;
  std::size_t steps = 2;
  bool log_spacing = false;

  std::vector<double> values() const;
};

/// Parses a single axis. Throws InvalidParameter on malformed text or when
/// min >= max, steps < 2, or log spacing with min <= 0.
GridSpec parse_grid_axis(const std::string& text);
/// Parses a comma-separated list of axes.
std::vector<GridSpec> parse_grid(const std::string& text);

/// Entry point for the `trendfilter` executable. Returns the process exit status.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace trendfilter::cli
