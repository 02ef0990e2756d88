#include "trendfilter/csv.hpp"

#include <cmath>
#include <cstdio>
#include <istream>
#include <ostream>
#include <sstream>

#include "trendfilter/error.hpp"

namespace trendfilter::csv {

namespace {

std::vector<std::string> split(const std::string& line) {
  std::vector<std::string> fields;
  std::stringstream ss(line);
  std::string field;
  while (std::getline(ss, field, ',')) {
    while (!field.empty() && (field.back() == '\r' || field.back() == ' ')) field.pop_back();
    while (!field.empty() && field.front() == ' ') field.erase(field.begin());
    fields.push_back(field);
  }
  return fields;
}

double parse_number(const std::string& text, std::size_t line_no) {
  try {
    std::size_t used = 0;
    const double v = std::stod(text, &used);
    if (used == text.size() && std::isfinite(v)) return v;
  } catch (const std::exception&) {
  }
  throw InvalidParameter("csv line " + std::to_string(line_no) + ": not a finite number: '" + text + "'");
}

}  // namespace

std::string format(double value) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.15g", value);
  return buf;
}

void write_row(std::ostream& out, const std::vector<double>& values) {
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (i) out << ',';
    out << format(values[i]);
  }
  out << '\n';
}

void write_path(std::ostream& out, const PathSample& path, double delta) {
  out << "t,mu,y\n";
  for (std::size_t k = 0; k < path.n; ++k) {
    write_row(out, {static_cast<double>(k + 1) * delta, path.mu[k], path.y[k]});
  }
}

void write_filter(std::ostream& out, const Series& series,
                  const std::vector<kalman::KalmanState>& states) {
  out << "t,y,mu_hat,gamma\n";
  for (std::size_t k = 0; k < states.size(); ++k) {
    const double t = series.t.empty() ? static_cast<double>(k + 1) : series.t[k];
    write_row(out, {t, series.y[k], states[k].mu_hat, states[k].gamma});
  }
}

Series read_series(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw InvalidParameter("csv: missing header row");
  const auto header = split(line);
  int t_col = -1;
  int y_col = -1;
  for (std::size_t i = 0; i < header.size(); ++i) {
    if (header[i] == "t") t_col = static_cast<int>(i);
    if (header[i] == "y") y_col = static_cast<int>(i);
  }
  if (y_col < 0) throw InvalidParameter("csv: header has no 'y' column");

  Series series;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() || line == "\r") continue;
    const auto fields = split(line);
    if (fields.size() != header.size()) {
      throw InvalidParameter("csv line " + std::to_string(line_no) + ": expected " +
                             std::to_string(header.size()) + " fields");
    }
    series.y.push_back(parse_number(fields[static_cast<std::size_t>(y_col)], line_no));
    if (t_col >= 0) series.t.push_back(parse_number(fields[static_cast<std::size_t>(t_col)], line_no));
  }
  return series;
}

}  // namespace trendfilter::csv
