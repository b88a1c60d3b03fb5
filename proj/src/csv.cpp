#include "measurefit/csv.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <ostream>
#include <sstream>

namespace measurefit::csv {

std::string format_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

namespace {

struct Row {
  std::vector<double> fields;
  int line;
};

// Parse `cols` comma-separated doubles per line after the expected header.
std::vector<Row> read_rows(std::istream& in, const std::string& origin,
                           const std::string& header, std::size_t cols) {
  std::string line;
  int lineno = 0;
  if (!std::getline(in, line))
    throw ConfigError(origin + ": empty file");
  ++lineno;
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line != header)
    throw ConfigError(origin + " line 1: expected header '" + header +
                      "', got '" + line + "'");
  std::vector<Row> rows;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    Row row;
    row.line = lineno;
    std::size_t pos = 0;
    for (std::size_t c = 0; c < cols; ++c) {
      std::size_t end = (c + 1 < cols) ? line.find(',', pos) : line.size();
      if (end == std::string::npos)
        throw ConfigError(origin + " line " + std::to_string(lineno) +
                          ": expected " + std::to_string(cols) + " fields");
      double v = 0.0;
      const char* first = line.data() + pos;
      const char* last = line.data() + end;
      auto [p, ec] = std::from_chars(first, last, v);
      if (ec != std::errc() || p != last || !std::isfinite(v))
        throw ConfigError(origin + " line " + std::to_string(lineno) +
                          ": bad number '" + line.substr(pos, end - pos) + "'");
      row.fields.push_back(v);
      pos = end + 1;
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

Grid1D grid_from_nodes(const std::vector<double>& x, const std::string& origin) {
  const std::size_t n = x.size();
  if (n < 3) throw ConfigError(origin + ": need at least 3 rows");
  for (std::size_t i = 1; i < n; ++i)
    if (!(x[i] > x[i - 1]))
      throw ConfigError(origin + ": nodes must be strictly increasing");
  const double h = (x.back() - x.front()) / static_cast<double>(n - 1);
  for (std::size_t i = 1; i < n; ++i) {
    const double gap = x[i] - x[i - 1];
    if (std::abs(gap - h) > 1e-9 * std::abs(h))
      throw ConfigError(origin + ": node spacing is not uniform (gap " +
                        format_double(gap) + " vs " + format_double(h) + ")");
  }
  return Grid1D(x.front(), x.back(), n);
}

void check_nonnegative(const std::vector<double>& v, const std::string& origin) {
  for (double y : v)
    if (y < 0.0)
      throw ConfigError(origin + ": negative density value " +
                        format_double(y));
}

}  // namespace

void write_density(std::ostream& out, const Grid1D& grid,
                   std::span<const double> values) {
  out << "x,value\n";
  for (std::size_t i = 0; i < grid.n; ++i)
    out << format_double(grid.node(i)) << ',' << format_double(values[i])
        << '\n';
}

void write_density_file(const std::string& path, const Grid1D& grid,
                        std::span<const double> values) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ConfigError("cannot open '" + path + "' for writing");
  write_density(out, grid, values);
}

GridDensity read_density(std::istream& in, const std::string& origin) {
  const auto rows = read_rows(in, origin, "x,value", 2);
  std::vector<double> x, v;
  for (const auto& r : rows) {
    x.push_back(r.fields[0]);
    v.push_back(r.fields[1]);
  }
  Grid1D grid = grid_from_nodes(x, origin);
  check_nonnegative(v, origin);
  return GridDensity(grid, std::move(v));
}

GridDensity read_density_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot open '" + path + "'");
  return read_density(in, path);
}

void write_time_series(std::ostream& out, const FpSolution& sol) {
  out << "t,x,value\n";
  for (std::size_t k = 0; k < sol.times.size(); ++k) {
    const std::string t = format_double(sol.times[k]);
    const Grid1D& g = sol.densities[k].grid();
    std::span<const double> v = sol.densities[k].values();
    for (std::size_t i = 0; i < g.n; ++i)
      out << t << ',' << format_double(g.node(i)) << ','
          << format_double(v[i]) << '\n';
  }
}

void write_time_series_file(const std::string& path, const FpSolution& sol) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ConfigError("cannot open '" + path + "' for writing");
  write_time_series(out, sol);
}

TimeSeries read_time_series(std::istream& in, const std::string& origin) {
  const auto rows = read_rows(in, origin, "t,x,value", 3);
  if (rows.empty()) throw ConfigError(origin + ": no data rows");

  std::vector<double> times;
  std::vector<std::vector<double>> xs, vs;
  for (const auto& r : rows) {
    const double t = r.fields[0];
    if (times.empty() || t != times.back()) {
      if (!times.empty() && t < times.back())
        throw ConfigError(origin + " line " + std::to_string(r.line) +
                          ": time blocks must be ascending");
      times.push_back(t);
      xs.emplace_back();
      vs.emplace_back();
    }
    xs.back().push_back(r.fields[1]);
    vs.back().push_back(r.fields[2]);
  }

  Grid1D grid = grid_from_nodes(xs.front(), origin);
  for (std::size_t k = 1; k < xs.size(); ++k)
    if (xs[k] != xs.front())
      throw ConfigError(origin + ": time blocks use different x grids");
  for (const auto& v : vs) check_nonnegative(v, origin);
  return TimeSeries{grid, std::move(times), std::move(vs)};
}

TimeSeries read_time_series_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot open '" + path + "'");
  return read_time_series(in, path);
}

void write_scan_trace(std::ostream& out,
                      std::span<const std::pair<double, double>> trace) {
  out << "theta,objective\n";
  for (const auto& [theta, objective] : trace)
    out << format_double(theta) << ',' << format_double(objective) << '\n';
}

void write_scan_trace_file(const std::string& path,
                           std::span<const std::pair<double, double>> trace) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ConfigError("cannot open '" + path + "' for writing");
  write_scan_trace(out, trace);
}

}  // namespace measurefit::csv
