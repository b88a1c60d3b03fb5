#pragma once

#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

#include "measurefit/density.hpp"
#include "measurefit/fokker_planck.hpp"

namespace measurefit::csv {

/// All emitters print 17 significant digits (%.17g) so outputs are
/// byte-identical across runs; readers verify strictly increasing nodes with
/// uniform spacing within 1e-9 relative.

/// Density format: header `x,value`, one row per node.
void write_density(std::ostream& out, const Grid1D& grid,
                   std::span<const double> values);
void write_density_file(const std::string& path, const Grid1D& grid,
                        std::span<const double> values);
GridDensity read_density(std::istream& in, const std::string& origin);
GridDensity read_density_file(const std::string& path);

/// Time-series format: header `t,x,value`, long form, rows grouped by t
/// ascending then x ascending.
void write_time_series(std::ostream& out, const FpSolution& sol);
void write_time_series_file(const std::string& path, const FpSolution& sol);

struct TimeSeries {
  Grid1D grid;
  std::vector<double> times;
  std::vector<std::vector<double>> values;  // raw, one block per time
};
TimeSeries read_time_series(std::istream& in, const std::string& origin);
TimeSeries read_time_series_file(const std::string& path);

/// Scan-trace format: header `theta,objective`.
void write_scan_trace(std::ostream& out,
                      std::span<const std::pair<double, double>> trace);
void write_scan_trace_file(const std::string& path,
                           std::span<const std::pair<double, double>> trace);

std::string format_double(double v);  // %.17g

}  // namespace measurefit::csv
