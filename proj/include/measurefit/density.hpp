#pragma once

#include <cstddef>
#include <span>
#include <string_view>
#include <vector>

#include "measurefit/common.hpp"

namespace measurefit {

/// Uniform grid with n nodes on [lo, hi]; node i sits at lo + i*spacing().
struct Grid1D {
  Grid1D(double lo, double hi, std::size_t n);

  double lo;
  double hi;
  std::size_t n;

  double spacing() const noexcept {
    return (hi - lo) / static_cast<double>(n - 1);
  }
  double node(std::size_t i) const noexcept {
    return lo + static_cast<double>(i) * spacing();
  }
  /// Index of the node nearest to x (x must lie within [lo, hi]).
  std::size_t nearest_index(double x) const;

  bool operator==(const Grid1D& o) const noexcept {
    return lo == o.lo && hi == o.hi && n == o.n;
  }
};

/// Nonnegative, finite density values on a Grid1D. Instances produced by
/// normalize() carry unit trapezoid mass; hellinger() insists on it.
class GridDensity {
public:
  GridDensity(Grid1D grid, std::vector<double> values);

  const Grid1D& grid() const noexcept { return grid_; }
  std::span<const double> values() const noexcept { return values_; }
  double mass() const;

private:
  Grid1D grid_;
  std::vector<double> values_;
};

/// Composite trapezoid rule; values must match the grid length.
double trapezoid(std::span<const double> values, const Grid1D& grid);

/// Scale raw values to unit trapezoid mass. Throws NumericError on zero or
/// non-finite mass.
GridDensity normalize(const Grid1D& grid, std::vector<double> values);
GridDensity normalize(const GridDensity& d);

/// Hellinger distance of Eq-(3) form: sqrt(½ ∫ (√p − √q)² dx), clamped into
/// [0, 1]. Both densities must share one grid and be normalized.
double hellinger(const GridDensity& p, const GridDensity& q);

/// Linear interpolation onto `target` (target range must lie inside the
/// source range), then normalize.
GridDensity resample(const GridDensity& d, const Grid1D& target);

/// Fraction of total mass carried in the outermost 5% of the range at each
/// end. Truncation-error guard for comparisons on a finite grid.
double tail_mass_fraction(const GridDensity& d);

/// One-shot guard: warn when more than 1e-8 of the mass sits in the tails.
void warn_if_heavy_tail(const GridDensity& d, std::string_view label);

}  // namespace measurefit
