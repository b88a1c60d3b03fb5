#include "measurefit/density.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "measurefit/kernels.hpp"

namespace measurefit {

Grid1D::Grid1D(double lo_, double hi_, std::size_t n_) : lo(lo_), hi(hi_), n(n_) {
  if (!(lo < hi) || !std::isfinite(lo) || !std::isfinite(hi))
    throw NumericError("grid: lo must be finite and less than hi");
  if (n < 3) throw NumericError("grid: need at least 3 nodes");
}

std::size_t Grid1D::nearest_index(double x) const {
  if (!(x >= lo && x <= hi))
    throw NumericError("grid: point " + std::to_string(x) +
                       " lies outside [" + std::to_string(lo) + ", " +
                       std::to_string(hi) + "]");
  const double k = (x - lo) / spacing();
  const auto i = static_cast<std::size_t>(std::llround(k));
  return std::min(i, n - 1);
}

GridDensity::GridDensity(Grid1D grid, std::vector<double> values)
    : grid_(grid), values_(std::move(values)) {
  if (values_.size() != grid_.n)
    throw NumericError("density: value count does not match grid");
  for (double v : values_) {
    if (!std::isfinite(v)) throw NumericError("density: non-finite value");
    if (v < 0.0) throw NumericError("density: negative value");
  }
}

double GridDensity::mass() const { return trapezoid(values_, grid_); }

double trapezoid(std::span<const double> values, const Grid1D& grid) {
  if (values.size() != grid.n)
    throw NumericError("trapezoid: value count does not match grid");
  return kernels::trapezoid(values, grid.spacing());
}

GridDensity normalize(const Grid1D& grid, std::vector<double> values) {
  const double mass = trapezoid(values, grid);
  if (!std::isfinite(mass) || mass <= 0.0)
    throw NumericError("normalize: zero or non-finite mass");
  kernels::scale(values, 1.0 / mass);
  return GridDensity(grid, std::move(values));
}

GridDensity normalize(const GridDensity& d) {
  return normalize(d.grid(), std::vector<double>(d.values().begin(),
                                                 d.values().end()));
}

namespace {

void require_normalized(const GridDensity& d, const char* which) {
  const double m = d.mass();
  if (std::abs(m - 1.0) > 1e-6)
    throw NumericError(std::string("hellinger: ") + which +
                       " density is not normalized (mass " +
                       std::to_string(m) + ")");
}

}  // namespace

double hellinger(const GridDensity& p, const GridDensity& q) {
  if (!(p.grid() == q.grid()))
    throw NumericError("hellinger: densities live on different grids");
  require_normalized(p, "first");
  require_normalized(q, "second");
  const double h2 =
      0.5 * kernels::hellinger_sq_integral(p.values(), q.values(),
                                           p.grid().spacing());
  return std::sqrt(std::clamp(h2, 0.0, 1.0));
}

GridDensity resample(const GridDensity& d, const Grid1D& target) {
  const Grid1D& src = d.grid();
  if (target.lo < src.lo || target.hi > src.hi)
    throw NumericError("resample: target grid extends beyond the source range");
  std::span<const double> v = d.values();
  std::vector<double> out(target.n);
  const double h = src.spacing();
  const std::ptrdiff_t tn = static_cast<std::ptrdiff_t>(target.n);
#pragma omp parallel for schedule(static) if (target.n >= 32768)
  for (std::ptrdiff_t ti = 0; ti < tn; ++ti) {
    const double x = target.node(static_cast<std::size_t>(ti));
    double k = (x - src.lo) / h;
    auto i = static_cast<std::size_t>(k);
    if (i >= src.n - 1) i = src.n - 2;
    const double w = std::clamp(k - static_cast<double>(i), 0.0, 1.0);
    out[static_cast<std::size_t>(ti)] = (1.0 - w) * v[i] + w * v[i + 1];
  }
  return normalize(target, std::move(out));
}

double tail_mass_fraction(const GridDensity& d) {
  const Grid1D& g = d.grid();
  const std::size_t k = static_cast<std::size_t>(
      std::ceil(0.05 * static_cast<double>(g.n - 1)));
  if (k == 0 || 2 * k >= g.n) return 0.0;
  std::span<const double> v = d.values();
  const double h = g.spacing();
  const double left = kernels::serial::trapezoid(v.subspan(0, k + 1), h);
  const double right = kernels::serial::trapezoid(v.subspan(g.n - 1 - k), h);
  const double total = d.mass();
  if (!(total > 0.0)) return 0.0;
  return (left + right) / total;
}

void warn_if_heavy_tail(const GridDensity& d, std::string_view label) {
  const double f = tail_mass_fraction(d);
  if (f > 1e-8)
    warn(std::string(label) + " carries " + std::to_string(f) +
         " of its mass in the outermost 5% of the grid; the domain "
         "truncation may dominate the comparison");
}

}  // namespace measurefit
