#include "measurefit/stationary.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace measurefit {

StationarySpec::StationarySpec(SdeModel model_, Grid1D grid_,
                               std::optional<double> xstar)
    : model(std::move(model_)), grid(grid_), xstar_index(0) {
  double anchor = 0.0;
  if (xstar) {
    anchor = *xstar;
  } else {
    anchor = std::clamp(0.0, grid.lo, grid.hi);
  }
  xstar_index = grid.nearest_index(anchor);
}

std::vector<double> potential(const StationarySpec& spec) {
  const Grid1D& g = spec.grid;
  const double h = g.spacing();

  // integrand f = 2 b / sigma^2 at the nodes
  std::vector<double> f(g.n);
  for (std::size_t i = 0; i < g.n; ++i) {
    const double x = g.node(i);
    const double b = spec.model.drift(x);
    const double s = spec.model.diffusion(x);
    f[i] = 2.0 * b / (s * s);
    if (!std::isfinite(f[i]))
      throw NumericError("potential: integrand 2b/sigma^2 non-finite at x = " +
                         std::to_string(x));
  }

  std::vector<double> psi(g.n);
  const std::size_t k = spec.xstar_index;
  psi[k] = 0.0;
  for (std::size_t i = k + 1; i < g.n; ++i)
    psi[i] = psi[i - 1] + 0.5 * h * (f[i - 1] + f[i]);
  for (std::size_t i = k; i-- > 0;)
    psi[i] = psi[i + 1] - 0.5 * h * (f[i] + f[i + 1]);
  return psi;
}

GridDensity stationary_density(const StationarySpec& spec) {
  const Grid1D& g = spec.grid;
  std::vector<double> psi = potential(spec);
  const double psi_max = *std::max_element(psi.begin(), psi.end());

  std::vector<double> w(g.n);
  for (std::size_t i = 0; i < g.n; ++i) {
    const double s = spec.model.diffusion(g.node(i));
    w[i] = std::exp(psi[i] - psi_max) / (s * s);
    if (!std::isfinite(w[i]))
      throw NumericError(
          "stationary density: non-finite value at x = " +
          std::to_string(g.node(i)) + " (density non-normalizable?)");
  }

  GridDensity p = [&] {
    try {
      return normalize(g, std::move(w));
    } catch (const NumericError&) {
      throw NumericError(
          "stationary density: zero or non-finite mass; domain too small or "
          "density non-normalizable");
    }
  }();

  const double tails = tail_mass_fraction(p);
  if (tails > 1e-2)
    throw NumericError(
        "stationary density: " + std::to_string(tails) +
        " of the mass sits in the outermost 5% of the grid; domain too small "
        "or density non-normalizable");
  return p;
}

double flux_residual(const SdeModel& model, const GridDensity& p) {
  const Grid1D& g = p.grid();
  const double h = g.spacing();
  std::span<const double> v = p.values();

  std::vector<double> u(g.n);  // sigma^2 p
  double pmax = 0.0;
  for (std::size_t i = 0; i < g.n; ++i) {
    const double s = model.diffusion(g.node(i));
    u[i] = s * s * v[i];
    pmax = std::max(pmax, v[i]);
  }
  double jmax = 0.0;
  for (std::size_t i = 1; i + 1 < g.n; ++i) {
    const double du = (u[i + 1] - u[i - 1]) / (2.0 * h);
    const double j = model.drift(g.node(i)) * v[i] - 0.5 * du;
    jmax = std::max(jmax, std::abs(j));
  }
  return pmax > 0.0 ? jmax / pmax : 0.0;
}

}  // namespace measurefit
