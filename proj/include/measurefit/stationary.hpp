#pragma once

#include <optional>

#include "measurefit/density.hpp"
#include "measurefit/sde.hpp"

namespace measurefit {

/// Inputs for the closed-form steady-state density
///   p(x) = C/σ²(x) · exp(Ψ(x)),  Ψ(x) = ∫_{x*}^x 2 b(y)/σ²(y) dy.
/// x* is an arbitrary grid node; the constant shift it induces in Ψ is
/// absorbed by the normalization.
struct StationarySpec {
  StationarySpec(SdeModel model, Grid1D grid,
                 std::optional<double> xstar = std::nullopt);

  SdeModel model;
  Grid1D grid;
  std::size_t xstar_index;  ///< node index of x*; nearest node to 0 by default
};

/// Ψ at every node by cumulative trapezoid integration; Ψ(x*) = 0 exactly.
std::vector<double> potential(const StationarySpec& spec);

/// Normalized steady density. exp(Ψ − max Ψ) is formed before normalizing so
/// steep potentials cannot overflow. Throws NumericError when the density is
/// not normalizable on the grid (mass overflow, or more than 1% of the mass
/// in the outermost 5% of the range).
GridDensity stationary_density(const StationarySpec& spec);

/// max |J| / max p over the interior, with the steady flux
/// J = b p − ½ (σ² p)' estimated by central differences. Zero for an exact
/// steady state; a residual guard for computed ones.
double flux_residual(const SdeModel& model, const GridDensity& p);

}  // namespace measurefit
