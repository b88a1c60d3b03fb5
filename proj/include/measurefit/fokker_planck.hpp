#pragma once

#include <optional>
#include <vector>

#include "measurefit/density.hpp"
#include "measurefit/sde.hpp"

namespace measurefit {

/// Time-dependent Fokker-Planck problem
///   p_t = -∂_x [ b p − ½ ∂_x(σ² p) ],   p(x, 0) = δ(x0),
/// on a truncated domain with zero-flux (reflecting) boundaries.
///
/// The default time step dt applies up to t_switch, dt_late afterwards
/// (early times near the delta are the stiff part). An explicit initial
/// density may replace the delta, e.g. to evolve a precomputed steady state.
struct FpProblem {
  SdeModel model;
  Grid1D grid;
  double x0 = 0.0;
  std::vector<double> output_times;  ///< strictly increasing, all > 0
  double dt = 1e-3;
  double dt_late = 1e-2;
  double t_switch = 1.0;
  std::optional<GridDensity> initial;  ///< overrides the delta when present
};

struct FpSolution {
  std::vector<double> times;
  std::vector<GridDensity> densities;  ///< normalized, one per output time
  double max_step_mass_drift = 0.0;    ///< per-step relative drift (audit)
  double min_value = 0.0;              ///< most negative raw value at outputs
};

/// Conservative Chang-Cooper finite-volume discretization with
/// Crank-Nicolson stepping (one implicit-Euler startup step damps the
/// delta); tridiagonal solves by Thomas elimination. Deterministic for any
/// thread count. Throws NumericError on scheme failure (mass drift beyond
/// 1e-8 per step, negative density beyond -1e-12, non-finite values, loss of
/// diagonal dominance at the configured dt).
FpSolution solve(const FpProblem& prob);

}  // namespace measurefit
