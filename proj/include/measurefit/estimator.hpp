#pragma once

#include <string>
#include <utility>
#include <vector>

#include "measurefit/density.hpp"
#include "measurefit/fokker_planck.hpp"
#include "measurefit/sde.hpp"

namespace measurefit {

/// Observation times below this are rejected: the observation densities
/// degenerate toward point masses and the solver's regularized delta is
/// unresolved there.
inline constexpr double kMinObservationTime = 0.1;

/// An observed density (stationary) or density time series (time-dependent),
/// normalized on a single grid.
struct Observation {
  enum class Kind { Stationary, TimeDependent };

  static Observation stationary(GridDensity q, std::string source);
  static Observation time_series(std::vector<double> times,
                                 std::vector<GridDensity> q,
                                 std::string source);

  Kind kind;
  std::vector<double> times;           // empty for stationary
  std::vector<GridDensity> densities;  // one per time; single for stationary
  std::string source;                  // expression text or CSV path

  const Grid1D& grid() const { return densities.front().grid(); }

private:
  Observation(Kind k, std::vector<double> t, std::vector<GridDensity> d,
              std::string s);
};

struct FitResult {
  double theta_hat = 0.0;
  double objective_value = 0.0;
  std::vector<std::pair<double, double>> scan_trace;    // (θ, objective)
  std::vector<std::pair<double, double>> refine_trace;  // refinement evals
  std::size_t refinement_iterations = 0;
  bool boundary_minimum = false;  ///< best scan point sat on the range edge
};

struct FitOptions {
  double scan_step = 0.1;
  double bracket_tol = 1e-6;  ///< golden-section termination width
  int jobs = 0;               ///< scan parallelism; 0 = OpenMP default
};

/// F(θ) = H²(p_θ, q) with the ½ factor, p_θ the stationary density of the
/// instantiated model. Inadmissible θ (non-integrable density) yields +inf
/// rather than an error so scans can traverse partially admissible families.
double stationary_objective(const SdeFamily& family, double theta,
                            const Observation& obs, const Grid1D& grid);

/// Coarse scan over the family range at scan_step, then golden-section
/// refinement around the best interior scan point (first best wins on ties).
/// A best point on the range boundary is returned as-is with
/// boundary_minimum set.
FitResult fit_stationary(const SdeFamily& family, const Observation& obs,
                         const Grid1D& grid, const FitOptions& opts);

/// max over observation times of ∫ (√q_t − √p_t)² dx — the unhalved
/// squared-Hellinger form of the time-dependent objective. The halving
/// convention differs from stationary_objective on purpose; a positive
/// scaling cannot move the minimizer. One Fokker-Planck solve per call;
/// solver failure yields +inf.
double time_objective(const SdeFamily& family, double theta,
                      const Observation& obs, const FpProblem& fp_defaults);

/// Same scan + refinement protocol as fit_stationary on time_objective.
FitResult fit_time(const SdeFamily& family, const Observation& obs,
                   const FpProblem& fp_defaults, const FitOptions& opts);

/// Invert the steady-state relation for the drift:
///   b(x) = (σ²(x) q(x))' / (2 q(x)),
/// central differences on the interior, one-sided at the two boundary nodes.
/// q must be positive on the interior.
std::vector<double> recover_drift(const Observation& obs,
                                  const ScalarFunctionSpec& diffusion,
                                  const Grid1D& grid);

}  // namespace measurefit
