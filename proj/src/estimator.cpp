#include "measurefit/estimator.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>

#include "measurefit/kernels.hpp"
#include "measurefit/stationary.hpp"

namespace measurefit {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();
}

Observation::Observation(Kind k, std::vector<double> t,
                         std::vector<GridDensity> d, std::string s)
    : kind(k), times(std::move(t)), densities(std::move(d)),
      source(std::move(s)) {
  if (densities.empty()) throw NumericError("observation: no densities");
  const Grid1D& g = densities.front().grid();
  for (const auto& q : densities) {
    if (!(q.grid() == g))
      throw NumericError("observation: densities on mismatched grids");
    if (std::abs(q.mass() - 1.0) > 1e-6)
      throw NumericError("observation: density not normalized");
  }
  if (kind == Kind::TimeDependent) {
    if (times.size() != densities.size())
      throw NumericError("observation: time/density count mismatch");
    double prev = 0.0;
    for (double t_i : times) {
      if (t_i < kMinObservationTime)
        throw NumericError("observation: time " + std::to_string(t_i) +
                           " below the minimum " +
                           std::to_string(kMinObservationTime));
      if (!(t_i > prev))
        throw NumericError("observation: times must be strictly increasing");
      prev = t_i;
    }
  }
  warn_if_heavy_tail(densities.back(), "observation '" + source + "'");
}

Observation Observation::stationary(GridDensity q, std::string source) {
  std::vector<GridDensity> d;
  d.push_back(std::move(q));
  return Observation(Kind::Stationary, {}, std::move(d), std::move(source));
}

Observation Observation::time_series(std::vector<double> times,
                                     std::vector<GridDensity> q,
                                     std::string source) {
  return Observation(Kind::TimeDependent, std::move(times), std::move(q),
                     std::move(source));
}

double stationary_objective(const SdeFamily& family, double theta,
                            const Observation& obs, const Grid1D& grid) {
  if (obs.kind != Observation::Kind::Stationary)
    throw NumericError("stationary_objective: needs a stationary observation");
  if (!(obs.grid() == grid))
    throw NumericError("stationary_objective: observation grid mismatch");
  try {
    const SdeModel model = instantiate(family, theta, grid);
    const GridDensity p = stationary_density(StationarySpec(model, grid));
    return 0.5 * kernels::hellinger_sq_integral(
                     p.values(), obs.densities.front().values(),
                     grid.spacing());
  } catch (const NumericError&) {
    return kInf;
  }
}

double time_objective(const SdeFamily& family, double theta,
                      const Observation& obs, const FpProblem& fp_defaults) {
  if (obs.kind != Observation::Kind::TimeDependent)
    throw NumericError("time_objective: needs a time-dependent observation");
  if (!(obs.grid() == fp_defaults.grid))
    throw NumericError("time_objective: observation grid mismatch");
  try {
    FpProblem prob = fp_defaults;
    prob.model = instantiate(family, theta, prob.grid);
    prob.output_times = obs.times;
    prob.initial.reset();
    const FpSolution sol = solve(prob);
    double worst = 0.0;
    for (std::size_t k = 0; k < sol.times.size(); ++k)
      worst = std::max(worst, kernels::hellinger_sq_integral(
                                  obs.densities[k].values(),
                                  sol.densities[k].values(),
                                  prob.grid.spacing()));
    return worst;
  } catch (const NumericError&) {
    return kInf;
  }
}

namespace {

// Shared scan + golden-section protocol. The objective is assumed locally
// unimodal around the best scan point; a boundary best is returned without
// refinement, flagged.
FitResult scan_and_refine(const std::function<double(double)>& objective,
                          double lo, double hi, const FitOptions& opts) {
  if (!(opts.scan_step > 0.0))
    throw NumericError("fit: scan_step must be positive");

  std::vector<double> thetas;
  const double span = hi - lo;
  const auto count =
      static_cast<std::size_t>(std::floor(span / opts.scan_step + 1e-9));
  for (std::size_t k = 0; k <= count; ++k)
    thetas.push_back(lo + static_cast<double>(k) * opts.scan_step);
  if (thetas.back() < hi - 1e-12 * std::abs(span)) thetas.push_back(hi);

  std::vector<double> values(thetas.size());
  const std::ptrdiff_t m = static_cast<std::ptrdiff_t>(thetas.size());
  if (opts.jobs > 0) {
#pragma omp parallel for schedule(dynamic) num_threads(opts.jobs)
    for (std::ptrdiff_t k = 0; k < m; ++k)
      values[static_cast<std::size_t>(k)] =
          objective(thetas[static_cast<std::size_t>(k)]);
  } else {
#pragma omp parallel for schedule(dynamic)
    for (std::ptrdiff_t k = 0; k < m; ++k)
      values[static_cast<std::size_t>(k)] =
          objective(thetas[static_cast<std::size_t>(k)]);
  }

  FitResult result;
  std::size_t best = 0;
  for (std::size_t k = 0; k < thetas.size(); ++k) {
    result.scan_trace.emplace_back(thetas[k], values[k]);
    if (values[k] < values[best]) best = k;  // first best wins on ties
  }
  if (values[best] == kInf)
    throw NumericError("fit: no admissible parameter in the scan range");

  result.theta_hat = thetas[best];
  result.objective_value = values[best];
  if (best == 0 || best + 1 == thetas.size()) {
    result.boundary_minimum = true;
    return result;
  }

  // Golden-section on the bracketing triple around the best scan point.
  constexpr double invphi = 0.6180339887498949;
  double a = thetas[best - 1], b = thetas[best + 1];
  double x1 = b - invphi * (b - a);
  double x2 = a + invphi * (b - a);
  double f1 = objective(x1);
  double f2 = objective(x2);
  result.refine_trace.emplace_back(x1, f1);
  result.refine_trace.emplace_back(x2, f2);
  while (b - a > opts.bracket_tol) {
    if (f1 <= f2) {
      b = x2;
      x2 = x1;
      f2 = f1;
      x1 = b - invphi * (b - a);
      f1 = objective(x1);
      result.refine_trace.emplace_back(x1, f1);
    } else {
      a = x1;
      x1 = x2;
      f1 = f2;
      x2 = a + invphi * (b - a);
      f2 = objective(x2);
      result.refine_trace.emplace_back(x2, f2);
    }
    ++result.refinement_iterations;
  }
  for (const auto& [theta, value] : result.refine_trace) {
    if (value < result.objective_value) {
      result.objective_value = value;
      result.theta_hat = theta;
    }
  }
  return result;
}

}  // namespace

FitResult fit_stationary(const SdeFamily& family, const Observation& obs,
                         const Grid1D& grid, const FitOptions& opts) {
  return scan_and_refine(
      [&](double theta) {
        return stationary_objective(family, theta, obs, grid);
      },
      family.theta_lo, family.theta_hi, opts);
}

FitResult fit_time(const SdeFamily& family, const Observation& obs,
                   const FpProblem& fp_defaults, const FitOptions& opts) {
  return scan_and_refine(
      [&](double theta) {
        return time_objective(family, theta, obs, fp_defaults);
      },
      family.theta_lo, family.theta_hi, opts);
}

std::vector<double> recover_drift(const Observation& obs,
                                  const ScalarFunctionSpec& diffusion,
                                  const Grid1D& grid) {
  if (obs.kind != Observation::Kind::Stationary)
    throw NumericError("recover_drift: needs a stationary observation");
  if (!(obs.grid() == grid))
    throw NumericError("recover_drift: observation grid mismatch");
  std::span<const double> q = obs.densities.front().values();
  const double h = grid.spacing();
  const std::size_t n = grid.n;

  for (std::size_t i = 1; i + 1 < n; ++i)
    if (!(q[i] > 0.0))
      throw NumericError("recover_drift: observation not positive at x = " +
                         std::to_string(grid.node(i)));

  std::vector<double> u(n);  // sigma^2 q
  for (std::size_t i = 0; i < n; ++i) {
    const double s = diffusion(grid.node(i));
    u[i] = s * s * q[i];
    if (!std::isfinite(u[i]))
      throw NumericError("recover_drift: sigma^2 q non-finite at x = " +
                         std::to_string(grid.node(i)));
  }

  std::vector<double> b(n);
  auto ratio = [&](double du, double qi) {
    return qi > 0.0 ? du / (2.0 * qi) : 0.0;
  };
  b[0] = ratio((-3.0 * u[0] + 4.0 * u[1] - u[2]) / (2.0 * h), q[0]);
  for (std::size_t i = 1; i + 1 < n; ++i)
    b[i] = ratio((u[i + 1] - u[i - 1]) / (2.0 * h), q[i]);
  b[n - 1] =
      ratio((3.0 * u[n - 1] - 4.0 * u[n - 2] + u[n - 3]) / (2.0 * h), q[n - 1]);
  return b;
}

}  // namespace measurefit
