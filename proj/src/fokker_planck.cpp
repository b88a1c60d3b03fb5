#include "measurefit/fokker_planck.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "measurefit/kernels.hpp"

namespace measurefit {

namespace {

// Bernoulli function w / (e^w - 1). No cancellation: expm1 covers small w,
// and the large-|w| limits (0 and -w) fall out of the formula.
double bernoulli(double w) {
  if (w == 0.0) return 1.0;
  const double e = std::expm1(w);
  if (std::isinf(e)) return 0.0;
  return w / e;
}

struct Operator {
  std::vector<double> lower, diag, upper;  // tridiagonal L, row i of dp/dt = Lp
  std::vector<double> delta;               // cell widths (h, halved at ends)
};

// Flux through interface j (between nodes j and j+1):
//   F_j = (D_j/h) [ B(-w_j) p_j − B(w_j) p_{j+1} ],  w_j = A_j h / D_j,
// with D = σ²/2 at the midpoint and A = b − D' (D' from node values of D).
// F vanishes exactly on p_{j+1}/p_j = e^{w_j}, the local steady ratio, which
// is what keeps the discrete steady state positive and exact.
Operator build_operator(const SdeModel& model, const Grid1D& g) {
  const std::size_t n = g.n;
  const double h = g.spacing();

  std::vector<double> d_node(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double s = model.diffusion(g.node(i));
    d_node[i] = 0.5 * s * s;
  }

  // a[j]: coefficient of p_j in F_j; c[j]: coefficient of p_{j+1} (negated).
  std::vector<double> a(n - 1), c(n - 1);
  for (std::size_t j = 0; j + 1 < n; ++j) {
    const double xm = 0.5 * (g.node(j) + g.node(j + 1));
    const double sm = model.diffusion(xm);
    const double dm = 0.5 * sm * sm;
    if (!(dm > 0.0) || !std::isfinite(dm))
      throw NumericError("fokker-planck: sigma^2/2 not positive at x = " +
                         std::to_string(xm));
    const double adv = model.drift(xm) - (d_node[j + 1] - d_node[j]) / h;
    if (!std::isfinite(adv))
      throw NumericError("fokker-planck: drift non-finite at x = " +
                         std::to_string(xm));
    const double w = adv * h / dm;
    a[j] = dm * bernoulli(-w) / h;
    c[j] = dm * bernoulli(w) / h;
  }

  Operator op;
  op.lower.assign(n, 0.0);
  op.diag.assign(n, 0.0);
  op.upper.assign(n, 0.0);
  op.delta.assign(n, h);
  op.delta.front() = op.delta.back() = 0.5 * h;

  // dp_i/dt = (F_{i-1} − F_i) / delta_i, F_{-1} = F_{n-1} = 0 (reflecting).
  for (std::size_t i = 0; i < n; ++i) {
    if (i > 0) {
      op.lower[i] += a[i - 1] / op.delta[i];
      op.diag[i] -= c[i - 1] / op.delta[i];
    }
    if (i + 1 < n) {
      op.diag[i] -= a[i] / op.delta[i];
      op.upper[i] += c[i] / op.delta[i];
    }
  }
  return op;
}

void validate(const FpProblem& prob) {
  if (prob.output_times.empty())
    throw NumericError("fokker-planck: no output times requested");
  double prev = 0.0;
  double min_gap = std::numeric_limits<double>::infinity();
  for (double t : prob.output_times) {
    if (!(t > prev))
      throw NumericError(
          "fokker-planck: output times must be strictly increasing and > 0");
    min_gap = std::min(min_gap, t - prev);
    prev = t;
  }
  if (!(prob.dt > 0.0) || !(prob.dt_late > 0.0))
    throw NumericError("fokker-planck: time steps must be positive");
  if (prob.dt > min_gap || prob.dt_late > min_gap)
    throw NumericError("fokker-planck: dt exceeds the smallest output-time gap");
  if (!prob.initial) {
    prob.grid.nearest_index(prob.x0);  // throws when x0 is off the grid
    if (prob.output_times.front() < 10.0 * prob.dt)
      throw NumericError(
          "fokker-planck: first output time must be at least 10*dt so the "
          "regularized delta can relax");
  } else if (!(prob.initial->grid() == prob.grid)) {
    throw NumericError("fokker-planck: initial density grid mismatch");
  }
}

}  // namespace

FpSolution solve(const FpProblem& prob) {
  validate(prob);
  const Grid1D& g = prob.grid;
  const std::size_t n = g.n;
  const double h = g.spacing();
  const Operator op = build_operator(prob.model, g);

  // Diagonal dominance of I − θ dt L fails only when θ dt max(rowsum L) ≥ 1;
  // refuse the configured schedule rather than run an unstable elimination.
  {
    double rowsum_max = 0.0;
    for (std::size_t i = 0; i < n; ++i)
      rowsum_max =
          std::max(rowsum_max, op.lower[i] + op.diag[i] + op.upper[i]);
    const double theta_dt = std::max(prob.dt, 0.5 * prob.dt_late);
    if (theta_dt * rowsum_max >= 1.0)
      throw NumericError(
          "fokker-planck: dt too large for diagonal dominance; need dt < " +
          std::to_string(1.0 / rowsum_max));
  }

  std::vector<double> p(n, 0.0);
  if (prob.initial) {
    std::span<const double> v = prob.initial->values();
    p.assign(v.begin(), v.end());
  } else {
    const std::size_t i0 = g.nearest_index(prob.x0);
    p[i0] = 1.0 / op.delta[i0];
  }
  const double mass0 = kernels::trapezoid(p, h);

  // Landmarks: output times plus the dt switch point, marched segment by
  // segment with the step fitted to land exactly on each landmark.
  std::vector<double> landmarks = prob.output_times;
  if (prob.t_switch > 0.0 && prob.t_switch < prob.output_times.back() &&
      std::find(landmarks.begin(), landmarks.end(), prob.t_switch) ==
          landmarks.end())
    landmarks.push_back(prob.t_switch);
  std::sort(landmarks.begin(), landmarks.end());

  std::vector<double> ml(n), md(n), mu(n), cprime(n);  // M = I − θ dt L
  std::vector<double> nl(n), nd(n), nu(n), rhs(n);     // N = I + θ dt L
  auto assemble = [&](double theta_dt_m, double theta_dt_n) {
    for (std::size_t i = 0; i < n; ++i) {
      ml[i] = -theta_dt_m * op.lower[i];
      md[i] = 1.0 - theta_dt_m * op.diag[i];
      mu[i] = -theta_dt_m * op.upper[i];
      nl[i] = theta_dt_n * op.lower[i];
      nd[i] = 1.0 + theta_dt_n * op.diag[i];
      nu[i] = theta_dt_n * op.upper[i];
    }
    kernels::serial::tridiag_prepare(ml, md, mu, cprime);
  };

  FpSolution sol;
  sol.min_value = 0.0;
  double t = 0.0;
  double mass_prev = mass0;
  bool first_step = !prob.initial;  // implicit-Euler startup for the delta
  std::size_t next_output = 0;

  for (double target : landmarks) {
    const double dt_base = (target <= prob.t_switch) ? prob.dt : prob.dt_late;
    const auto steps = static_cast<std::size_t>(
        std::ceil((target - t) / dt_base - 1e-12));
    const double dt = (target - t) / static_cast<double>(std::max<std::size_t>(steps, 1));

    assemble(0.5 * dt, 0.5 * dt);
    bool assembled_cn = true;
    for (std::size_t k = 0; k < std::max<std::size_t>(steps, 1); ++k) {
      if (first_step) {
        assemble(dt, 0.0);
        assembled_cn = false;
        rhs = p;
        first_step = false;
      } else {
        if (!assembled_cn) {
          assemble(0.5 * dt, 0.5 * dt);
          assembled_cn = true;
        }
        kernels::tridiag_apply(nl, nd, nu, p, rhs);
      }
      kernels::serial::tridiag_solve(ml, md, cprime, rhs);
      p.swap(rhs);

      const double mass = kernels::trapezoid(p, h);
      if (!std::isfinite(mass))
        throw NumericError("fokker-planck: non-finite values at t = " +
                           std::to_string(t + dt * static_cast<double>(k + 1)));
      const double drift = std::abs(mass - mass_prev) / mass0;
      sol.max_step_mass_drift = std::max(sol.max_step_mass_drift, drift);
      if (drift > 1e-8)
        throw NumericError("fokker-planck: mass drift " +
                           std::to_string(drift) + " in one step");
      mass_prev = mass;
    }
    t = target;

    if (next_output < prob.output_times.size() &&
        prob.output_times[next_output] == target) {
      std::vector<double> out(p);
      double vmin = 0.0;
      for (double& v : out) {
        vmin = std::min(vmin, v);
        v = std::max(v, 0.0);
      }
      sol.min_value = std::min(sol.min_value, vmin);
      if (vmin < -1e-12)
        throw NumericError("fokker-planck: negative density " +
                           std::to_string(vmin) + " at t = " +
                           std::to_string(target) + " (scheme failure)");
      sol.times.push_back(target);
      sol.densities.push_back(normalize(g, std::move(out)));
      ++next_output;
    }
  }

  warn_if_heavy_tail(sol.densities.back(), "final Fokker-Planck density");
  return sol;
}

}  // namespace measurefit
