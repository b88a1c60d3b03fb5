#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "measurefit/estimator.hpp"
#include "measurefit/kernels.hpp"
#include "measurefit/stationary.hpp"

using namespace measurefit;
using measurefit::expr::Expr;

namespace {

constexpr double kInvSqrtPi = 0.5641895835477563;

SdeFamily langevin_family(double lo = 0.1, double hi = 5.0) {
  return SdeFamily(SdeModel{ScalarFunctionSpec(Expr::parse("-b*x")),
                            ScalarFunctionSpec(Expr::parse("1"))},
                   "b", lo, hi);
}

GridDensity sample_density(const Grid1D& g, const std::function<double(double)>& f) {
  std::vector<double> v(g.n);
  for (std::size_t i = 0; i < g.n; ++i) v[i] = f(g.node(i));
  return normalize(g, std::move(v));
}

Observation gaussian_obs(const Grid1D& g) {
  return Observation::stationary(
      sample_density(g, [](double x) { return std::exp(-x * x); }),
      "exp(-x^2)/sqrt(pi)");
}

// closed form for the Langevin stationary objective (Bhattacharyya integral
// of two zero-mean Gaussians): F(b) = 1 - sqrt(2) b^{1/4} (1+b)^{-1/2}
double langevin_objective_exact(double b) {
  return 1.0 - std::sqrt(2.0) * std::pow(b, 0.25) / std::sqrt(1.0 + b);
}

FpProblem fp_defaults(const SdeModel& model, const Grid1D& g, double dt = 1e-3,
                      double dt_late = 1e-2) {
  return FpProblem{.model = model,
                   .grid = g,
                   .x0 = 0.0,
                   .output_times = {},
                   .dt = dt,
                   .dt_late = dt_late,
                   .t_switch = 1.0,
                   .initial = std::nullopt};
}

std::vector<double> half_steps(double lo, double hi) {
  std::vector<double> t;
  for (double v = lo; v <= hi + 1e-12; v += 0.5) t.push_back(v);
  return t;
}

}  // namespace

TEST_CASE("stationary objective matches the closed form") {
  const Grid1D g(-8.0, 8.0, 2001);
  const SdeFamily family = langevin_family();
  const Observation obs = gaussian_obs(g);

  CHECK(stationary_objective(family, 1.0, obs, g) <= 1e-8);
  CHECK(stationary_objective(family, 4.0, obs, g) ==
        doctest::Approx(0.10557280900008412).epsilon(1e-4 / 0.105));
  for (double b : {0.25, 0.5, 1.0, 2.0, 4.0})
    CHECK(std::abs(stationary_objective(family, b, obs, g) -
                   langevin_objective_exact(b)) <= 1e-4);
}

TEST_CASE("inadmissible parameters yield the infinity sentinel") {
  const Grid1D g(-20.0, 20.0, 1001);
  // drift +b*x: non-integrable for theta > 0, flat (admissible) at theta = 0
  SdeFamily family(SdeModel{ScalarFunctionSpec(Expr::parse("b*x")),
                            ScalarFunctionSpec(Expr::parse("1"))},
                   "b", 0.0, 1.0);
  const Observation obs = gaussian_obs(g);
  CHECK(std::isinf(stationary_objective(family, 0.5, obs, g)));
  CHECK(std::isfinite(stationary_objective(family, 0.0, obs, g)));
}

TEST_CASE("fit_stationary recovers the Langevin parameter") {
  const Grid1D g(-8.0, 8.0, 2001);
  const FitOptions opts{.scan_step = 0.1, .bracket_tol = 1e-6, .jobs = 0};
  const FitResult fit =
      fit_stationary(langevin_family(), gaussian_obs(g), g, opts);
  CHECK(fit.theta_hat == doctest::Approx(1.0).epsilon(1e-3));
  CHECK(fit.objective_value <= 1e-8);
  CHECK(!fit.boundary_minimum);
  CHECK(fit.scan_trace.size() == 50);

  // objective_value is the minimum over everything evaluated
  double best = fit.scan_trace.front().second;
  for (const auto& [t, v] : fit.scan_trace) best = std::min(best, v);
  for (const auto& [t, v] : fit.refine_trace) best = std::min(best, v);
  CHECK(fit.objective_value == best);
}

TEST_CASE("round-trip fits recover the generating parameter") {
  const Grid1D g(-8.0, 8.0, 2001);
  const SdeFamily family = langevin_family();
  const FitOptions opts{.scan_step = 0.1, .bracket_tol = 1e-6, .jobs = 0};
  for (double theta0 : {0.5, 1.0, 2.0, 2.5, 4.0}) {
    const SdeModel truth = instantiate(family, theta0, g);
    const Observation obs = Observation::stationary(
        stationary_density(StationarySpec(truth, g)), "round-trip");
    const FitResult fit = fit_stationary(family, obs, g, opts);
    CHECK(fit.theta_hat == doctest::Approx(theta0).epsilon(1e-3 / theta0));
  }
}

TEST_CASE("golden-section refinement is monotone and contracts") {
  const Grid1D g(-8.0, 8.0, 2001);
  const FitOptions opts{.scan_step = 0.1, .bracket_tol = 1e-6, .jobs = 0};
  const FitResult fit =
      fit_stationary(langevin_family(), gaussian_obs(g), g, opts);

  double best = std::numeric_limits<double>::infinity();
  for (const auto& [t, v] : fit.refine_trace) {
    const double prev = best;
    best = std::min(best, v);
    CHECK(best <= prev);
  }
  // bracket width 2*step shrinks by the golden ratio per iteration
  const double width0 = 2 * opts.scan_step;
  const double invphi = 0.6180339887498949;
  const auto expected = static_cast<std::size_t>(
      std::ceil(std::log(opts.bracket_tol / width0) / std::log(invphi)));
  CHECK(fit.refinement_iterations >= expected - 1);
  CHECK(fit.refinement_iterations <= expected + 1);
}

TEST_CASE("tied minima resolve to the first scan point") {
  // drift -(b*b)*x depends on b only through b^2: symmetric objective
  const Grid1D g(-8.0, 8.0, 1001);
  SdeFamily family(SdeModel{ScalarFunctionSpec(Expr::parse("-(b*b)*x")),
                            ScalarFunctionSpec(Expr::parse("1"))},
                   "b", -2.0, 2.0);
  const Observation obs = gaussian_obs(g);  // matches b^2 = 1
  const FitOptions opts{.scan_step = 0.5, .bracket_tol = 1e-6, .jobs = 0};
  const FitResult fit = fit_stationary(family, obs, g, opts);

  double at_minus = 0, at_plus = 0;
  for (const auto& [t, v] : fit.scan_trace) {
    if (t == -1.0) at_minus = v;
    if (t == 1.0) at_plus = v;
  }
  CHECK(at_minus == at_plus);  // the tie is visible in the trace
  CHECK(fit.theta_hat == doctest::Approx(-1.0).epsilon(1e-3));
}

TEST_CASE("all-infinite scans report no admissible parameter") {
  const Grid1D g(-20.0, 20.0, 501);
  SdeFamily family(SdeModel{ScalarFunctionSpec(Expr::parse("b*x")),
                            ScalarFunctionSpec(Expr::parse("1"))},
                   "b", 0.5, 1.0);  // non-integrable everywhere in range
  const Observation obs = gaussian_obs(g);
  const FitOptions opts{.scan_step = 0.25, .bracket_tol = 1e-6, .jobs = 0};
  CHECK_THROWS_AS(fit_stationary(family, obs, g, opts), NumericError);
}

TEST_CASE("time objective: the matching model scores near zero") {
  const Grid1D g(-40.0, 40.0, 2001);
  SdeFamily family(SdeModel{ScalarFunctionSpec(Expr::parse("-b*sin(x)")),
                            ScalarFunctionSpec(Expr::parse("sqrt(2)"))},
                   "b", 0.0, 2.0);
  const std::vector<double> times = half_steps(0.5, 5.0);
  std::vector<GridDensity> qs;
  for (double t : times)
    qs.push_back(sample_density(g, [t](double x) {
      return std::exp(-x * x / (4.0 * t)) / (2.0 * std::sqrt(M_PI * t));
    }));
  const Observation obs = Observation::time_series(times, std::move(qs), "q1");

  const FpProblem defaults = fp_defaults(family.prototype, g);
  const double at_zero = time_objective(family, 0.0, obs, defaults);
  CHECK(at_zero <= 1e-3);

  for (double theta : {0.0, 0.7, 2.0}) {
    const double v = time_objective(family, theta, obs, defaults);
    CHECK(v >= 0.0);
    CHECK(v <= 2.0);
  }

  // max over a subset of times cannot exceed the max over the full set
  std::vector<GridDensity> q2;
  q2.push_back(obs.densities[1]);
  q2.push_back(obs.densities[3]);
  const Observation sub =
      Observation::time_series({times[1], times[3]}, std::move(q2), "subset");
  CHECK(time_objective(family, 0.7, sub, defaults) <=
        time_objective(family, 0.7, obs, defaults) + 1e-15);
}

TEST_CASE("singleton observation reduces to one Hellinger evaluation") {
  const Grid1D g(-40.0, 40.0, 1001);
  SdeFamily family(SdeModel{ScalarFunctionSpec(Expr::parse("-b*sin(x)")),
                            ScalarFunctionSpec(Expr::parse("sqrt(2)"))},
                   "b", 0.0, 2.0);
  const double tstar = 2.0;
  GridDensity q = sample_density(g, [tstar](double x) {
    return std::sqrt(tstar) / (M_PI * (tstar + x * x));
  });
  std::vector<GridDensity> qs{q};
  const Observation obs = Observation::time_series({tstar}, std::move(qs), "q2");

  const FpProblem defaults = fp_defaults(family.prototype, g, 1e-2, 1e-2);
  const double via_objective = time_objective(family, 0.5, obs, defaults);

  FpProblem direct = defaults;
  direct.model = instantiate(family, 0.5, g);
  direct.output_times = {tstar};
  const FpSolution sol = solve(direct);
  const double expected = kernels::hellinger_sq_integral(
      q.values(), sol.densities[0].values(), g.spacing());
  CHECK(via_objective == doctest::Approx(expected).epsilon(1e-12));
}

TEST_CASE("fit_time finds the boundary minimum for the heat-kernel series") {
  const Grid1D g(-40.0, 40.0, 1001);
  SdeFamily family(SdeModel{ScalarFunctionSpec(Expr::parse("-b*sin(x)")),
                            ScalarFunctionSpec(Expr::parse("sqrt(2)"))},
                   "b", 0.0, 2.0);
  const std::vector<double> times = half_steps(0.5, 5.0);
  std::vector<GridDensity> qs;
  for (double t : times)
    qs.push_back(sample_density(g, [t](double x) {
      return std::exp(-x * x / (4.0 * t)) / (2.0 * std::sqrt(M_PI * t));
    }));
  const Observation obs = Observation::time_series(times, std::move(qs), "q1");
  const FitOptions opts{.scan_step = 0.25, .bracket_tol = 1e-4, .jobs = 0};
  const FitResult fit =
      fit_time(family, obs, fp_defaults(family.prototype, g, 1e-2, 1e-2), opts);
  CHECK(fit.theta_hat == 0.0);
  CHECK(fit.boundary_minimum);
  CHECK(fit.refinement_iterations == 0);
}

TEST_CASE("argmin is invariant under positive objective scaling") {
  const Grid1D g(-8.0, 8.0, 1001);
  const SdeFamily family = langevin_family();
  const Observation obs = gaussian_obs(g);
  std::vector<double> values;
  for (double b = 0.1; b <= 5.0 + 1e-12; b += 0.1)
    values.push_back(stationary_objective(family, b, obs, g));
  const auto argmin = [](const std::vector<double>& v) {
    std::size_t best = 0;
    for (std::size_t i = 1; i < v.size(); ++i)
      if (v[i] < v[best]) best = i;
    return best;
  };
  const std::size_t base = argmin(values);
  for (double c : {0.5, 2.0, 3.7, 1e6}) {
    std::vector<double> scaled = values;
    for (double& v : scaled) v *= c;
    CHECK(argmin(scaled) == base);
  }
}

TEST_CASE("observation validation") {
  const Grid1D g(-8.0, 8.0, 501);
  GridDensity q = sample_density(g, [](double x) { return std::exp(-x * x); });

  // unnormalized densities are rejected
  CHECK_THROWS_AS(Observation::stationary(
                      GridDensity(g, std::vector<double>(g.n, 0.5)), "flat"),
                  NumericError);
  // times below the floor are rejected
  std::vector<GridDensity> qs{q, q};
  CHECK_THROWS_AS(
      Observation::time_series({0.05, 1.0}, std::move(qs), "early"),
      NumericError);
  std::vector<GridDensity> qs2{q, q};
  CHECK_THROWS_AS(
      Observation::time_series({1.0, 1.0}, std::move(qs2), "dup"),
      NumericError);
}

TEST_CASE("recover_drift examples") {
  // Cauchy observation, sigma = 1: b(x) = -x/(1+x^2)
  {
    const Grid1D g(-20.0, 20.0, 4001);
    const Observation obs = Observation::stationary(
        sample_density(g, [](double x) { return 1.0 / (1.0 + x * x); }),
        "cauchy");
    const ScalarFunctionSpec sigma([](double) { return 1.0; }, "1");
    const std::vector<double> b = recover_drift(obs, sigma, g);
    double max_err = 0.0;
    for (std::size_t i = 1; i + 1 < g.n; ++i) {
      const double x = g.node(i);
      max_err = std::max(max_err, std::abs(b[i] + x / (1.0 + x * x)));
    }
    CHECK(max_err <= 1e-3);

    // plug-back: the recovered drift regenerates the observation
    SdeModel rec{ScalarFunctionSpec::from_samples(g, b, "recovered"),
                 sigma};
    const GridDensity p = stationary_density(StationarySpec(rec, g));
    CHECK(hellinger(p, obs.densities.front()) <= 1e-3);
  }

  // Gaussian observation: b(x) = -x
  {
    const Grid1D g(-6.0, 6.0, 8001);
    const Observation obs = Observation::stationary(
        sample_density(g, [](double x) { return std::exp(-x * x); }),
        "gauss");
    const std::vector<double> b =
        recover_drift(obs, ScalarFunctionSpec([](double) { return 1.0; }, "1"), g);
    double max_err = 0.0;
    for (std::size_t i = 1; i + 1 < g.n; ++i)
      max_err = std::max(max_err, std::abs(b[i] + g.node(i)));
    CHECK(max_err <= 1e-3);
  }

  // constant observation: b = 0 on the interior
  {
    const Grid1D g(0.0, 1.0, 101);
    const Observation obs = Observation::stationary(
        normalize(g, std::vector<double>(g.n, 1.0)), "uniform");
    const std::vector<double> b =
        recover_drift(obs, ScalarFunctionSpec([](double) { return 1.0; }, "1"), g);
    for (std::size_t i = 1; i + 1 < g.n; ++i) CHECK(b[i] == 0.0);
  }

  // a zero on the interior is rejected
  {
    const Grid1D g(0.0, 1.0, 101);
    std::vector<double> v(g.n, 1.0);
    v[50] = 0.0;
    GridDensity q = normalize(g, std::move(v));
    const Observation obs = Observation::stationary(std::move(q), "holey");
    CHECK_THROWS_AS(
        recover_drift(obs, ScalarFunctionSpec([](double) { return 1.0; }, "1"), g),
        NumericError);
  }
}

TEST_CASE("drift recovery round-trips smooth test drifts") {
  // tight spacing: the central-difference error grows like h^2 x^3 in the
  // Gaussian tails
  const Grid1D g(-5.0, 5.0, 4001);
  const ScalarFunctionSpec sigma([](double) { return 1.0; }, "1");
  const std::vector<std::function<double(double)>> drifts = {
      [](double x) { return -x; },
      [](double x) { return -x - 0.3 * std::sin(x); },
      [](double x) { return -std::tanh(x) - 0.5 * x; }};
  for (const auto& b0 : drifts) {
    SdeModel m{ScalarFunctionSpec(b0, "test-drift"), sigma};
    const GridDensity p = stationary_density(StationarySpec(m, g));
    const Observation obs = Observation::stationary(p, "generated");
    const std::vector<double> b = recover_drift(obs, sigma, g);
    double max_err = 0.0;
    for (std::size_t i = 1; i + 1 < g.n; ++i)
      max_err = std::max(max_err, std::abs(b[i] - b0(g.node(i))));
    CHECK(max_err <= 1e-3);
  }
}
