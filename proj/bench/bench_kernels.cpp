// Timing comparison of the serial reference kernels against the OpenMP
// kernels, plus one end-to-end Fokker-Planck solve. Not a correctness test;
// the test suite checks serial/parallel agreement separately.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <random>
#include <vector>

#include <omp.h>

#include "measurefit/fokker_planck.hpp"
#include "measurefit/kernels.hpp"

using measurefit::kernels::hellinger_sq_integral;
using measurefit::kernels::tridiag_apply;
using measurefit::kernels::trapezoid;

namespace {

double now_ms() {
  using clock = std::chrono::steady_clock;
  static const auto t0 = clock::now();
  return std::chrono::duration<double, std::milli>(clock::now() - t0).count();
}

double g_checksum = 0.0;  // keeps the timed bodies observable

template <class F>
double time_ms(int reps, F&& body) {
  double sink = 0.0;
  const double t0 = now_ms();
  for (int r = 0; r < reps; ++r) sink += body();
  g_checksum += sink;
  return (now_ms() - t0) / reps;
}

void bench_reductions(std::size_t n, int reps) {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> uni(0.0, 1.0);
  std::vector<double> p(n), q(n), out(n);
  for (std::size_t i = 0; i < n; ++i) {
    p[i] = uni(rng);
    q[i] = uni(rng);
  }
  const double h = 1e-3;

  const double ts = time_ms(reps, [&] {
    return measurefit::kernels::serial::trapezoid(p, h);
  });
  const double tp = time_ms(reps, [&] { return trapezoid(p, h); });
  std::printf("trapezoid      n=%8zu  serial %8.3f ms   omp %8.3f ms   x%.2f\n",
              n, ts, tp, ts / tp);

  const double hs = time_ms(reps, [&] {
    return measurefit::kernels::serial::hellinger_sq_integral(p, q, h);
  });
  const double hp = time_ms(reps, [&] { return hellinger_sq_integral(p, q, h); });
  std::printf("hellinger_sq   n=%8zu  serial %8.3f ms   omp %8.3f ms   x%.2f\n",
              n, hs, hp, hs / hp);

  std::vector<double> lo(n, -0.3), di(n, 1.6), up(n, -0.3);
  const double as = time_ms(reps, [&] {
    measurefit::kernels::serial::tridiag_apply(lo, di, up, p, out);
    return out[n / 2];
  });
  const double ap = time_ms(reps, [&] {
    tridiag_apply(lo, di, up, p, out);
    return out[n / 2];
  });
  std::printf("tridiag_apply  n=%8zu  serial %8.3f ms   omp %8.3f ms   x%.2f\n",
              n, as, ap, as / ap);
}

double bench_fp_solve() {
  using namespace measurefit;
  const Grid1D grid(-40.0, 40.0, 4001);
  SdeModel model{ScalarFunctionSpec([](double x) { return -0.7 * std::sin(x); },
                                    "-0.7*sin(x)"),
                 ScalarFunctionSpec([](double) { return std::sqrt(2.0); },
                                    "sqrt(2)")};
  FpProblem prob{.model = model,
                 .grid = grid,
                 .x0 = 0.0,
                 .output_times = {0.5, 1.0, 2.0, 5.0},
                 .dt = 1e-3,
                 .dt_late = 1e-2,
                 .t_switch = 1.0,
                 .initial = std::nullopt};
  const double t0 = now_ms();
  const FpSolution sol = solve(prob);
  const double t1 = now_ms();
  std::printf("fokker-planck  n=4001 t=5   %8.1f ms  (mass drift %.2e)\n",
              t1 - t0, sol.max_step_mass_drift);
  return sol.densities.back().values()[2000];
}

}  // namespace

int main() {
  std::printf("threads: %d\n", omp_get_max_threads());
  for (std::size_t n : {4001u, 100000u, 4000000u})
    bench_reductions(n, n > 1000000 ? 10 : 200);
  g_checksum += bench_fp_solve();
  std::printf("(checksum %.6g)\n", g_checksum);
  return 0;
}
