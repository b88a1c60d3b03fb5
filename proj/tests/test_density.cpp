#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "measurefit/density.hpp"
#include "measurefit/kernels.hpp"

using namespace measurefit;

namespace {

std::vector<double> sample(const Grid1D& g, double (*f)(double)) {
  std::vector<double> v(g.n);
  for (std::size_t i = 0; i < g.n; ++i) v[i] = f(g.node(i));
  return v;
}

GridDensity random_density(const Grid1D& g, std::mt19937& rng) {
  // mixture of two Gaussians with random centers/widths, plus a floor
  std::uniform_real_distribution<double> mu(g.lo * 0.5, g.hi * 0.5);
  std::uniform_real_distribution<double> sig(0.3, 2.0);
  std::uniform_real_distribution<double> wgt(0.1, 0.9);
  const double m1 = mu(rng), m2 = mu(rng), s1 = sig(rng), s2 = sig(rng);
  const double w = wgt(rng);
  std::vector<double> v(g.n);
  for (std::size_t i = 0; i < g.n; ++i) {
    const double x = g.node(i);
    v[i] = w * std::exp(-0.5 * (x - m1) * (x - m1) / (s1 * s1)) +
           (1.0 - w) * std::exp(-0.5 * (x - m2) * (x - m2) / (s2 * s2)) + 1e-6;
  }
  return normalize(g, std::move(v));
}

}  // namespace

TEST_CASE("trapezoid rule") {
  const Grid1D g(0.0, 1.0, 11);
  CHECK(trapezoid(std::vector<double>(11, 1.0), g) == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(trapezoid(sample(g, [](double x) { return x; }), g) ==
        doctest::Approx(0.5).epsilon(1e-15));

  const Grid1D fine(0.0, 1.0, 1001);
  CHECK(trapezoid(sample(fine, [](double x) { return x * x; }), fine) ==
        doctest::Approx(1.0 / 3.0).epsilon(1e-6));

  CHECK_THROWS_AS(trapezoid(std::vector<double>(5, 1.0), g), NumericError);
}

TEST_CASE("normalize") {
  const Grid1D g(0.0, 1.0, 11);
  GridDensity d = normalize(g, std::vector<double>(11, 2.0));
  for (double v : d.values()) CHECK(v == doctest::Approx(1.0).epsilon(1e-14));

  const Grid1D wide(-8.0, 8.0, 2001);
  GridDensity gauss =
      normalize(wide, sample(wide, [](double x) { return std::exp(-x * x); }));
  const double peak = gauss.values()[1000];
  CHECK(peak == doctest::Approx(0.5641895835477563).epsilon(1e-6));
  CHECK(gauss.mass() == doctest::Approx(1.0).epsilon(1e-12));

  CHECK_THROWS_AS(normalize(g, std::vector<double>(11, 0.0)), NumericError);

  // idempotence
  GridDensity twice = normalize(gauss);
  for (std::size_t i = 0; i < wide.n; ++i)
    CHECK(twice.values()[i] ==
          doctest::Approx(gauss.values()[i]).epsilon(1e-12));
}

TEST_CASE("hellinger examples") {
  const Grid1D g(-8.0, 8.0, 2001);
  GridDensity p =
      normalize(g, sample(g, [](double x) { return std::exp(-x * x); }));
  CHECK(hellinger(p, p) == 0.0);

  // disjoint supports: distance is exactly 1
  std::vector<double> left(g.n, 0.0), right(g.n, 0.0);
  for (std::size_t i = 0; i < g.n / 4; ++i) left[i] = 1.0;
  for (std::size_t i = 3 * g.n / 4; i < g.n; ++i) right[i] = 1.0;
  CHECK(hellinger(normalize(g, left), normalize(g, right)) ==
        doctest::Approx(1.0).epsilon(1e-12));

  // zero-mean Gaussian pair with variances 1/2 and 1/8:
  // H = sqrt(1 - BC), BC = sqrt(2 s1 s2/(s1^2+s2^2)) = sqrt(4/5)
  GridDensity q = normalize(
      g, sample(g, [](double x) { return std::exp(-4.0 * x * x); }));
  CHECK(hellinger(p, q) ==
        doctest::Approx(0.32491969623290632).epsilon(1e-4));

  const Grid1D other(-8.0, 8.0, 2002);
  GridDensity r = normalize(
      other, sample(other, [](double x) { return std::exp(-x * x); }));
  CHECK_THROWS_AS(hellinger(p, r), NumericError);
}

TEST_CASE("hellinger metric axioms on random densities") {
  const Grid1D g(-10.0, 10.0, 801);
  std::mt19937 rng(4242);
  for (int k = 0; k < 100; ++k) {
    GridDensity p = random_density(g, rng);
    GridDensity q = random_density(g, rng);
    GridDensity r = random_density(g, rng);
    const double pq = hellinger(p, q);
    const double qp = hellinger(q, p);
    CHECK(pq == qp);
    CHECK(hellinger(p, p) == 0.0);
    CHECK(pq >= 0.0);
    CHECK(pq <= 1.0);
    CHECK(pq <= hellinger(p, r) + hellinger(r, q) + 1e-10);
  }
}

TEST_CASE("resample") {
  const Grid1D g(0.0, 1.0, 11);
  GridDensity lin = normalize(g, sample(g, [](double x) { return x + 0.1; }));
  GridDensity same = resample(lin, g);
  for (std::size_t i = 0; i < g.n; ++i)
    CHECK(same.values()[i] == doctest::Approx(lin.values()[i]).epsilon(1e-14));

  // linear density interpolates exactly onto a refined grid
  const Grid1D fine(0.0, 1.0, 101);
  GridDensity up = resample(lin, fine);
  GridDensity direct =
      normalize(fine, sample(fine, [](double x) { return x + 0.1; }));
  for (std::size_t i = 0; i < fine.n; ++i)
    CHECK(up.values()[i] ==
          doctest::Approx(direct.values()[i]).epsilon(1e-12));

  // Gaussian refined 501 -> 2001: close to the directly sampled density
  const Grid1D coarse(-8.0, 8.0, 501);
  const Grid1D dense(-8.0, 8.0, 2001);
  GridDensity gc = normalize(
      coarse, sample(coarse, [](double x) { return std::exp(-x * x); }));
  GridDensity gd = normalize(
      dense, sample(dense, [](double x) { return std::exp(-x * x); }));
  CHECK(hellinger(gd, resample(gc, dense)) <= 1e-3);

  const Grid1D outside(-9.0, 8.0, 101);
  CHECK_THROWS_AS(resample(gc, outside), NumericError);
}

TEST_CASE("tail mass guard") {
  const Grid1D g(-40.0, 40.0, 4001);
  GridDensity gauss =
      normalize(g, sample(g, [](double x) { return std::exp(-x * x); }));
  CHECK(tail_mass_fraction(gauss) <= 1e-10);

  GridDensity cauchy = normalize(
      g, sample(g, [](double x) { return 1.0 / (1.0 + x * x); }));
  CHECK(tail_mass_fraction(cauchy) > 1e-4);
  CHECK(tail_mass_fraction(cauchy) < 1e-2);
}

TEST_CASE("parallel kernels agree with the serial reference") {
  std::mt19937 rng(11);
  std::uniform_real_distribution<double> uni(0.0, 3.0);
  for (std::size_t n : {7u, 1024u, 4001u, 100001u}) {
    std::vector<double> p(n), q(n), lo(n), di(n), up(n), o1(n), o2(n);
    for (std::size_t i = 0; i < n; ++i) {
      p[i] = uni(rng);
      q[i] = uni(rng);
      lo[i] = uni(rng) - 1.5;
      di[i] = uni(rng) + 1.0;
      up[i] = uni(rng) - 1.5;
    }
    const double h = 0.01;
    CHECK(kernels::trapezoid(p, h) ==
          doctest::Approx(kernels::serial::trapezoid(p, h)).epsilon(1e-13));
    CHECK(kernels::hellinger_sq_integral(p, q, h) ==
          doctest::Approx(kernels::serial::hellinger_sq_integral(p, q, h))
              .epsilon(1e-13));
    CHECK(kernels::l1_distance(p, q, h) ==
          doctest::Approx(kernels::serial::l1_distance(p, q, h))
              .epsilon(1e-13));
    kernels::tridiag_apply(lo, di, up, p, o1);
    kernels::serial::tridiag_apply(lo, di, up, p, o2);
    for (std::size_t i = 0; i < n; ++i) CHECK(o1[i] == o2[i]);

    // determinism: repeated parallel calls are bit-identical
    CHECK(kernels::trapezoid(p, h) == kernels::trapezoid(p, h));
    CHECK(kernels::hellinger_sq_integral(p, q, h) ==
          kernels::hellinger_sq_integral(p, q, h));
  }
}

TEST_CASE("thomas solver against dense reference") {
  // small M-matrix system solved two ways
  const std::size_t n = 6;
  std::vector<double> lo{0, -0.2, -0.3, -0.1, -0.4, -0.2};
  std::vector<double> di{1.5, 1.4, 1.6, 1.3, 1.7, 1.2};
  std::vector<double> up{-0.3, -0.1, -0.2, -0.5, -0.1, 0};
  std::vector<double> x{1, 2, 3, 4, 5, 6}, rhs(n), cprime(n);
  kernels::serial::tridiag_apply(lo, di, up, x, rhs);
  kernels::serial::tridiag_prepare(lo, di, up, cprime);
  kernels::serial::tridiag_solve(lo, di, cprime, rhs);
  for (std::size_t i = 0; i < n; ++i)
    CHECK(rhs[i] == doctest::Approx(x[i]).epsilon(1e-12));
}
