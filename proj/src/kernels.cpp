#include "measurefit/kernels.hpp"

#include <cmath>
#include <stdexcept>
#include <vector>

namespace measurefit::kernels {

namespace {

// Work below this size runs on the calling thread; the per-region OpenMP
// overhead outweighs two cores' worth of arithmetic there.
constexpr std::size_t kParallelCutoff = 32768;

// Blocked summation shared by the serial fallback and the OpenMP path:
// partial sums over fixed blocks, combined in index order. The block
// structure (not the thread count) determines the rounding, so results are
// reproducible across --jobs settings and across the cutoff.
template <class Term>
double blocked_sum(std::size_t n, Term term) {
  if (n == 0) return 0.0;
  const std::size_t nblocks = (n + kBlock - 1) / kBlock;
  if (nblocks == 1) {
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i) s += term(i);
    return s;
  }
  std::vector<double> partial(nblocks);
#pragma omp parallel for schedule(static) if (n >= kParallelCutoff)
  for (std::ptrdiff_t b = 0; b < static_cast<std::ptrdiff_t>(nblocks); ++b) {
    const std::size_t lo = static_cast<std::size_t>(b) * kBlock;
    const std::size_t hi = std::min(lo + kBlock, n);
    double s = 0.0;
    for (std::size_t i = lo; i < hi; ++i) s += term(i);
    partial[static_cast<std::size_t>(b)] = s;
  }
  double s = 0.0;
  for (double p : partial) s += p;
  return s;
}

inline double sqrt_diff_sq(double p, double q) {
  const double d = std::sqrt(p) - std::sqrt(q);
  return d * d;
}

}  // namespace

namespace serial {

double sum(std::span<const double> v) {
  double s = 0.0;
  for (double x : v) s += x;
  return s;
}

double trapezoid(std::span<const double> v, double h) {
  if (v.size() < 2) return 0.0;
  double s = 0.5 * (v.front() + v.back());
  for (std::size_t i = 1; i + 1 < v.size(); ++i) s += v[i];
  return s * h;
}

double hellinger_sq_integral(std::span<const double> p,
                             std::span<const double> q, double h) {
  const std::size_t n = p.size();
  if (n < 2) return 0.0;
  double s = 0.5 * (sqrt_diff_sq(p[0], q[0]) + sqrt_diff_sq(p[n - 1], q[n - 1]));
  for (std::size_t i = 1; i + 1 < n; ++i) s += sqrt_diff_sq(p[i], q[i]);
  return s * h;
}

double l1_distance(std::span<const double> a, std::span<const double> b,
                   double h) {
  const std::size_t n = a.size();
  if (n < 2) return 0.0;
  double s = 0.5 * (std::abs(a[0] - b[0]) + std::abs(a[n - 1] - b[n - 1]));
  for (std::size_t i = 1; i + 1 < n; ++i) s += std::abs(a[i] - b[i]);
  return s * h;
}

void scale(std::span<double> v, double s) {
  for (double& x : v) x *= s;
}

void tridiag_apply(std::span<const double> lower, std::span<const double> diag,
                   std::span<const double> upper, std::span<const double> v,
                   std::span<double> out) {
  const std::size_t n = v.size();
  for (std::size_t i = 0; i < n; ++i) {
    double s = diag[i] * v[i];
    if (i > 0) s += lower[i] * v[i - 1];
    if (i + 1 < n) s += upper[i] * v[i + 1];
    out[i] = s;
  }
}

void tridiag_prepare(std::span<const double> lower,
                     std::span<const double> diag,
                     std::span<const double> upper, std::span<double> cprime) {
  const std::size_t n = diag.size();
  double piv = diag[0];
  if (piv == 0.0 || !std::isfinite(piv))
    throw std::runtime_error("tridiagonal solve: zero pivot");
  cprime[0] = upper[0] / piv;
  for (std::size_t i = 1; i < n; ++i) {
    piv = diag[i] - lower[i] * cprime[i - 1];
    if (piv == 0.0 || !std::isfinite(piv))
      throw std::runtime_error("tridiagonal solve: zero pivot");
    cprime[i] = (i + 1 < n) ? upper[i] / piv : 0.0;
  }
}

void tridiag_solve(std::span<const double> lower, std::span<const double> diag,
                   std::span<const double> cprime, std::span<double> rhs) {
  const std::size_t n = diag.size();
  rhs[0] /= diag[0];
  for (std::size_t i = 1; i < n; ++i) {
    const double piv = diag[i] - lower[i] * cprime[i - 1];
    rhs[i] = (rhs[i] - lower[i] * rhs[i - 1]) / piv;
  }
  for (std::size_t i = n - 1; i-- > 0;) rhs[i] -= cprime[i] * rhs[i + 1];
}

}  // namespace serial

double sum(std::span<const double> v) {
  return blocked_sum(v.size(), [&](std::size_t i) { return v[i]; });
}

double trapezoid(std::span<const double> v, double h) {
  if (v.size() < 2) return 0.0;
  const double full = blocked_sum(v.size(), [&](std::size_t i) { return v[i]; });
  return (full - 0.5 * (v.front() + v.back())) * h;
}

double hellinger_sq_integral(std::span<const double> p,
                             std::span<const double> q, double h) {
  const std::size_t n = p.size();
  if (n < 2) return 0.0;
  const double full =
      blocked_sum(n, [&](std::size_t i) { return sqrt_diff_sq(p[i], q[i]); });
  return (full - 0.5 * (sqrt_diff_sq(p[0], q[0]) +
                        sqrt_diff_sq(p[n - 1], q[n - 1]))) *
         h;
}

double l1_distance(std::span<const double> a, std::span<const double> b,
                   double h) {
  const std::size_t n = a.size();
  if (n < 2) return 0.0;
  const double full =
      blocked_sum(n, [&](std::size_t i) { return std::abs(a[i] - b[i]); });
  return (full - 0.5 * (std::abs(a[0] - b[0]) +
                        std::abs(a[n - 1] - b[n - 1]))) *
         h;
}

void scale(std::span<double> v, double s) {
  const std::ptrdiff_t n = static_cast<std::ptrdiff_t>(v.size());
#pragma omp parallel for schedule(static) if (v.size() >= kParallelCutoff)
  for (std::ptrdiff_t i = 0; i < n; ++i) v[static_cast<std::size_t>(i)] *= s;
}

void tridiag_apply(std::span<const double> lower, std::span<const double> diag,
                   std::span<const double> upper, std::span<const double> v,
                   std::span<double> out) {
  const std::ptrdiff_t n = static_cast<std::ptrdiff_t>(v.size());
#pragma omp parallel for schedule(static) if (v.size() >= kParallelCutoff)
  for (std::ptrdiff_t i = 0; i < n; ++i) {
    const std::size_t k = static_cast<std::size_t>(i);
    double s = diag[k] * v[k];
    if (i > 0) s += lower[k] * v[k - 1];
    if (i + 1 < n) s += upper[k] * v[k + 1];
    out[k] = s;
  }
}

}  // namespace measurefit::kernels
