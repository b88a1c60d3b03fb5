#pragma once

#include <cstddef>
#include <span>

namespace measurefit::kernels {

/// Reductions are summed in fixed-size blocks (block partials in index
/// order), so the parallel results are bit-identical for any thread count.
/// The serial:: namespace holds plain reference loops used by the tests and
/// the benchmark; they agree with the parallel kernels to roundoff, not
/// bitwise.
inline constexpr std::size_t kBlock = 1024;

namespace serial {

double sum(std::span<const double> v);

/// Composite trapezoid rule on a uniform grid with spacing h.
double trapezoid(std::span<const double> v, double h);

/// ∫ (√p − √q)² dx by the trapezoid rule (unhalved squared Hellinger).
double hellinger_sq_integral(std::span<const double> p,
                             std::span<const double> q, double h);

/// ∫ |a − b| dx by the trapezoid rule.
double l1_distance(std::span<const double> a, std::span<const double> b,
                   double h);

void scale(std::span<double> v, double s);

/// out = T v for a tridiagonal T given by (lower, diag, upper);
/// lower[0] and upper[n-1] are ignored.
void tridiag_apply(std::span<const double> lower, std::span<const double> diag,
                   std::span<const double> upper, std::span<const double> v,
                   std::span<double> out);

/// Thomas elimination with precomputed upper sweep. prepare() factors the
/// matrix into `cprime` (and checks the pivots); solve() then runs one
/// forward/backward sweep per right-hand side, in place.
void tridiag_prepare(std::span<const double> lower,
                     std::span<const double> diag,
                     std::span<const double> upper, std::span<double> cprime);
void tridiag_solve(std::span<const double> lower, std::span<const double> diag,
                   std::span<const double> cprime, std::span<double> rhs);

}  // namespace serial

double sum(std::span<const double> v);
double trapezoid(std::span<const double> v, double h);
double hellinger_sq_integral(std::span<const double> p,
                             std::span<const double> q, double h);
double l1_distance(std::span<const double> a, std::span<const double> b,
                   double h);
void scale(std::span<double> v, double s);
void tridiag_apply(std::span<const double> lower, std::span<const double> diag,
                   std::span<const double> upper, std::span<const double> v,
                   std::span<double> out);

}  // namespace measurefit::kernels
