#pragma once

// Small numerical kernels shared by the modules: quadrature, tridiagonal
// solves, finite differences, cubic resampling and the free propagator.

#include <complex>
#include <span>
#include <vector>

namespace inflection {

using cplx = std::complex<double>;
using cvec = std::vector<cplx>;

inline constexpr cplx kI{0.0, 1.0};
inline constexpr double kPi = 3.14159265358979323846;

// Trapezoid rule on a uniform grid.
double trapezoid(std::span<const double> y, double h);
double trapezoid_norm(std::span<const cplx> v, double h);
// ∫ conj(a) b
cplx trapezoid_inner(std::span<const cplx> a, std::span<const cplx> b, double h);
// Trapezoid rule on arbitrary increasing abscissae.
double trapezoid(std::span<const double> x, std::span<const double> y);

// Thomas algorithm, no pivoting. sub[0] and super[n-1] are ignored.
// Result overwrites rhs. Returns false if a pivot vanished.
bool solve_tridiagonal(std::span<const cplx> sub, std::span<const cplx> diag,
                       std::span<const cplx> super, std::span<cplx> rhs);

// Central differences inside, second-order one-sided at both ends.
cvec first_difference(std::span<const cplx> v, double h);
cvec second_difference(std::span<const cplx> v, double h);

// 4-point Lagrange interpolation of samples v[i] at x0 + i*h.
// Outside [x0, x0 + (n-1)h] the result is 0.
cplx cubic_sample(std::span<const cplx> v, double x0, double h, double x);

// Solution operator of i u_s = ½ u'' on the line, applied for "time" s.
// The profile is zero padded to pad_factor times its length before the FFT.
cvec free_flow(std::span<const cplx> u, double h, double s, int pad_factor = 4);

// Least-squares slope of y against x.
double fit_slope(std::span<const double> x, std::span<const double> y);

}  // namespace inflection
