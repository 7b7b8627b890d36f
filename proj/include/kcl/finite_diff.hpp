#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace kcl {

// Derivative at x0 of the Lagrange polynomial through (x[i], y[i]).
// With five nodes this is the 4th-order stencil used on non-uniform grids.
double lagrange_derivative(std::span<const double> x, std::span<const double> y, double x0);

// Derivative of vals at grid index i from the degree-4 fit over the five
// nearest nodes (window clamped at the ends).
double local_derivative5(std::span<const double> grid, std::span<const double> vals,
                         std::size_t i);

// Cubic Hermite on [t0, t1] with endpoint values/derivatives.
double hermite_value(double t0, double t1, double y0, double y1, double d0, double d1, double t);
double hermite_slope(double t0, double t1, double y0, double y1, double d0, double d1, double t);

// Solves hermite_value(...) == target on [t0, t1] for data monotone on the
// interval; safeguarded Newton with bisection fallback.
double hermite_invert(double t0, double t1, double y0, double y1, double d0, double d1,
                      double target);

// Least-squares slope of log(y) against log(x).
double loglog_slope(std::span<const double> x, std::span<const double> y);

}  // namespace kcl
