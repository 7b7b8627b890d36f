#include "kcl/finite_diff.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace kcl {

double lagrange_derivative(std::span<const double> x, std::span<const double> y, double x0) {
  const std::size_t n = x.size();
  double result = 0.0;
  for (std::size_t j = 0; j < n; ++j) {
    // L_j'(x0) = sum_{m != j} prod_{i != j,m} (x0-x_i) / prod_{i != j} (x_j-x_i)
    double denom = 1.0;
    for (std::size_t i = 0; i < n; ++i)
      if (i != j) denom *= x[j] - x[i];
    double num = 0.0;
    for (std::size_t mth = 0; mth < n; ++mth) {
      if (mth == j) continue;
      double prod = 1.0;
      for (std::size_t i = 0; i < n; ++i)
        if (i != j && i != mth) prod *= x0 - x[i];
      num += prod;
    }
    result += y[j] * num / denom;
  }
  return result;
}

double local_derivative5(std::span<const double> grid, std::span<const double> vals,
                         std::size_t i) {
  const std::size_t n = grid.size();
  if (n < 5) throw std::invalid_argument("local_derivative5 needs at least 5 nodes");
  std::size_t lo = (i >= 2) ? i - 2 : 0;
  if (lo + 5 > n) lo = n - 5;
  return lagrange_derivative(grid.subspan(lo, 5), vals.subspan(lo, 5), grid[i]);
}

double hermite_value(double t0, double t1, double y0, double y1, double d0, double d1,
                     double t) {
  const double h = t1 - t0;
  const double s = (t - t0) / h;
  const double s2 = s * s;
  const double s3 = s2 * s;
  return (2 * s3 - 3 * s2 + 1) * y0 + (s3 - 2 * s2 + s) * h * d0 +
         (-2 * s3 + 3 * s2) * y1 + (s3 - s2) * h * d1;
}

double hermite_slope(double t0, double t1, double y0, double y1, double d0, double d1,
                     double t) {
  const double h = t1 - t0;
  const double s = (t - t0) / h;
  const double s2 = s * s;
  return ((6 * s2 - 6 * s) * y0 + (3 * s2 - 4 * s + 1) * h * d0 + (-6 * s2 + 6 * s) * y1 +
          (3 * s2 - 2 * s) * h * d1) /
         h;
}

double hermite_invert(double t0, double t1, double y0, double y1, double d0, double d1,
                      double target) {
  double lo = t0, hi = t1;
  bool increasing = y1 > y0;
  double t = t0 + (t1 - t0) * ((target - y0) / (y1 - y0 + ((y1 == y0) ? 1.0 : 0.0)));
  t = std::clamp(t, t0, t1);
  for (int iter = 0; iter < 60; ++iter) {
    const double val = hermite_value(t0, t1, y0, y1, d0, d1, t);
    const double err = val - target;
    if (std::fabs(err) < 1e-15 * (std::fabs(target) + 1.0)) return t;
    if ((err > 0) == increasing)
      hi = t;
    else
      lo = t;
    const double slope = hermite_slope(t0, t1, y0, y1, d0, d1, t);
    double next = (slope != 0.0) ? t - err / slope : 0.5 * (lo + hi);
    if (!(next > lo) || !(next < hi)) next = 0.5 * (lo + hi);
    if (std::fabs(next - t) < 1e-17 * (std::fabs(t) + 1.0)) return next;
    t = next;
  }
  return t;
}

double loglog_slope(std::span<const double> x, std::span<const double> y) {
  const std::size_t n = x.size();
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < n; ++i) {
    const double lx = std::log(x[i]);
    const double ly = std::log(y[i]);
    sx += lx;
    sy += ly;
    sxx += lx * lx;
    sxy += lx * ly;
  }
  return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

}  // namespace kcl
