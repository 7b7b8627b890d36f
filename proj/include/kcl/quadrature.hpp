#pragma once

#include <functional>

#include "kcl/errors.hpp"

namespace kcl {

struct QuadratureConfig {
  double abs_tol = 1e-12;
  double rel_tol = 1e-10;
  int max_depth = 48;

  void validate() const {
    if (!(abs_tol > 0.0) || !(rel_tol > 0.0))
      throw ConfigError("quadrature tolerances must be positive");
    if (max_depth < 1) throw ConfigError("quadrature max depth must be >= 1");
  }

  QuadratureConfig tightened(double factor) const {
    QuadratureConfig q = *this;
    q.abs_tol = std::max(abs_tol * factor, 1e-15);
    q.rel_tol = std::max(rel_tol * factor, 4e-15);
    return q;
  }
};

struct QuadResult {
  double value = 0.0;
  double error = 0.0;  // accumulated error estimate
  long evaluations = 0;
  bool converged = true;
};

// Globally adaptive Gauss-Kronrod 7-15 on [a, b] (a > b allowed, value is
// signed).  Abscissae are interior, so integrable endpoint singularities of
// the 1/sqrt kind are never evaluated at the endpoint itself.
// Throws NumericError when max_depth is exhausted and the accumulated
// estimate still exceeds the requested tolerance; the achieved estimate is
// reported in the message.
QuadResult integrate(const std::function<double(double)>& f, double a, double b,
                     const QuadratureConfig& cfg = {});

// Single 15-point Kronrod panel, no subdivision.  Used for short smooth
// panels between precomputed anchors where the rule is effectively exact.
double integrate_panel(const std::function<double(double)>& f, double a, double b);

}  // namespace kcl
