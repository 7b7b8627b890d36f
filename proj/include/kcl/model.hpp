#pragma once

#include <functional>
#include <map>
#include <string>

#include "kcl/expr.hpp"

namespace kcl {

// Rotationally symmetric base manifold [0, R) x S^{n-1} with metric
// dr^2 + xi(r)^2 dtheta^2 and radial weight psi (the fiber length of the
// ambient warped product is e^{-psi}).  Immutable after construction; all
// radial callables are pure.
struct ModelManifold {
  int n = 2;                      // dimension of the base
  double radius_limit = 0.0;      // R, may be +inf
  double scan_cap = 50.0;         // finite cap used for scans when R = +inf
  std::function<double(double)> xi, xi_prime;
  std::function<double(double)> psi, psi_prime;
  // Leading odd-series coefficients of xi = r + a3 r^3 + a5 r^5 + ...;
  // used to evaluate xi'/xi - 1/r without cancellation near the pole.
  double xi_a3 = 0.0;
  double xi_a5 = 0.0;
  std::string label;

  double effective_radius() const { return std::min(radius_limit, scan_cap); }
  // xi'(r)/xi(r) - 1/r, series-patched near r = 0.
  double xi_log_defect(double r) const;
};

ModelManifold make_euclidean(int n);
ModelManifold make_hyperbolic(int n, double kappa);
ModelManifold make_spherical(int n, double kappa);

// Dress a base model with the radial weight psi = gamma * log(xi(r)/r),
// continuously extended by psi(0) = 0.  gamma = c(n-1)/2 for the weighted
// family and c(n-1) for the unweighted one; with c = 1 these make
// e^{-2psi} xi^{n-1} resp. e^{-psi} xi^{n-1} equal to r^{n-1}.
ModelManifold make_corollary_weighted(const ModelManifold& base, double c);
ModelManifold make_corollary_unweighted(const ModelManifold& base, double c);

struct CustomModelSpec {
  int n = 2;
  double radius_limit = std::numeric_limits<double>::infinity();
  double scan_cap = 50.0;
  std::string xi, xi_prime, psi, psi_prime;
  std::map<std::string, double> params;
  std::string label = "custom";
};

ModelManifold make_custom(const CustomModelSpec& spec);

// Runs the model invariant checks (xi(0)=0, xi'(0)=1, xi>0 on (0,R),
// psi'(0)=0, user derivatives consistent with central differences) and
// throws ConfigError naming the failed check and the offending radius.
void validate_model(const ModelManifold& m);

// Central-difference consistency of a callable pair, same deviation measure
// as expr::derivative_consistency.
double fn_derivative_deviation(const std::function<double(double)>& f,
                               const std::function<double(double)>& fprime,
                               std::span<const double> sample);

}  // namespace kcl
