#pragma once

#include "kcl/geometry.hpp"
#include "kcl/profile.hpp"

namespace kcl {

// Boundary radius r0 with n|H0| = area_density(r0,k)/ball_volume(r0,k),
// found by bisection on the non-increasing ratio.  Requires H0 < 0; verifies
// the monotone-ratio hypothesis first and reports the attainable range when
// the target lies outside it.  Residual at the returned radius is at most
// 1e-12 * n|H0|.
double solve_radius(const ModelManifold& m, double H0, double k,
                    const QuadratureConfig& q = {});

// I(r) = n H0 * ball_volume(r, k): the first integral of the radial
// constant-curvature equation with respect to the e^{-k psi} measure.
double flux_integral(const ModelManifold& m, double r, double H0, double k,
                     const QuadratureConfig& q = {});

// Profile by singular-endpoint quadrature of the slope
//   u'(r) = e^{psi} I / sqrt(A_k^2 - I^2),
// where the last fifth of [0, r0] is integrated under the substitution
// r = r0 - w^2 that removes the 1/sqrt(r0 - r) endpoint singularity.
GraphSolution build_profile_quadrature(const ModelManifold& m, double H0, double k,
                                       int grid_size = 257, const QuadratureConfig& q = {},
                                       Variant variant = Variant::weighted);

struct OdeOptions {
  double tol = 1e-10;        // local error per accepted step
  long max_steps = 2000000;
  double initial_step_frac = 1e-3;  // of min(1, r0)
  double max_step_frac = 0.025;     // of r0
};

// Raw arc-length integration of the meridian system from the boundary
//   dr/dt = -cos(phi),  ds/dt = e^{psi} sin(phi),
//   dphi/dt = n H0 + sin(phi) (-k psi' + (n-1) xi'/xi),
// with r(0)=r0, s(0)=0, phi(0)=pi/2, stopping when r or phi reaches the
// axis thresholds.  Detects folds: r(t) must decrease and phi may not exceed
// pi/2, otherwise the curve is not a graph and NumericError is thrown.
OdeTrace integrate_meridian(const ModelManifold& m, double r0, double H0, double k,
                            const OdeOptions& opts = {});

// Profile via integrate_meridian, resampled onto the clustered r grid by
// Hermite interpolation of the trace in arc length.
GraphSolution build_profile_ode(const ModelManifold& m, double H0, double k,
                                int grid_size = 257, const OdeOptions& opts = {},
                                Variant variant = Variant::weighted);

// Closed-form profiles of the two corollary families, built exactly as
// stated (weighted: u' = -e^{psi} (-H0 r)/sqrt(1 - H0^2 r^2) with
// r0 = 1/|H0|; unweighted: the same integrand without the e^{psi} factor),
// independent of the flux-based builders, for cross-validation.
GraphSolution corollary_profile(const ModelManifold& base, double c, double H0,
                                Variant variant, const QuadratureConfig& q = {},
                                int grid_size = 257);

}  // namespace kcl
