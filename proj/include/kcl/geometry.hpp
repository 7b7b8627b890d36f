#pragma once

#include <vector>

#include "kcl/model.hpp"
#include "kcl/quadrature.hpp"

namespace kcl {

// e^{-k psi(r)} xi(r)^{n-1}; the boundary-sphere density with the usual
// |S^{n-1}| normalization omitted.  k = 2 and k = 1 are the two measures
// used by the constructions, k = 0 the plain Riemannian one.
double area_density(const ModelManifold& m, double r, double k);

// Integral of area_density over [0, r] by adaptive quadrature.
double ball_volume(const ModelManifold& m, double r, double k, const QuadratureConfig& q = {});

// area_density / ball_volume.  Below a small radius threshold the ratio is
// evaluated through its pole expansion n/r + (n-1)(xi'/xi - 1/r) - k psi'(r),
// which is the L'Hopital limit rearranged to stay finite in floating point.
double isoperimetric_ratio(const ModelManifold& m, double r, double k,
                           const QuadratureConfig& q = {});

struct RatioScan {
  bool pass = true;
  double violation_lo = 0.0;
  double violation_hi = 0.0;
  double ratio_lo = 0.0;
  double ratio_hi = 0.0;
};

// Samples the isoperimetric ratio on a merged geometric+uniform grid and
// reports the first interval on which it increases beyond tolerance.
RatioScan ratio_monotone_scan(const ModelManifold& m, double k, int resolution,
                              const QuadratureConfig& q = {});

// Radial Bakry-Emery diagnostic e^{-2psi}(psi'' + (n-1)(xi'/xi)psi' - psi'^2),
// with psi'' obtained by central-differencing psi_prime.
double bakry_emery_yy(const ModelManifold& m, double r);

// |S^{n-1}|
double sphere_area(int n);

}  // namespace kcl
