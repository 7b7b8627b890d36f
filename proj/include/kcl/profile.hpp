#pragma once

#include <memory>
#include <optional>
#include <vector>

#include "kcl/model.hpp"

namespace kcl {

enum class Variant { weighted, unweighted };

// Weight exponent k of the measure e^{-k psi} dP driving each variant:
// the weighted construction pairs with k = 2, the unweighted with k = 1.
inline double default_weight_exponent(Variant v) {
  return v == Variant::weighted ? 2.0 : 1.0;
}

const char* variant_name(Variant v);
Variant variant_from_name(const std::string& name);

enum class Method { quadrature, ode, closed_form };
const char* method_name(Method m);

// Sampled meridian of a rotational graph.  r increases from the axis (index
// 0, r = 0) to the boundary radius r0.  At the boundary node the meridian is
// vertical: u' and W are IEEE infinities there while phi = pi/2 and
// u'/W = -sin(phi) = -1 stay finite.
struct GraphProfile {
  Variant variant = Variant::weighted;
  std::vector<double> r;        // strictly increasing, r.front() = 0, r.back() = r0
  std::vector<double> u;        // u >= 0, u(r0) = 0, non-increasing
  std::vector<double> u_prime;  // <= 0
  std::vector<double> W;        // sqrt(e^{2psi} + u'^2) >= e^{psi}
  std::vector<double> phi;      // meridian angle, sin(phi) = -u'/W, phi(0)=0, phi(r0)=pi/2
  std::vector<double> t;        // meridian arc length from the apex

  std::size_t size() const { return r.size(); }
};

// Accepted-step record of the arc-length integration from the boundary.
struct OdeTrace {
  std::vector<double> t, r, s, phi;
  std::vector<double> dr, ds, dphi;  // exact derivatives at the nodes
  double r_end = 0.0;                // where the integration stopped
  double phi_end = 0.0;
  double total_length = 0.0;         // boundary-to-apex, including the end patch
};

struct SolverDiagnostics {
  double quad_error = 0.0;       // accumulated quadrature error estimate for u
  double radius_residual = 0.0;  // |n|H0| - ratio(r0)| from the radius solve
  long ode_accepted = 0;
  long ode_rejected = 0;
  double axis_phi = 0.0;  // phi where the meridian met the axis
  double axis_r = 0.0;    // r where it met the axis
};

struct GraphSolution {
  GraphProfile profile;
  double H0 = 0.0;
  double r0 = 0.0;
  double k = 2.0;  // weight exponent actually used
  Method method = Method::quadrature;
  ModelManifold model;
  SolverDiagnostics diag;
  std::shared_ptr<const OdeTrace> trace;  // only for Method::ode
};

// Node layout used by every builder: Chebyshev-type clustering composed with
// itself toward r0, r_i = r0 (1 - (1 - sin(pi i / (2(N-1))))^2), so that the
// last interior node sits ~(pi/(2N))^4 r0 from the boundary where u' blows up.
std::vector<double> clustered_grid(double r0, int nodes);

// u == 0 profile over B_{r0}; the equality case of the angle-function bound.
GraphSolution flat_disk_solution(const ModelManifold& m, double r0, double H0_label,
                                 Variant variant, int nodes);

// sup_i |a.u - b.u| on the common grid (profiles must share the layout).
double height_agreement(const GraphSolution& a, const GraphSolution& b);

// Arc length t -> base radius r lookup by monotone Hermite interpolation of
// the stored columns; exact at the nodes.
double radius_at_arclength(const GraphProfile& p, double t);

}  // namespace kcl
