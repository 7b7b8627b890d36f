#include "kcl/profile.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "kcl/errors.hpp"
#include "kcl/finite_diff.hpp"

namespace kcl {

const char* variant_name(Variant v) {
  return v == Variant::weighted ? "weighted" : "unweighted";
}

Variant variant_from_name(const std::string& name) {
  if (name == "weighted") return Variant::weighted;
  if (name == "unweighted") return Variant::unweighted;
  throw ConfigError("unknown variant '" + name + "' (expected weighted|unweighted)");
}

const char* method_name(Method m) {
  switch (m) {
    case Method::quadrature: return "quadrature";
    case Method::ode: return "ode";
    case Method::closed_form: return "closed_form";
  }
  return "?";
}

std::vector<double> clustered_grid(double r0, int nodes) {
  if (nodes < 16) throw ConfigError("profile grid needs at least 16 nodes");
  std::vector<double> grid(nodes);
  const double pi = 3.14159265358979323846;
  for (int i = 0; i < nodes; ++i) {
    const double s = std::sin(0.5 * pi * double(i) / (nodes - 1));
    const double gap = 1.0 - s;
    grid[i] = r0 * (1.0 - gap * gap);
  }
  grid.front() = 0.0;
  grid.back() = r0;
  return grid;
}

GraphSolution flat_disk_solution(const ModelManifold& m, double r0, double H0_label,
                                 Variant variant, int nodes) {
  GraphSolution sol;
  sol.model = m;
  sol.H0 = H0_label;
  sol.r0 = r0;
  sol.k = default_weight_exponent(variant);
  sol.method = Method::closed_form;
  GraphProfile& p = sol.profile;
  p.variant = variant;
  p.r = clustered_grid(r0, nodes);
  p.u.assign(p.r.size(), 0.0);
  p.u_prime.assign(p.r.size(), 0.0);
  p.W.resize(p.r.size());
  p.phi.assign(p.r.size(), 0.0);
  p.t = p.r;  // the flat meridian is the base radius itself
  for (std::size_t i = 0; i < p.r.size(); ++i) p.W[i] = std::exp(m.psi(p.r[i]));
  return sol;
}

double height_agreement(const GraphSolution& a, const GraphSolution& b) {
  const auto& pa = a.profile;
  const auto& pb = b.profile;
  if (pa.size() != pb.size()) throw ConfigError("profiles do not share a grid");
  double sup = 0.0;
  for (std::size_t i = 0; i < pa.size(); ++i)
    sup = std::max(sup, std::fabs(pa.u[i] - pb.u[i]));
  return sup;
}

double radius_at_arclength(const GraphProfile& p, double t) {
  const auto& ts = p.t;
  if (t < 0.0 || t > ts.back())
    throw ConfigError("arc length outside the profile range");
  auto it = std::upper_bound(ts.begin(), ts.end(), t);
  std::size_t hi = std::min<std::size_t>(ts.size() - 1, std::distance(ts.begin(), it));
  if (hi == 0) hi = 1;
  const std::size_t lo = hi - 1;
  // dr/dt = cos(phi); finite at both ends.
  return hermite_value(ts[lo], ts[hi], p.r[lo], p.r[hi], std::cos(p.phi[lo]),
                       std::cos(p.phi[hi]), t);
}

}  // namespace kcl
