#include "kcl/constructor.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <sstream>

#include "kcl/finite_diff.hpp"

namespace kcl {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

void require_negative_h0(double H0) {
  if (!(H0 < 0.0)) {
    std::ostringstream os;
    os << "H0 = " << H0
       << " violates the sign convention: the prescribed constant must be negative "
          "(upward normal, u >= 0, boundary in the zero slice)";
    throw ConfigError(os.str());
  }
}

// Cumulative integral of the area density anchored at the profile nodes.
// Queries off the anchors finish with a single Kronrod panel shorter than
// the local node spacing, which is effectively exact for these integrands.
class VolumeAnchors {
public:
  VolumeAnchors(const ModelManifold& m, double k, std::vector<double> nodes,
                const QuadratureConfig& q)
      : model_(&m), k_(k), nodes_(std::move(nodes)) {
    QuadratureConfig seg = q;
    seg.abs_tol = q.abs_tol / double(nodes_.size());
    values_.resize(nodes_.size(), 0.0);
    auto density = [this](double t) { return area_density(*model_, t, k_); };
    for (std::size_t i = 1; i < nodes_.size(); ++i) {
      QuadResult part = integrate(density, nodes_[i - 1], nodes_[i], seg);
      values_[i] = values_[i - 1] + part.value;
      error_ += part.error;
    }
  }

  double value(double r) const {
    auto it = std::upper_bound(nodes_.begin(), nodes_.end(), r);
    std::size_t j = (it == nodes_.begin()) ? 0 : std::distance(nodes_.begin(), it) - 1;
    double v = values_[j];
    if (r != nodes_[j])
      v += integrate_panel([this](double t) { return area_density(*model_, t, k_); },
                           nodes_[j], r);
    return v;
  }

  double error() const { return error_; }

private:
  const ModelManifold* model_;
  double k_;
  std::vector<double> nodes_;
  std::vector<double> values_;
  double error_ = 0.0;
};

}  // namespace

double flux_integral(const ModelManifold& m, double r, double H0, double k,
                     const QuadratureConfig& q) {
  return m.n * H0 * ball_volume(m, r, k, q);
}

double solve_radius(const ModelManifold& m, double H0, double k, const QuadratureConfig& q) {
  require_negative_h0(H0);
  const double target = -double(m.n) * H0;

  RatioScan scan = ratio_monotone_scan(m, k, 64, q);
  if (!scan.pass) {
    std::ostringstream os;
    os << "isoperimetric ratio is not non-increasing for k = " << k << " on [" << m.label
       << "]: ratio rises from " << scan.ratio_lo << " to " << scan.ratio_hi << " over ["
       << scan.violation_lo << ", " << scan.violation_hi << "]";
    throw NumericError(os.str());
  }

  const QuadratureConfig tight = q.tightened(1e-3);
  auto ratio = [&](double r) { return isoperimetric_ratio(m, r, k, tight); };

  const double r_eff = m.effective_radius();
  double hi = r_eff * (1.0 - 1e-9);
  const double ratio_hi = ratio(hi);
  if (ratio_hi >= target) {
    std::ostringstream os;
    os << "target n|H0| = " << target << " is outside the attainable range: the ratio only "
       << "falls to " << ratio_hi << " by r = " << hi << " (model " << m.label << ")";
    throw NumericError(os.str());
  }
  double lo = 0.5 * std::min(1.0, r_eff);
  for (int tries = 0; ratio(lo) <= target; ++tries) {
    lo *= 0.5;
    if (tries > 200) throw NumericError("failed to bracket the boundary radius near the pole");
  }

  for (int iter = 0; iter < 200 && (hi - lo) > 1e-16 * hi; ++iter) {
    const double mid = 0.5 * (lo + hi);
    if (ratio(mid) > target)
      lo = mid;
    else
      hi = mid;
  }
  const double r0 = 0.5 * (lo + hi);
  const double residual = std::fabs(ratio(r0) - target);
  if (residual > 1e-12 * target) {
    std::ostringstream os;
    os << "radius solve stalled: |n|H0| - ratio(r0)| = " << residual << " at r0 = " << r0;
    throw NumericError(os.str());
  }
  return r0;
}

namespace {

// Shared profile assembly: integrates a slope field with an integrable
// 1/sqrt(r0 - r) endpoint singularity.  `slope` is u'(r) (negative), and
// `sin_phi` its flux ratio -u'/W evaluated in whatever form is stable for
// the given construction.
struct SlopeField {
  std::function<double(double)> slope;
  std::function<double(double)> sin_phi;
};

GraphSolution assemble_from_slope(const ModelManifold& m, double H0, double k, Variant variant,
                                  Method method, double r0, const SlopeField& field,
                                  int grid_size, const QuadratureConfig& q) {
  GraphSolution sol;
  sol.model = m;
  sol.H0 = H0;
  sol.r0 = r0;
  sol.k = k;
  sol.method = method;

  GraphProfile& p = sol.profile;
  p.variant = variant;
  p.r = clustered_grid(r0, grid_size);
  const std::size_t N = p.r.size();
  p.u.assign(N, 0.0);
  p.u_prime.assign(N, 0.0);
  p.W.assign(N, 0.0);
  p.phi.assign(N, 0.0);
  p.t.assign(N, 0.0);

  // Substitution zone: every grid segment at or beyond the first node past
  // 0.8 r0 is integrated in the variable w = sqrt(r0 - r).
  std::size_t sub_start = N - 1;
  for (std::size_t i = 0; i < N; ++i)
    if (p.r[i] >= 0.8 * r0) {
      sub_start = i;
      break;
    }

  auto arc_density = [&](double r) {
    const double g = field.slope(r);
    const double e = std::exp(-m.psi(r)) * g;
    return std::sqrt(1.0 + e * e);
  };

  QuadratureConfig seg = q;
  seg.abs_tol = q.abs_tol / double(N);

  // Heights, accumulated from the boundary inward.
  for (std::size_t i = N - 1; i-- > 0;) {
    double du, derr;
    if (i + 1 >= sub_start + 1 || p.r[i] >= p.r[sub_start]) {
      const double wa = std::sqrt(r0 - p.r[i]);
      const double wb = std::sqrt(std::max(0.0, r0 - p.r[i + 1]));
      QuadResult res = integrate(
          [&](double w) { return 2.0 * w * field.slope(r0 - w * w); }, wb, wa, seg);
      du = res.value;  // equals -int_{r_i}^{r_{i+1}} slope dr
      derr = res.error;
      p.u[i] = p.u[i + 1] + du;
    } else {
      QuadResult res = integrate(field.slope, p.r[i], p.r[i + 1], seg);
      du = res.value;
      derr = res.error;
      p.u[i] = p.u[i + 1] - du;
    }
    sol.diag.quad_error += derr;
    if (p.u[i] < 0.0) p.u[i] = 0.0;  // roundoff clamp; the math keeps u >= 0
  }

  // Arc length from the apex.
  for (std::size_t i = 1; i < N; ++i) {
    if (p.r[i - 1] >= p.r[sub_start] && sub_start + 1 < N) {
      const double wa = std::sqrt(r0 - p.r[i - 1]);
      const double wb = std::sqrt(std::max(0.0, r0 - p.r[i]));
      QuadResult res = integrate(
          [&](double w) { return 2.0 * w * arc_density(r0 - w * w); }, wb, wa, seg);
      p.t[i] = p.t[i - 1] + res.value;
    } else {
      QuadResult res = integrate(arc_density, p.r[i - 1], p.r[i], seg);
      p.t[i] = p.t[i - 1] + res.value;
    }
  }

  for (std::size_t i = 1; i + 1 < N; ++i) {
    p.u_prime[i] = field.slope(p.r[i]);
    const double sp = std::clamp(field.sin_phi(p.r[i]), 0.0, 1.0);
    p.phi[i] = std::asin(sp);
    p.W[i] = std::hypot(std::exp(m.psi(p.r[i])), p.u_prime[i]);
  }
  p.u_prime[0] = 0.0;
  p.phi[0] = 0.0;
  p.W[0] = std::exp(m.psi(0.0));
  p.u[N - 1] = 0.0;
  p.u_prime[N - 1] = -kInf;
  p.W[N - 1] = kInf;
  p.phi[N - 1] = std::asin(1.0);  // exactly vertical at the boundary

  return sol;
}

}  // namespace

GraphSolution build_profile_quadrature(const ModelManifold& m, double H0, double k,
                                       int grid_size, const QuadratureConfig& q,
                                       Variant variant) {
  require_negative_h0(H0);
  const double r0 = solve_radius(m, H0, k, q);
  const double nH0 = m.n * H0;

  auto anchors = std::make_shared<VolumeAnchors>(m, k, clustered_grid(r0, grid_size), q);

  auto denominator = [&m, k, nH0, r0, anchors](double r) {
    const double area = area_density(m, r, k);
    const double flux = nH0 * anchors->value(r);
    double s = (area - std::fabs(flux)) * (area + std::fabs(flux));
    if (s <= 0.0) {
      if (r < r0 * (1.0 - 1e-7)) {
        std::ostringstream os;
        os << "flux denominator vanished at interior radius r = " << r
           << "; the non-increasing ratio hypothesis does not hold up to r0";
        throw NumericError(os.str());
      }
      s = 1e-30 * area * area;  // roundoff sliver at the boundary
    }
    return std::sqrt(s);
  };

  SlopeField field;
  field.slope = [&m, k, nH0, anchors, denominator](double r) {
    if (r <= 0.0) return 0.0;
    return std::exp(m.psi(r)) * nH0 * anchors->value(r) / denominator(r);
  };
  field.sin_phi = [&m, k, nH0, anchors](double r) {
    if (r <= 0.0) return 0.0;
    return std::fabs(nH0) * anchors->value(r) / area_density(m, r, k);
  };

  GraphSolution sol =
      assemble_from_slope(m, H0, k, variant, Method::quadrature, r0, field, grid_size, q);
  sol.diag.quad_error += anchors->error();
  sol.diag.radius_residual =
      std::fabs(isoperimetric_ratio(m, r0, k, q.tightened(1e-3)) - std::fabs(nH0));
  return sol;
}

GraphSolution corollary_profile(const ModelManifold& base, double c, double H0, Variant variant,
                                const QuadratureConfig& q, int grid_size) {
  require_negative_h0(H0);
  if (!(c > 0.0)) throw ConfigError("corollary profile requires c > 0");
  const double r0 = -1.0 / H0;
  if (!(r0 < base.radius_limit)) {
    std::ostringstream os;
    os << "corollary radius r0 = 1/|H0| = " << r0 << " must lie inside the base radius limit "
       << base.radius_limit;
    throw ConfigError(os.str());
  }
  ModelManifold m = (variant == Variant::weighted) ? make_corollary_weighted(base, c)
                                                   : make_corollary_unweighted(base, c);

  // The closed forms as stated: u'(r) = H0 r / sqrt(1 - H0^2 r^2), carrying
  // an extra e^{psi} factor in the weighted family only.
  const double h2 = H0 * H0;
  const bool weighted = variant == Variant::weighted;
  SlopeField field;
  field.slope = [m, H0, h2, weighted](double r) {
    const double denom = std::sqrt(std::max(1e-300, 1.0 - h2 * r * r));
    const double bare = H0 * r / denom;
    return weighted ? std::exp(m.psi(r)) * bare : bare;
  };
  field.sin_phi = [m, field](double r) {
    const double g = field.slope(r);
    return -g / std::hypot(std::exp(m.psi(r)), g);
  };

  const double k = default_weight_exponent(variant);
  return assemble_from_slope(m, H0, k, variant, Method::closed_form, r0, field, grid_size, q);
}

namespace {

struct Rhs {
  const ModelManifold* m;
  double nH0;
  double k;

  // y = (r, s, phi)
  bool operator()(const std::array<double, 3>& y, std::array<double, 3>& dy) const {
    const double r = y[0];
    const double phi = y[2];
    if (!(r > 0.0)) return false;
    const double sinphi = std::sin(phi);
    const double coeff = -k * m->psi_prime(r) + (m->n - 1) * (m->xi_log_defect(r) + 1.0 / r);
    dy[0] = -std::cos(phi);
    dy[1] = std::exp(m->psi(r)) * sinphi;
    dy[2] = nH0 + sinphi * coeff;
    return std::isfinite(dy[0]) && std::isfinite(dy[1]) && std::isfinite(dy[2]);
  }
};

}  // namespace

OdeTrace integrate_meridian(const ModelManifold& m, double r0, double H0, double k,
                            const OdeOptions& opts) {
  // Dormand-Prince 5(4) with FSAL.
  static constexpr double a21 = 1.0 / 5;
  static constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
  static constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
  static constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561,
                          a54 = -212.0 / 729;
  static constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247,
                          a64 = 49.0 / 176, a65 = -5103.0 / 18656;
  static constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192,
                          b5 = -2187.0 / 6784, b6 = 11.0 / 84;
  static constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920,
                          e5 = -17253.0 / 339200, e6 = 22.0 / 525, e7 = -1.0 / 40;

  Rhs rhs{&m, m.n * H0, k};

  const double r_stop = 1e-6 * r0;
  const double phi_stop = 1e-6;
  const double h_max = opts.max_step_frac * r0;

  OdeTrace trace;
  std::array<double, 3> y = {r0, 0.0, std::asin(1.0)};
  std::array<double, 3> f0;
  if (!rhs(y, f0)) throw NumericError("meridian system not evaluable at the boundary");
  double t = 0.0;
  double h = opts.initial_step_frac * std::min(1.0, r0);

  auto record = [&trace](double tt, const std::array<double, 3>& yy,
                         const std::array<double, 3>& ff) {
    trace.t.push_back(tt);
    trace.r.push_back(yy[0]);
    trace.s.push_back(yy[1]);
    trace.phi.push_back(yy[2]);
    trace.dr.push_back(ff[0]);
    trace.ds.push_back(ff[1]);
    trace.dphi.push_back(ff[2]);
  };
  record(t, y, f0);

  long accepted = 0, rejected = 0;
  const double pi_half = 2.0 * std::asin(1.0) * 0.5;

  while (y[0] > r_stop && y[2] > phi_stop) {
    if (accepted + rejected > opts.max_steps)
      throw NumericError("meridian integration exceeded the step budget");
    h = std::min({h, h_max, 0.5 * y[0]});
    if (h < 1e-15 * std::max(1.0, t)) {
      std::ostringstream os;
      os << "step size underflow near r = " << y[0] << ", phi = " << y[2] << ", t = " << t;
      throw NumericError(os.str());
    }

    std::array<double, 3> k2, k3, k4, k5, k6, k7, yt, y5;
    bool ok = true;
    auto stage = [&](std::array<double, 3>& out, auto... terms) {
      for (int i = 0; i < 3; ++i) {
        double acc = 0.0;
        ((acc += terms.first * terms.second[i]), ...);
        yt[i] = y[i] + h * acc;
      }
      return rhs(yt, out);
    };
    using P = std::pair<double, const std::array<double, 3>&>;
    ok = ok && stage(k2, P{a21, f0});
    ok = ok && stage(k3, P{a31, f0}, P{a32, k2});
    ok = ok && stage(k4, P{a41, f0}, P{a42, k2}, P{a43, k3});
    ok = ok && stage(k5, P{a51, f0}, P{a52, k2}, P{a53, k3}, P{a54, k4});
    ok = ok && stage(k6, P{a61, f0}, P{a62, k2}, P{a63, k3}, P{a64, k4}, P{a65, k5});
    if (ok) {
      for (int i = 0; i < 3; ++i)
        y5[i] = y[i] + h * (b1 * f0[i] + b3 * k3[i] + b4 * k4[i] + b5 * k5[i] + b6 * k6[i]);
      ok = rhs(y5, k7);
    }
    if (!ok) {
      h *= 0.5;
      ++rejected;
      continue;
    }

    double err = 0.0;
    for (int i = 0; i < 3; ++i) {
      const double e = h * (e1 * f0[i] + e3 * k3[i] + e4 * k4[i] + e5 * k5[i] + e6 * k6[i] +
                            e7 * k7[i]);
      const double scale = opts.tol * (1.0 + std::fabs(y[i]));
      err = std::max(err, std::fabs(e) / scale);
    }

    if (err <= 1.0) {
      if (y5[0] > y[0] + 1e-12 * std::max(1.0, r0))
        throw NumericError("meridian folded: r(t) stopped decreasing, the surface is not a "
                           "radial graph (check the sign of H0)");
      if (y5[2] > pi_half + 1e-8)
        throw NumericError("meridian angle exceeded pi/2: the surface turns past vertical and "
                           "is not a graph (check the sign of H0)");
      t += h;
      y = y5;
      f0 = k7;  // FSAL
      record(t, y, f0);
      ++accepted;
    } else {
      ++rejected;
    }
    const double grow = 0.9 * std::pow(std::max(err, 1e-10), -0.2);
    h *= std::clamp(grow, 0.2, 5.0);
  }

  trace.r_end = y[0];
  trace.phi_end = y[2];
  trace.total_length = t + std::max(0.0, y[0]);

  // Axis regularity: both the angle and the radius must reach the axis
  // together; a gross mismatch means the trajectory is not closing smoothly.
  if (std::sin(std::max(0.0, y[2])) > 0.05)
    throw NumericError("meridian did not close at the axis: sin(phi) stayed at " +
                       std::to_string(std::sin(y[2])));
  if (y[0] > 0.05 * std::max(1.0, r0))
    throw NumericError("meridian angle closed before reaching the axis (r_end = " +
                       std::to_string(y[0]) + ")");

  // Stash the step counts in the end fields the caller copies out.
  trace.t.shrink_to_fit();
  (void)accepted;
  (void)rejected;
  return trace;
}

GraphSolution build_profile_ode(const ModelManifold& m, double H0, double k, int grid_size,
                                const OdeOptions& opts, Variant variant) {
  require_negative_h0(H0);
  const double r0 = solve_radius(m, H0, k);
  OdeTrace trace = integrate_meridian(m, r0, H0, k, opts);

  GraphSolution sol;
  sol.model = m;
  sol.H0 = H0;
  sol.r0 = r0;
  sol.k = k;
  sol.method = Method::ode;

  GraphProfile& p = sol.profile;
  p.variant = variant;
  p.r = clustered_grid(r0, grid_size);
  const std::size_t N = p.r.size();
  p.u.assign(N, 0.0);
  p.u_prime.assign(N, 0.0);
  p.W.assign(N, 0.0);
  p.phi.assign(N, 0.0);
  p.t.assign(N, 0.0);

  const double T = trace.total_length;
  const double sigma =
      (trace.r_end > 0.0) ? std::sin(std::max(0.0, trace.phi_end)) / trace.r_end : 0.0;
  const double s_end = trace.s.back();
  const double psi0 = m.psi(0.0);

  // Walk the trace once; grid nodes are ascending in r, the trace descends.
  std::size_t seg = trace.r.size() - 1;
  for (std::size_t i = 0; i < N; ++i) {
    const double r = p.r[i];
    if (i == N - 1) {
      p.u[i] = 0.0;
      p.u_prime[i] = -kInf;
      p.W[i] = kInf;
      p.phi[i] = std::asin(1.0);
      p.t[i] = T;
      continue;
    }
    if (r <= trace.r_end) {
      // Apex patch from the regular asymptote sin(phi) ~ sigma r.
      p.u[i] = s_end + std::exp(psi0) * sigma * 0.5 *
                           (trace.r_end * trace.r_end - r * r);
      const double sp = std::clamp(sigma * r, 0.0, 1.0);
      p.phi[i] = std::asin(sp);
      p.u_prime[i] = -std::exp(m.psi(r)) * std::tan(p.phi[i]);
      p.W[i] = std::hypot(std::exp(m.psi(r)), p.u_prime[i]);
      p.t[i] = r;
      continue;
    }
    while (seg > 0 && trace.r[seg] < r) --seg;
    // Now trace.r[seg] >= r >= trace.r[seg+1].
    const std::size_t j = seg;
    const double tstar = hermite_invert(trace.t[j], trace.t[j + 1], trace.r[j],
                                        trace.r[j + 1], trace.dr[j], trace.dr[j + 1], r);
    p.u[i] = hermite_value(trace.t[j], trace.t[j + 1], trace.s[j], trace.s[j + 1],
                           trace.ds[j], trace.ds[j + 1], tstar);
    const double phi = hermite_value(trace.t[j], trace.t[j + 1], trace.phi[j],
                                     trace.phi[j + 1], trace.dphi[j], trace.dphi[j + 1], tstar);
    p.phi[i] = std::clamp(phi, 0.0, std::asin(1.0));
    const double epsi = std::exp(m.psi(r));
    p.u_prime[i] = -epsi * std::tan(p.phi[i]);
    p.W[i] = epsi / std::cos(p.phi[i]);
    p.t[i] = T - tstar;
    if (p.u[i] < 0.0) p.u[i] = 0.0;
  }

  sol.trace = std::make_shared<OdeTrace>(std::move(trace));
  sol.diag.axis_phi = sol.trace->phi_end;
  sol.diag.axis_r = sol.trace->r_end;
  sol.diag.ode_accepted = long(sol.trace->t.size()) - 1;
  return sol;
}

}  // namespace kcl
