#include "kcl/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace kcl {
namespace {

constexpr double kRatioPoleSwitch = 1e-6;

void check_radius(const ModelManifold& m, double r, bool allow_zero) {
  if (r < 0.0 || (!allow_zero && r == 0.0) || r >= m.radius_limit) {
    std::ostringstream os;
    os << "radius " << r << " outside " << (allow_zero ? "[0, R)" : "(0, R)") << " for model "
       << m.label;
    throw ConfigError(os.str());
  }
}

}  // namespace

double area_density(const ModelManifold& m, double r, double k) {
  check_radius(m, r, true);
  return std::exp(-k * m.psi(r)) * std::pow(m.xi(r), m.n - 1);
}

double ball_volume(const ModelManifold& m, double r, double k, const QuadratureConfig& q) {
  check_radius(m, r, true);
  if (r == 0.0) return 0.0;
  auto f = [&m, k](double t) { return area_density(m, t, k); };
  return integrate(f, 0.0, r, q).value;
}

double isoperimetric_ratio(const ModelManifold& m, double r, double k,
                           const QuadratureConfig& q) {
  check_radius(m, r, false);
  if (r < kRatioPoleSwitch)
    return m.n / r + (m.n - 1) * m.xi_log_defect(r) - k * m.psi_prime(r);
  return area_density(m, r, k) / ball_volume(m, r, k, q);
}

RatioScan ratio_monotone_scan(const ModelManifold& m, double k, int resolution,
                              const QuadratureConfig& q) {
  if (resolution < 16) throw ConfigError("ratio scan resolution must be >= 16");

  const double r_eff = m.effective_radius();
  const double lo = std::max(1e-6, 1e-4 * r_eff);
  const double hi = r_eff * (1.0 - 1e-6);

  std::vector<double> grid;
  grid.reserve(2 * resolution);
  for (int j = 0; j < resolution; ++j) {
    grid.push_back(lo * std::pow(hi / lo, double(j) / (resolution - 1)));
    grid.push_back(lo + (hi - lo) * double(j) / (resolution - 1));
  }
  std::sort(grid.begin(), grid.end());
  grid.erase(std::unique(grid.begin(), grid.end()), grid.end());

  // Cumulative volumes along the sorted grid keep the scan linear in the
  // number of nodes.
  auto density = [&m, k](double t) { return area_density(m, t, k); };
  RatioScan out;
  double volume = 0.0;
  double prev_r = 0.0;
  double prev_ratio = std::numeric_limits<double>::infinity();
  for (double r : grid) {
    volume += integrate(density, prev_r, r, q).value;
    const double ratio = (r < kRatioPoleSwitch)
                             ? isoperimetric_ratio(m, r, k, q)
                             : area_density(m, r, k) / volume;
    if (ratio > prev_ratio + 1e-10 * (1.0 + std::fabs(prev_ratio))) {
      out.pass = false;
      out.violation_lo = prev_r;
      out.violation_hi = r;
      out.ratio_lo = prev_ratio;
      out.ratio_hi = ratio;
      return out;
    }
    prev_r = r;
    prev_ratio = ratio;
  }
  return out;
}

double bakry_emery_yy(const ModelManifold& m, double r) {
  check_radius(m, r, false);
  const double h = std::min(1e-5 * std::max(1.0, r), 0.5 * r);
  const double psi_pp = (m.psi_prime(r + h) - m.psi_prime(r - h)) / (2.0 * h);
  const double psi_p = m.psi_prime(r);
  const double xi_ld = m.xi_log_defect(r) + 1.0 / r;  // xi'/xi without cancellation
  const double weighted_laplacian = psi_pp + (m.n - 1) * xi_ld * psi_p - psi_p * psi_p;
  return std::exp(-2.0 * m.psi(r)) * weighted_laplacian;
}

double sphere_area(int n) {
  const double pi = 3.14159265358979323846;
  return 2.0 * std::pow(pi, 0.5 * n) / std::tgamma(0.5 * n);
}

}  // namespace kcl
