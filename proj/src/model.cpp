#include "kcl/model.hpp"

#include <cmath>
#include <limits>
#include <memory>
#include <sstream>
#include <vector>

namespace kcl {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kSeriesSwitch = 1e-3;

std::string format_radius(double r) {
  std::ostringstream os;
  os << r;
  return os.str();
}

std::vector<double> validation_sample(double r_hi) {
  std::vector<double> out;
  for (int j = 1; j <= 16; ++j) out.push_back(r_hi * (0.02 + 0.055 * j));
  return out;
}

}  // namespace

double ModelManifold::xi_log_defect(double r) const {
  if (r < kSeriesSwitch)
    return 2.0 * xi_a3 * r + (4.0 * xi_a5 - 2.0 * xi_a3 * xi_a3) * r * r * r;
  return xi_prime(r) / xi(r) - 1.0 / r;
}

ModelManifold make_euclidean(int n) {
  ModelManifold m;
  m.n = n;
  m.radius_limit = kInf;
  m.xi = [](double r) { return r; };
  m.xi_prime = [](double) { return 1.0; };
  m.psi = [](double) { return 0.0; };
  m.psi_prime = [](double) { return 0.0; };
  m.xi_a3 = 0.0;
  m.xi_a5 = 0.0;
  m.label = "euclidean(n=" + std::to_string(n) + ")";
  validate_model(m);
  return m;
}

ModelManifold make_hyperbolic(int n, double kappa) {
  if (!(kappa > 0.0)) throw ConfigError("hyperbolic model requires kappa > 0");
  const double sk = std::sqrt(kappa);
  ModelManifold m;
  m.n = n;
  m.radius_limit = kInf;
  m.xi = [sk](double r) { return std::sinh(sk * r) / sk; };
  m.xi_prime = [sk](double r) { return std::cosh(sk * r); };
  m.psi = [](double) { return 0.0; };
  m.psi_prime = [](double) { return 0.0; };
  m.xi_a3 = kappa / 6.0;
  m.xi_a5 = kappa * kappa / 120.0;
  std::ostringstream label;
  label << "hyperbolic(n=" << n << ",kappa=" << kappa << ")";
  m.label = label.str();
  validate_model(m);
  return m;
}

ModelManifold make_spherical(int n, double kappa) {
  if (!(kappa > 0.0)) throw ConfigError("spherical model requires kappa > 0");
  const double sk = std::sqrt(kappa);
  ModelManifold m;
  m.n = n;
  m.radius_limit = 3.14159265358979323846 / sk;
  m.xi = [sk](double r) { return std::sin(sk * r) / sk; };
  m.xi_prime = [sk](double r) { return std::cos(sk * r); };
  m.psi = [](double) { return 0.0; };
  m.psi_prime = [](double) { return 0.0; };
  m.xi_a3 = -kappa / 6.0;
  m.xi_a5 = kappa * kappa / 120.0;
  std::ostringstream label;
  label << "spherical(n=" << n << ",kappa=" << kappa << ")";
  m.label = label.str();
  validate_model(m);
  return m;
}

namespace {

ModelManifold make_corollary(const ModelManifold& base, double c, double gamma_per_c,
                             const char* family) {
  if (!(c > 0.0)) throw ConfigError("corollary weight requires c > 0");
  const double gamma = c * gamma_per_c * (base.n - 1);
  ModelManifold m = base;
  auto xi = base.xi;
  // psi(0) = 0 is the continuous extension of gamma*log(xi/r), xi/r -> 1.
  m.psi = [xi, gamma](double r) {
    if (r == 0.0) return 0.0;
    return gamma * std::log(xi(r) / r);
  };
  auto base_copy = std::make_shared<ModelManifold>(base);
  m.psi_prime = [base_copy, gamma](double r) { return gamma * base_copy->xi_log_defect(r); };
  std::ostringstream label;
  label << family << "(" << base.label << ",c=" << c << ")";
  m.label = label.str();
  validate_model(m);
  return m;
}

}  // namespace

ModelManifold make_corollary_weighted(const ModelManifold& base, double c) {
  return make_corollary(base, c, 0.5, "corollary_weighted");
}

ModelManifold make_corollary_unweighted(const ModelManifold& base, double c) {
  return make_corollary(base, c, 1.0, "corollary_unweighted");
}

ModelManifold make_custom(const CustomModelSpec& spec) {
  if (spec.n < 2) throw ConfigError("custom model requires dimension n >= 2");
  if (!(spec.radius_limit > 0.0)) throw ConfigError("custom model requires R > 0");

  std::set<std::string> allowed;
  for (const auto& [key, value] : spec.params) allowed.insert(key);

  auto parse = [&](const std::string& src, const char* which) {
    try {
      return std::make_shared<expr::ExprAst>(expr::ExprAst::parse(src, allowed));
    } catch (const ConfigError& e) {
      throw ConfigError(std::string("in custom model field '") + which + "': " + e.what());
    }
  };
  auto xi_ast = parse(spec.xi, "xi");
  auto xip_ast = parse(spec.xi_prime, "xi_prime");
  auto psi_ast = parse(spec.psi, "psi");
  auto psip_ast = parse(spec.psi_prime, "psi_prime");
  auto params = std::make_shared<std::map<std::string, double>>(spec.params);

  auto bind = [&params](std::shared_ptr<expr::ExprAst> ast) {
    return [ast, params](double r) { return ast->eval(r, *params); };
  };

  ModelManifold m;
  m.n = spec.n;
  m.radius_limit = spec.radius_limit;
  m.scan_cap = spec.scan_cap;
  m.xi = bind(xi_ast);
  m.xi_prime = bind(xip_ast);
  m.psi = bind(psi_ast);
  m.psi_prime = bind(psip_ast);
  m.label = spec.label;

  // Estimate the leading series coefficients from xi itself; only the
  // near-pole defect formula consumes them.
  const double h = 1e-2;
  const double a3_h = (m.xi(h) - h) / (h * h * h);
  const double h2 = 5e-3;
  const double a3_h2 = (m.xi(h2) - h2) / (h2 * h2 * h2);
  m.xi_a3 = (4.0 * a3_h2 - a3_h) / 3.0;  // Richardson in h^2
  m.xi_a5 = (a3_h - m.xi_a3) / (h * h);

  validate_model(m);
  return m;
}

double fn_derivative_deviation(const std::function<double(double)>& f,
                               const std::function<double(double)>& fprime,
                               std::span<const double> sample) {
  double worst = 0.0;
  for (double r : sample) {
    const double h = 1e-5 * std::max(1.0, std::fabs(r));
    const double diff = (f(r + h) - f(r - h)) / (2.0 * h);
    const double claimed = fprime(r);
    worst = std::max(worst, std::fabs(diff - claimed) / std::max(1.0, std::fabs(claimed)));
  }
  return worst;
}

void validate_model(const ModelManifold& m) {
  if (m.n < 2) throw ConfigError("model dimension must be >= 2");
  if (!(m.radius_limit > 0.0)) throw ConfigError("model radius limit must be positive");

  const double r_hi = m.effective_radius() * 0.98;

  auto fail = [&](const std::string& check, double r) {
    throw ConfigError("model validation failed [" + m.label + "]: " + check + " at r = " +
                      format_radius(r));
  };

  if (std::fabs(m.xi(0.0)) > 1e-9) fail("xi(0) = 0", 0.0);

  const double d4 = std::fabs(m.xi(1e-4) / 1e-4 - 1.0);
  const double d5 = std::fabs(m.xi(1e-5) / 1e-5 - 1.0);
  if (d5 > 1e-3 || d5 > d4 + 1e-7) fail("xi'(0) = 1 (xi(h)/h -> 1)", 1e-5);

  for (int j = 1; j <= 64; ++j) {
    const double r = r_hi * j / 64.0;
    if (!(m.xi(r) > 0.0)) fail("xi > 0 on (0,R)", r);
  }

  double psi0_slope = 0.0;
  try {
    psi0_slope = m.psi_prime(0.0);
  } catch (const Error&) {
    psi0_slope = m.psi_prime(1e-8);
  }
  if (std::fabs(psi0_slope) > 1e-6) fail("psi'(0) = 0", 0.0);

  const std::vector<double> sample = validation_sample(r_hi);
  const double xi_dev = fn_derivative_deviation(m.xi, m.xi_prime, sample);
  if (xi_dev > 1e-6) {
    std::ostringstream os;
    os << "xi_prime inconsistent with xi (central-difference deviation " << xi_dev << ")";
    fail(os.str(), sample.front());
  }
  const double psi_dev = fn_derivative_deviation(m.psi, m.psi_prime, sample);
  if (psi_dev > 1e-6) {
    std::ostringstream os;
    os << "psi_prime inconsistent with psi (central-difference deviation " << psi_dev << ")";
    fail(os.str(), sample.front());
  }
}

}  // namespace kcl
