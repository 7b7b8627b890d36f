#include "kcl/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace kcl {
namespace {

// 15-point Kronrod extension of the 7-point Gauss rule on [-1, 1].
constexpr double kXgk[8] = {
    0.991455371120812639206854697526329,
    0.949107912342758524526189684047851,
    0.864864423359769072789712788640926,
    0.741531185599394439863864773280788,
    0.586087235467691130294144838258730,
    0.405845151377397166906606412076961,
    0.207784955007898467600689403773245,
    0.000000000000000000000000000000000};

constexpr double kWgk[8] = {
    0.022935322010529224963732008058970,
    0.063092092629978553290700663189204,
    0.104790010322250183839876322541518,
    0.140653259715525918745189590510238,
    0.169004726639267902826583426598550,
    0.190350578064785409913256402421014,
    0.204432940075298892414161999234649,
    0.209482141084727828012999174891714};

constexpr double kWg[4] = {
    0.129484966168869693270611432679082,
    0.279705391489276667901467771423780,
    0.381830050505118944950369775488975,
    0.417959183673469387755102040816327};

struct Panel {
  double kronrod;
  double err;
};

Panel gk15(const std::function<double(double)>& f, double a, double b, long& evals) {
  const double center = 0.5 * (a + b);
  const double half = 0.5 * (b - a);

  double fc = f(center);
  double result_g = fc * kWg[3];
  double result_k = fc * kWgk[7];
  double resabs = std::fabs(fc) * kWgk[7];
  double fv[15];
  fv[7] = fc;

  for (int j = 0; j < 7; ++j) {
    const double dx = half * kXgk[j];
    const double f1 = f(center - dx);
    const double f2 = f(center + dx);
    fv[j] = f1;
    fv[14 - j] = f2;
    result_k += kWgk[j] * (f1 + f2);
    resabs += kWgk[j] * (std::fabs(f1) + std::fabs(f2));
    if (j % 2 == 1) result_g += kWg[j / 2] * (f1 + f2);
  }
  evals += 15;

  const double mean = result_k * 0.5;
  double resasc = kWgk[7] * std::fabs(fc - mean);
  for (int j = 0; j < 7; ++j)
    resasc += kWgk[j] * (std::fabs(fv[j] - mean) + std::fabs(fv[14 - j] - mean));

  const double ah = std::fabs(half);
  result_k *= half;
  resabs *= ah;
  resasc *= ah;

  double err = std::fabs((result_k - result_g * half));
  if (resasc != 0.0 && err != 0.0)
    err = resasc * std::min(1.0, std::pow(200.0 * err / resasc, 1.5));
  const double round_floor = 50.0 * std::numeric_limits<double>::epsilon() * resabs;
  if (round_floor > err) err = round_floor;
  return {result_k, err};
}

struct Accum {
  double value = 0.0;
  double error = 0.0;
  bool depth_exhausted = false;
};

void refine(const std::function<double(double)>& f, double a, double b, double tol,
            int depth, const QuadratureConfig& cfg, Accum& acc, long& evals) {
  Panel p = gk15(f, a, b, evals);
  if (p.err <= tol || !std::isfinite(p.kronrod)) {
    acc.value += p.kronrod;
    acc.error += p.err;
    return;
  }
  if (depth >= cfg.max_depth) {
    acc.value += p.kronrod;
    acc.error += p.err;
    acc.depth_exhausted = true;
    return;
  }
  const double mid = 0.5 * (a + b);
  refine(f, a, mid, 0.5 * tol, depth + 1, cfg, acc, evals);
  refine(f, mid, b, 0.5 * tol, depth + 1, cfg, acc, evals);
}

}  // namespace

double integrate_panel(const std::function<double(double)>& f, double a, double b) {
  long evals = 0;
  return gk15(f, a, b, evals).kronrod;
}

QuadResult integrate(const std::function<double(double)>& f, double a, double b,
                     const QuadratureConfig& cfg) {
  cfg.validate();
  QuadResult out;
  if (a == b) return out;

  long evals = 0;
  Panel first = gk15(f, a, b, evals);
  const double tol0 = std::max(cfg.abs_tol, cfg.rel_tol * std::fabs(first.kronrod));

  Accum acc;
  refine(f, a, b, tol0, 0, cfg, acc, evals);

  out.value = acc.value;
  out.error = acc.error;
  out.evaluations = evals;
  const double goal = std::max(cfg.abs_tol, cfg.rel_tol * std::fabs(acc.value));
  out.converged = std::isfinite(acc.value) && (!acc.depth_exhausted || acc.error <= goal);
  if (!out.converged) {
    std::ostringstream msg;
    msg << "quadrature failed to converge at max depth " << cfg.max_depth
        << ": achieved error estimate " << acc.error << " for requested " << goal;
    throw NumericError(msg.str());
  }
  return out;
}

}  // namespace kcl
