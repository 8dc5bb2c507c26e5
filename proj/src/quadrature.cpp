#include "evstep/quadrature.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace evstep {

void QuadratureConfig::validate() const {
  if (!(abs_tol > 0.0))
    throw std::invalid_argument("QuadratureConfig: abs_tol must be positive");
  if (max_depth < 1)
    throw std::invalid_argument("QuadratureConfig: max_depth must be >= 1");
}

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

struct SimpsonWorker {
  const std::function<double(double)>& f;
  const QuadratureConfig& config;
  long nodes = 0;
  bool converged = true;
  bool bailed = false;

  double eval(double x) {
    ++nodes;
    return f(x);
  }

  // Refine the interval [a, b] whose Simpson estimate `whole` used the
  // midpoint m. fa/fm/fb are cached integrand values.
  double refine(double a, double fa, double m, double fm, double b, double fb,
                double whole, double tol, int depth) {
    if (bailed) return kNaN;
    const double lm = 0.5 * (a + m);
    const double rm = 0.5 * (m + b);
    const double flm = eval(lm);
    const double frm = eval(rm);
    if (!std::isfinite(flm) || !std::isfinite(frm)) {
      bailed = true;
      converged = false;
      return kNaN;
    }
    const double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    const double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    const double delta = left + right - whole;
    if (std::abs(delta) <= 15.0 * tol)
      return left + right + delta / 15.0;
    if (depth >= config.max_depth) {
      converged = false;
      return left + right + delta / 15.0;
    }
    return refine(a, fa, lm, flm, m, fm, left, 0.5 * tol, depth + 1) +
           refine(m, fm, rm, frm, b, fb, right, 0.5 * tol, depth + 1);
  }
};

}  // namespace

QuadratureResult integrate(const std::function<double(double)>& f, double a,
                           double b, const QuadratureConfig& config) {
  config.validate();
  QuadratureResult result;
  if (a == b) return result;
  if (!std::isfinite(a) || !std::isfinite(b)) {
    result.value = kNaN;
    result.converged = false;
    return result;
  }

  SimpsonWorker worker{f, config};
  const double m = 0.5 * (a + b);
  const double fa = worker.eval(a);
  const double fm = worker.eval(m);
  const double fb = worker.eval(b);
  if (!std::isfinite(fa) || !std::isfinite(fm) || !std::isfinite(fb)) {
    result.value = kNaN;
    result.nodes = worker.nodes;
    result.converged = false;
    return result;
  }
  const double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
  result.value = worker.refine(a, fa, m, fm, b, fb, whole, config.abs_tol, 0);
  result.nodes = worker.nodes;
  result.converged = worker.converged;
  return result;
}

}  // namespace evstep
