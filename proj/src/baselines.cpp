#include "evstep/baselines.hpp"

#include <bit>
#include <cmath>
#include <cstdint>

namespace evstep {

const char* method_name(BaselineMethod m) {
  switch (m) {
    case BaselineMethod::FixedStep: return "fixed";
    case BaselineMethod::DiminishingStep: return "diminishing";
    case BaselineMethod::BarzilaiBorweinLong: return "bb-long";
    case BaselineMethod::BarzilaiBorweinShort: return "bb-short";
    case BaselineMethod::LipschitzApprox: return "lipschitz";
    case BaselineMethod::Nesterov: return "nesterov";
    case BaselineMethod::WNGrad: return "wngrad";
  }
  return "unknown";
}

BaselineMethod method_from_name(const std::string& name) {
  if (name == "fixed") return BaselineMethod::FixedStep;
  if (name == "diminishing") return BaselineMethod::DiminishingStep;
  if (name == "bb-long") return BaselineMethod::BarzilaiBorweinLong;
  if (name == "bb-short") return BaselineMethod::BarzilaiBorweinShort;
  if (name == "lipschitz") return BaselineMethod::LipschitzApprox;
  if (name == "nesterov") return BaselineMethod::Nesterov;
  if (name == "wngrad") return BaselineMethod::WNGrad;
  throw std::invalid_argument("unknown baseline method: " + name);
}

void BaselineSpec::validate() const {
  if (!(step_param > 0.0) || !std::isfinite(step_param))
    throw std::invalid_argument("BaselineSpec: step_param must be positive");
  if (budget < 0)
    throw std::invalid_argument("BaselineSpec: budget must be >= 0");
  if (!(grad_tol >= 0.0))
    throw std::invalid_argument("BaselineSpec: grad_tol must be >= 0");
}

double diminishing_factor(long k) {
  if (k < 100) return 1.0;
  const int doublings = std::bit_width(static_cast<std::uint64_t>(k / 100));
  return std::ldexp(1.0, -doublings);
}

namespace {

// Per-method step rule: maps the current evaluation point and its gradient to
// the next evaluation point, carrying whatever state the rule needs.
class StepRule {
 public:
  StepRule(BaselineMethod method, double step_param)
      : method_(method), step_param_(step_param) {}

  Vector advance(const Vector& point, const Vector& grad) {
    switch (method_) {
      case BaselineMethod::FixedStep:
        ++k_;
        return point - step_param_ * grad;
      case BaselineMethod::DiminishingStep: {
        const double s = step_param_ * diminishing_factor(k_);
        ++k_;
        return point - s * grad;
      }
      case BaselineMethod::BarzilaiBorweinLong:
      case BaselineMethod::BarzilaiBorweinShort: {
        if (k_ > 0) {
          const Vector dx = point - prev_point_;
          const Vector dg = grad - prev_grad_;
          const bool long_form =
              method_ == BaselineMethod::BarzilaiBorweinLong;
          const double den = long_form ? dx.dot(dg) : dg.squaredNorm();
          if (den > 0.0 && std::isfinite(den)) {
            mu_ = long_form ? dx.squaredNorm() / den : dx.dot(dg) / den;
          }
          // Degenerate or non-finite denominators keep the previous step.
        } else {
          mu_ = step_param_;
        }
        prev_point_ = point;
        prev_grad_ = grad;
        ++k_;
        return point - mu_ * grad;
      }
      case BaselineMethod::LipschitzApprox: {
        if (k_ == 0) {
          lambda_ = step_param_;
        } else {
          const double ratio = (point - prev_point_).norm() /
                               (2.0 * (grad - prev_grad_).norm());
          const double growth =
              k_ == 1 ? std::numeric_limits<double>::infinity()
                      : std::sqrt(1.0 + omega_) * lambda_;
          const double next = std::min(growth, ratio);
          omega_ = next / lambda_;
          lambda_ = next;
        }
        prev_point_ = point;
        prev_grad_ = grad;
        ++k_;
        return point - lambda_ * grad;
      }
      case BaselineMethod::Nesterov: {
        // `point` is the extrapolated evaluation point; the underlying
        // iterate sequence advances from it by a plain gradient step. The
        // momentum weight is 0 on the first advance, so the first evaluation
        // points coincide with the plain iterates.
        const Vector theta_next = point - step_param_ * grad;
        const double k1 = static_cast<double>(k_ + 1);
        Vector eval =
            theta_next + (k1 - 1.0) / (k1 + 2.0) * (theta_next - theta_);
        theta_ = theta_next;
        ++k_;
        return eval;
      }
      case BaselineMethod::WNGrad: {
        if (k_ == 0) b_ = 1.0 / step_param_;
        const Vector next = point - (1.0 / b_) * grad;
        b_ += grad.squaredNorm() / b_;
        ++k_;
        return next;
      }
    }
    throw std::logic_error("StepRule: unhandled method");
  }

  void seed(const Vector& theta0) { theta_ = theta0; }

 private:
  BaselineMethod method_;
  double step_param_;
  long k_ = 0;
  double mu_ = 0.0;
  double lambda_ = 0.0;
  double omega_ = 0.0;
  double b_ = 0.0;
  Vector prev_point_;
  Vector prev_grad_;
  Vector theta_;  // momentum method only: the non-extrapolated iterate
};

}  // namespace

SolveReport run_baseline(const Problem& problem, const Vector& theta0,
                         const BaselineSpec& spec) {
  spec.validate();
  if (theta0.size() != problem.dimension())
    throw std::invalid_argument("run_baseline: starting point has wrong dimension");

  const long objective_before = problem.objective_evals();
  const long gradient_before = problem.gradient_evals();

  SolveReport report;
  StepRule rule(spec.method, spec.step_param);
  rule.seed(theta0);

  Vector point = theta0;
  Vector grad = problem.gradient(point);
  long k = 0;
  Termination termination = Termination::IterationBudget;
  while (true) {
    const double grad_norm = grad.norm();
    report.trace.push_back(
        {k, std::numeric_limits<double>::quiet_NaN(), grad_norm});
    if (!grad.allFinite()) {
      termination = Termination::NonFiniteValue;
      break;
    }
    if (grad_norm <= spec.grad_tol) {
      termination = Termination::GradientTolerance;
      break;
    }
    if (k >= spec.budget) {
      termination = Termination::IterationBudget;
      break;
    }
    point = rule.advance(point, grad);
    ++k;
    grad = problem.gradient(point);
  }

  report.final_iterate = point;
  report.iterations = k;
  report.termination = termination;
  report.objective_evals = problem.objective_evals() - objective_before;
  report.gradient_evals = problem.gradient_evals() - gradient_before;
  return report;
}

}  // namespace evstep
