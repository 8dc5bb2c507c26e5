#include "evstep/divergence.hpp"

#include <algorithm>
#include <cmath>

namespace evstep {

namespace {

constexpr long kMaxMaterialized = 100000000;

void check_sequences(const std::vector<double>& breakpoints,
                     const std::vector<double>& descents) {
  if (breakpoints.size() != descents.size())
    throw std::invalid_argument(
        "PiecewiseObjective: breakpoints and descents must have equal length");
  if (breakpoints.size() < 2)
    throw std::invalid_argument(
        "PiecewiseObjective: need at least two breakpoints");
}

}  // namespace

PiecewiseObjective::PiecewiseObjective(std::vector<double> breakpoints,
                                       std::vector<double> descents) {
  check_sequences(breakpoints, descents);
  phis_.reserve(breakpoints.size());
  descents_.reserve(breakpoints.size());
  offsets_.reserve(breakpoints.size());
  for (std::size_t j = 0; j < breakpoints.size(); ++j)
    append_segment(breakpoints[j], descents[j]);
}

PiecewiseObjective::PiecewiseObjective(Generator breakpoints,
                                       Generator descents)
    : phi_gen_(std::move(breakpoints)), descent_gen_(std::move(descents)) {
  if (!phi_gen_ || !descent_gen_)
    throw std::invalid_argument("PiecewiseObjective: null generator");
  ensure_index(1);
}

void PiecewiseObjective::append_segment(double phi, double d) const {
  if (!std::isfinite(phi) || !std::isfinite(d))
    throw std::invalid_argument(
        "PiecewiseObjective: breakpoints and descents must be finite");
  if (!phis_.empty()) {
    if (!(phi > phis_.back()))
      throw NonIncreasingBreakpointsError(
          "PiecewiseObjective: breakpoints must increase strictly");
    const double width = phi - phis_.back();
    const double end =
        segment_end_value(SegmentShape{width, descents_.back(), d});
    // Compensated accumulation in extended precision; offsets stay coherent
    // to within one double rounding over arbitrarily many segments.
    const long double y = static_cast<long double>(end) - offset_carry_;
    const long double t = offset_acc_ + y;
    offset_carry_ = (t - offset_acc_) - y;
    offset_acc_ = t;
  }
  phis_.push_back(phi);
  descents_.push_back(d);
  offsets_.push_back(static_cast<double>(offset_acc_));
}

void PiecewiseObjective::ensure_index(long j) const {
  if (j < 0) throw std::out_of_range("PiecewiseObjective: negative index");
  if (!phi_gen_) {
    if (j >= static_cast<long>(phis_.size()))
      throw std::out_of_range("PiecewiseObjective: index past the last segment");
    return;
  }
  while (static_cast<long>(phis_.size()) <= j) {
    const long next = static_cast<long>(phis_.size());
    if (next > kMaxMaterialized)
      throw std::runtime_error("PiecewiseObjective: segment limit exceeded");
    append_segment(phi_gen_(next), descent_gen_(next));
  }
}

void PiecewiseObjective::ensure_cover(double theta) const {
  ensure_index(1);
  if (!phi_gen_) return;
  while (phis_.back() < theta) {
    const long next = static_cast<long>(phis_.size());
    if (next > kMaxMaterialized)
      throw std::runtime_error("PiecewiseObjective: segment limit exceeded");
    append_segment(phi_gen_(next), descent_gen_(next));
  }
}

double PiecewiseObjective::value(double theta) const {
  ensure_cover(theta);
  if (theta < phis_.front())
    return -descents_.front() * (theta - phis_.front());
  if (theta > phis_.back())
    return offsets_.back() - descents_.back() * (theta - phis_.back());
  auto it = std::upper_bound(phis_.begin(), phis_.end(), theta);
  long j = static_cast<long>(it - phis_.begin()) - 1;
  if (j == static_cast<long>(phis_.size()) - 1) --j;
  const SegmentShape shape{phis_[j + 1] - phis_[j], descents_[j],
                           descents_[j + 1]};
  return offsets_[j] + segment_value(theta - phis_[j], shape);
}

double PiecewiseObjective::slope(double theta) const {
  ensure_cover(theta);
  if (theta < phis_.front()) return -descents_.front();
  if (theta > phis_.back()) return -descents_.back();
  auto it = std::upper_bound(phis_.begin(), phis_.end(), theta);
  long j = static_cast<long>(it - phis_.begin()) - 1;
  if (j == static_cast<long>(phis_.size()) - 1) --j;
  const SegmentShape shape{phis_[j + 1] - phis_[j], descents_[j],
                           descents_[j + 1]};
  const double x = theta - phis_[j];
  const Side side = x == shape.width ? Side::Left : Side::Right;
  return segment_slope(x, shape, side);
}

double PiecewiseObjective::breakpoint(long j) const {
  ensure_index(j);
  return phis_[j];
}

double PiecewiseObjective::descent_target(long j) const {
  ensure_index(j);
  return descents_[j];
}

double PiecewiseObjective::offset(long j) const {
  ensure_index(j);
  return offsets_[j];
}

PiecewiseObjective build_divergence_objective(std::vector<double> breakpoints,
                                              std::vector<double> descents) {
  return PiecewiseObjective(std::move(breakpoints), std::move(descents));
}

namespace {

// One-dimensional problem whose k-th gradient call returns the scripted
// slope -script[k] no matter where it is evaluated, recording the point.
// Running a baseline against it recovers the iterates the same method will
// produce on any objective whose slope at those iterates matches the script.
class ScriptedGradientProblem final : public Problem {
 public:
  explicit ScriptedGradientProblem(std::vector<double> script)
      : Problem(1), script_(std::move(script)) {}

  const std::vector<double>& points() const { return points_; }

 private:
  double evaluate_objective(const Vector&) const override { return 0.0; }
  Vector evaluate_gradient(const Vector& theta) const override {
    if (calls_ >= script_.size())
      throw std::logic_error("ScriptedGradientProblem: script exhausted");
    points_.push_back(theta[0]);
    Vector g(1);
    g[0] = -script_[calls_++];
    return g;
  }

  std::vector<double> script_;
  mutable std::size_t calls_ = 0;
  mutable std::vector<double> points_;
};

std::vector<double> descent_script(BaselineMethod method, long count) {
  std::vector<double> script(count);
  switch (method) {
    case BaselineMethod::FixedStep:
    case BaselineMethod::DiminishingStep:
    case BaselineMethod::WNGrad:
      std::fill(script.begin(), script.end(), 1.0);
      break;
    case BaselineMethod::BarzilaiBorweinLong:
    case BaselineMethod::BarzilaiBorweinShort:
      for (long k = 0; k < count; ++k)
        script[k] = std::ldexp(1.0, static_cast<int>(-k));
      break;
    case BaselineMethod::LipschitzApprox: {
      const double root5 = std::sqrt(5.0);
      const double ratio = root5 / (root5 - 1.0);
      double value = 1.0;
      for (long k = 0; k < count; ++k) {
        script[k] = value;
        value *= ratio;
      }
      break;
    }
    case BaselineMethod::Nesterov:
      throw UnsupportedMethodError(
          "adversarial_sequences: momentum evaluates gradients away from its "
          "iterates, no pinned construction exists");
  }
  return script;
}

}  // namespace

AdversarialSequences adversarial_sequences(BaselineMethod method,
                                           double step_param, long horizon) {
  if (horizon < 0)
    throw std::invalid_argument("adversarial_sequences: horizon must be >= 0");
  AdversarialSequences seq;
  seq.method = method;
  seq.step_param = step_param;
  seq.descents = descent_script(method, horizon + 2);

  ScriptedGradientProblem script(seq.descents);
  BaselineSpec spec;
  spec.method = method;
  spec.step_param = step_param;
  spec.budget = horizon + 1;
  spec.grad_tol = 0.0;
  Vector theta0 = Vector::Zero(1);
  run_baseline(script, theta0, spec);

  seq.iterates.reserve(script.points().size());
  for (double p : script.points()) seq.iterates.push_back(p);
  return seq;
}

AdversarialRow adversarial_row(BaselineMethod method, double step_param,
                               long count) {
  if (count < 0)
    throw std::invalid_argument("adversarial_row: count must be >= 0");
  AdversarialRow row;
  row.method = method;
  row.step_param = step_param;
  row.descents = descent_script(method, count);
  row.iterates.resize(count);

  double value = 0.0;
  double term = 1.0;
  double b = 1.0 / step_param;
  for (long k = 0; k < count; ++k) {
    row.iterates[k] = value;
    switch (method) {
      case BaselineMethod::FixedStep:
      case BaselineMethod::BarzilaiBorweinLong:
      case BaselineMethod::BarzilaiBorweinShort:
        value += step_param;
        break;
      case BaselineMethod::DiminishingStep:
        value += step_param * diminishing_factor(k);
        break;
      case BaselineMethod::LipschitzApprox:
        value += step_param * term;
        term *= std::sqrt(5.0) / 2.0;
        break;
      case BaselineMethod::WNGrad:
        value += 1.0 / b;
        b += 1.0 / b;
        break;
      case BaselineMethod::Nesterov:
        break;  // descent_script already rejected this
    }
  }
  return row;
}

DivergenceCheck verify_anti_convergence(BaselineMethod method,
                                        double step_param, long horizon) {
  AdversarialSequences seq = adversarial_sequences(method, step_param, horizon);
  PiecewiseProblem problem(
      build_divergence_objective(seq.iterates, seq.descents));
  RecordingProblem recorder(problem);

  BaselineSpec spec;
  spec.method = method;
  spec.step_param = step_param;
  spec.budget = horizon;
  spec.grad_tol = 0.0;
  Vector theta0 = Vector::Zero(1);
  SolveReport report = run_baseline(recorder, theta0, spec);

  DivergenceCheck check;
  check.min_growth_margin = std::numeric_limits<double>::infinity();
  check.min_grad_norm = std::numeric_limits<double>::infinity();

  const auto& points = recorder.gradient_points();
  check.iterates.reserve(points.size());
  check.objectives.reserve(points.size());
  check.grad_norms.reserve(points.size());

  double min_scripted = std::numeric_limits<double>::infinity();
  for (long k = 0; k <= horizon; ++k)
    min_scripted = std::min(min_scripted, std::abs(seq.descents[k]));

  auto record_failure = [&check](const std::string& what) {
    if (check.ok) {
      check.ok = false;
      check.failure = what;
    }
  };

  if (static_cast<long>(points.size()) != horizon + 1)
    record_failure("run evaluated an unexpected number of gradients");

  const AdversarialRow row = adversarial_row(
      method, step_param, static_cast<long>(points.size()));
  const double origin = points.empty() ? 0.0 : points.front()[0];
  for (long k = 0; k < static_cast<long>(points.size()); ++k) {
    const double theta = points[k][0];
    const double predicted = row.iterates[k];
    const double objective = problem.curve().value(theta);
    const double grad_norm = report.trace[k].grad_norm;

    check.iterates.push_back(theta);
    check.objectives.push_back(objective);
    check.grad_norms.push_back(grad_norm);

    const double error =
        std::abs(theta - predicted) / std::max(1.0, std::abs(predicted));
    check.max_iterate_error = std::max(check.max_iterate_error, error);
    if (!(error <= 1e-9))
      record_failure("iterate " + std::to_string(k) +
                     " deviates from the closed-form prediction");

    const double margin = objective - (theta - origin) / 2.0;
    check.min_growth_margin = std::min(check.min_growth_margin, margin);
    if (!(margin >= 0.0))
      record_failure("objective at iterate " + std::to_string(k) +
                     " fell below half the displacement");

    check.min_grad_norm = std::min(check.min_grad_norm, grad_norm);
    if (!(grad_norm >= min_scripted))
      record_failure("gradient at iterate " + std::to_string(k) +
                     " fell below the engineered floor");
  }
  return check;
}

}  // namespace evstep
