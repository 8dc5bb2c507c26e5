#pragma once

#include <Eigen/Core>

#include <functional>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

namespace evstep {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;
using Index = Eigen::Index;

/// Thrown when a finite-difference stencil touches a point where the objective
/// is NaN or infinite.
struct NonFiniteObjectiveError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Thrown by solvers when a gradient evaluation comes back NaN or infinite;
/// callers translate this into a NonFiniteValue termination.
struct NonFiniteGradientError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/**
 * Evaluation interface shared by every solver in this library.
 *
 * A problem is immutable after construction except for the evaluation
 * counters, which are bumped on every call made through `objective` and
 * `gradient`. The counters are the ground truth for the evaluation-economy
 * guarantees the solvers advertise, so solvers and the experiment harness
 * must route every evaluation through this interface. Counters are not
 * synchronized; concurrent runs must use separate instances.
 */
class Problem {
 public:
  explicit Problem(Index dimension) : dimension_(dimension) {
    if (dimension <= 0)
      throw std::invalid_argument("Problem: dimension must be positive");
  }
  virtual ~Problem() = default;

  Index dimension() const { return dimension_; }

  /// Evaluate the objective at `theta`. NaN propagates, it is never clamped.
  double objective(const Vector& theta) const {
    ++objective_evals_;
    return evaluate_objective(theta);
  }

  /// Evaluate the gradient at `theta`; the result always has `dimension()`
  /// entries. Non-finite entries propagate to the caller.
  Vector gradient(const Vector& theta) const {
    ++gradient_evals_;
    Vector g = evaluate_gradient(theta);
    if (g.size() != dimension_)
      throw std::logic_error("Problem: gradient size does not match dimension");
    return g;
  }

  long objective_evals() const { return objective_evals_; }
  long gradient_evals() const { return gradient_evals_; }
  void reset_counters() const { objective_evals_ = 0; gradient_evals_ = 0; }

 protected:
  virtual double evaluate_objective(const Vector& theta) const = 0;
  virtual Vector evaluate_gradient(const Vector& theta) const = 0;

 private:
  Index dimension_;
  mutable long objective_evals_ = 0;
  mutable long gradient_evals_ = 0;
};

/// Adapter wrapping plain callables as a Problem; used by tests and toys.
class FunctionProblem final : public Problem {
 public:
  FunctionProblem(Index dimension,
                  std::function<double(const Vector&)> objective,
                  std::function<Vector(const Vector&)> gradient)
      : Problem(dimension),
        objective_(std::move(objective)),
        gradient_(std::move(gradient)) {}

 private:
  double evaluate_objective(const Vector& theta) const override {
    return objective_(theta);
  }
  Vector evaluate_gradient(const Vector& theta) const override {
    return gradient_(theta);
  }

  std::function<double(const Vector&)> objective_;
  std::function<Vector(const Vector&)> gradient_;
};

/// Decorator that records every point a wrapped problem is asked to
/// differentiate at, in call order. Evaluations are forwarded unchanged.
class RecordingProblem final : public Problem {
 public:
  explicit RecordingProblem(const Problem& inner)
      : Problem(inner.dimension()), inner_(inner) {}

  const std::vector<Vector>& gradient_points() const { return points_; }

 private:
  double evaluate_objective(const Vector& theta) const override {
    return inner_.objective(theta);
  }
  Vector evaluate_gradient(const Vector& theta) const override {
    points_.push_back(theta);
    return inner_.gradient(theta);
  }

  const Problem& inner_;
  mutable std::vector<Vector> points_;
};

enum class Termination {
  GradientTolerance,  ///< gradient norm fell to the requested tolerance
  IterationBudget,    ///< iteration or step budget exhausted
  NonFiniteValue,     ///< a NaN/Inf evaluation stopped the run
};

const char* termination_name(Termination t);

/// One row of a solver trajectory. `objective` is NaN when the solver did not
/// evaluate the objective at that iterate (the usual case for the baselines).
struct TracePoint {
  long iteration = 0;
  double objective = std::numeric_limits<double>::quiet_NaN();
  double grad_norm = std::numeric_limits<double>::quiet_NaN();
};

/// Outcome of one solver run.
struct SolveReport {
  Vector final_iterate;
  long iterations = 0;  ///< outer iterations (event-driven) or steps (baselines)
  long objective_evals = 0;
  long gradient_evals = 0;
  std::vector<TracePoint> trace;
  Termination termination = Termination::IterationBudget;

  // Extra diagnostics filled in by the event-driven solver.
  long gradient_steps = 0;  ///< total inner gradient steps across the run
  double min_step_size = std::numeric_limits<double>::infinity();
  double max_step_size = 0.0;
  long step_bound_violations = 0;
  long max_consecutive_rejections = 0;

  double start_objective() const {
    return trace.empty() ? std::numeric_limits<double>::quiet_NaN()
                         : trace.front().objective;
  }
  double end_objective() const {
    return trace.empty() ? std::numeric_limits<double>::quiet_NaN()
                         : trace.back().objective;
  }
  double start_grad_norm() const {
    return trace.empty() ? std::numeric_limits<double>::quiet_NaN()
                         : trace.front().grad_norm;
  }
  double end_grad_norm() const {
    return trace.empty() ? std::numeric_limits<double>::quiet_NaN()
                         : trace.back().grad_norm;
  }
};

/**
 * Central-difference gradient estimate: component i is
 * (F(x + h e_i) - F(x - h e_i)) / (2h).
 *
 * Costs 2 * dimension objective evaluations. Throws NonFiniteObjectiveError
 * if any stencil evaluation is NaN or infinite, and std::invalid_argument for
 * h <= 0.
 */
Vector finite_difference_gradient(const Problem& problem, const Vector& point,
                                  double h = 1e-6);

}  // namespace evstep
