#pragma once

#include <functional>
#include <string>
#include <vector>

#include "evstep/baselines.hpp"
#include "evstep/problem.hpp"
#include "evstep/segment_function.hpp"

// Objectives engineered so that objective-blind first-order methods climb
// instead of descend. Segment building blocks are concatenated along a
// strictly increasing breakpoint sequence chosen to coincide with the
// iterates a given method produces; each hand-off raises the objective while
// every gradient the method sees still points downhill locally.

namespace evstep {

/// Thrown when a breakpoint sequence fails to increase strictly.
struct NonIncreasingBreakpointsError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

/// Thrown when an engineered sequence is requested for a method that has no
/// supporting construction (the momentum method evaluates gradients off the
/// iterate sequence, so its evaluation points cannot be pinned in advance).
struct UnsupportedMethodError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

/**
 * One-dimensional objective made of segment building blocks laid end to end.
 *
 * Segment j spans [breakpoint(j), breakpoint(j+1)); its entry slope is
 * -descent(j) and its exit slope -descent(j+1), so adjacent segments join
 * with matching value and derivative. Vertical offsets accumulate in extended
 * precision so junction values stay consistent over thousands of segments.
 *
 * Construction is either finite (vectors of breakpoints and descent targets,
 * with linear extensions of slope -descent(0) to the left of the first
 * breakpoint and -descent(last) to the right of the last) or lazy (generator
 * callables indexed by segment, materialized on demand; evaluation right of
 * the covered range materializes further segments first). Lazy generators
 * must produce a strictly increasing, unbounded breakpoint sequence.
 */
class PiecewiseObjective {
 public:
  using Generator = std::function<double(long)>;

  PiecewiseObjective(std::vector<double> breakpoints,
                     std::vector<double> descents);
  PiecewiseObjective(Generator breakpoints, Generator descents);

  double value(double theta) const;
  double slope(double theta) const;

  double breakpoint(long j) const;      ///< materializes through j if lazy
  double descent_target(long j) const;  ///< materializes through j if lazy
  double offset(long j) const;          ///< objective value at breakpoint(j)
  long materialized() const { return static_cast<long>(phis_.size()); }
  bool lazy() const { return static_cast<bool>(phi_gen_); }

 private:
  void append_segment(double phi, double d) const;
  void ensure_index(long j) const;
  void ensure_cover(double theta) const;

  mutable std::vector<double> phis_;
  mutable std::vector<double> descents_;
  mutable std::vector<double> offsets_;
  mutable long double offset_acc_ = 0.0L;
  mutable long double offset_carry_ = 0.0L;
  Generator phi_gen_;
  Generator descent_gen_;
};

/// Validating convenience constructor for the finite form.
PiecewiseObjective build_divergence_objective(std::vector<double> breakpoints,
                                              std::vector<double> descents);

/// One-dimensional Problem adapter around a PiecewiseObjective.
class PiecewiseProblem final : public Problem {
 public:
  explicit PiecewiseProblem(PiecewiseObjective objective)
      : Problem(1), objective_(std::move(objective)) {}

  const PiecewiseObjective& curve() const { return objective_; }

 private:
  double evaluate_objective(const Vector& theta) const override {
    return objective_.value(theta[0]);
  }
  Vector evaluate_gradient(const Vector& theta) const override {
    Vector g(1);
    g[0] = objective_.slope(theta[0]);
    return g;
  }

  PiecewiseObjective objective_;
};

/**
 * The engineered gradient magnitudes and the iterates a method run against
 * them produces, starting from 0.
 *
 * descents[k] is the magnitude of the downhill slope the method sees on its
 * k-th gradient evaluation; iterates[k] is where that evaluation happens.
 * Both sequences have horizon + 2 entries so the iterates can double as the
 * breakpoints of an objective that stays ahead of the run by one segment.
 */
struct AdversarialSequences {
  BaselineMethod method = BaselineMethod::FixedStep;
  double step_param = 1.0;
  std::vector<double> descents;
  std::vector<double> iterates;
};

/// Build the engineered sequences for one method. The iterates are obtained
/// by running the actual method implementation against a scripted gradient
/// stream, so an objective built on them reproduces the same run bit for bit.
/// Throws UnsupportedMethodError for the momentum method.
AdversarialSequences adversarial_sequences(BaselineMethod method,
                                           double step_param, long horizon);

/// Closed-form counterpart of adversarial_sequences: descents[k] is the
/// engineered slope magnitude and iterates[k] the predicted position of the
/// method's k-th iterate (e.g. k * step for the fixed-step method). `count`
/// entries of each are materialized. Throws UnsupportedMethodError for the
/// momentum method.
struct AdversarialRow {
  BaselineMethod method = BaselineMethod::FixedStep;
  double step_param = 1.0;
  std::vector<double> descents;
  std::vector<double> iterates;
};

AdversarialRow adversarial_row(BaselineMethod method, double step_param,
                               long count);

/// Outcome of replaying a method on its engineered objective and checking
/// the anti-convergence properties.
struct DivergenceCheck {
  bool ok = true;
  std::string failure;  ///< first violated property, empty when ok
  std::vector<double> iterates;
  std::vector<double> objectives;
  std::vector<double> grad_norms;
  double max_iterate_error = 0.0;  ///< vs. closed form, relative to max(1, |.|)
  double min_growth_margin = 0.0;  ///< min over k of F(theta_k) - (theta_k - theta_0) / 2
  double min_grad_norm = 0.0;
};

/// Build the engineered objective for `method`, run the method on it for
/// `horizon` steps from 0, and verify: iterates match the closed-form
/// prediction to 1e-9 (relative to max(1, |prediction|)), objective values
/// grow at least half as fast as the iterates, and gradient magnitudes never
/// fall below the smallest engineered slope.
DivergenceCheck verify_anti_convergence(BaselineMethod method,
                                        double step_param, long horizon);

}  // namespace evstep
