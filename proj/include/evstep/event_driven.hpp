#pragma once

#include <optional>
#include <utility>

#include "evstep/problem.hpp"

// Gradient descent with event-driven objective evaluations.
//
// The solver runs cheap gradient steps in an inner loop and only evaluates
// the objective when a triggering event fires: the iterate leaves a trust
// radius around the anchor point, the gradient norm leaves an adaptive band,
// or the inner loop hits its length cap. At that point a relaxed descent test
// against the anchor decides whether to accept the wandered iterate; both
// test outcomes adapt the solver state (step-size scaling and gradient band)
// for the next round. The result is a line-search-like guarantee, objective
// values along accepted iterates never increase, at a near-objective-free
// evaluation cost: exactly one objective evaluation per outer iteration plus
// the one taken at initialization.

namespace evstep {

/// Thrown when a trigger is resolved against a NaN anchor objective, which
/// the solver never produces itself (NaN candidates are rejected, so anchors
/// stay finite).
struct NonFiniteStateError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Thrown by the Lipschitz estimator when the two iterates coincide.
struct DivisionByZeroError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct SolverParams {
  double grad_tol = 1e-6;       ///< stop once the anchor gradient norm falls here
  double armijo = 1e-4;         ///< relaxation factor in the acceptance test, in (0,1)
  double initial_scale = 1.0;   ///< starting step-size scaling
  double scale_cap = 1.0;       ///< scaling never grows beyond this
  double trigger_radius = 10.0; ///< trust radius around the anchor
  long max_inner = 100;         ///< inner-loop length cap
  long outer_budget = 1000000;  ///< cap on trigger resolutions
  long step_budget = 1000000000;///< cap on total inner gradient steps

  void validate() const;  // throws std::invalid_argument
};

/// Open interval of acceptable gradient norms; norms on or outside the
/// boundary fire a trigger.
struct GradientBand {
  double lower = 0.0;
  double upper = 0.0;
};

/// Band installed at initialization for a given anchor gradient norm.
GradientBand initial_band(double grad_norm);

/// Band installed after accepting an iterate whose gradient norm left the
/// previous band (or fell to its lower edge).
GradientBand reset_band(double grad_norm);

enum class TriggerReason {
  RadiusExceeded,       ///< iterate wandered out of the trust radius
  GradientOutsideBand,  ///< gradient norm left the open band
  MaxInnerIterations,   ///< inner loop hit its length cap
};

enum class AcceptDecision {
  Rejected,               ///< descent test failed (or candidate objective NaN)
  AcceptedLowGradient,    ///< accepted with gradient at or below the band floor
  AcceptedHighGradient,   ///< accepted with gradient at or above the band ceiling
  AcceptedInterior,       ///< accepted with gradient strictly inside the band
};

const char* trigger_name(TriggerReason r);
const char* decision_name(AcceptDecision d);

/// Solver state between outer iterations. The objective value and gradient at
/// the anchor are cached; the solver never re-evaluates either at an anchor.
struct OuterState {
  Vector theta;                      ///< anchor iterate
  double scale = 1.0;                ///< current step-size scaling
  GradientBand band;
  double lipschitz_estimate = 1.0;   ///< local curvature estimate carried across loops
  double objective_value = 0.0;      ///< cached objective at theta
  Vector gradient;                   ///< cached gradient at theta
  long outer_index = 0;
  bool last_rejected = false;        ///< whether the previous resolution rejected
};

/// What an inner loop hands back when a trigger fires.
struct InnerLoopResult {
  Vector terminal_point;
  Vector terminal_gradient;
  long terminal_index = 0;      ///< inner index j at which the trigger fired
  double first_step_size = 0.0; ///< step size computed at the anchor (j = 0)
  TriggerReason trigger = TriggerReason::MaxInnerIterations;
  double lipschitz_estimate = 1.0;  ///< estimate at the terminal iterate
};

/// Running tallies for the step sizes an inner loop computes.
struct InnerLoopStats {
  long steps = 0;
  double min_step_size = std::numeric_limits<double>::infinity();
  double max_step_size = 0.0;
  long step_bound_violations = 0;  ///< computed sizes outside [1e-16, 1e-16 + 1e16]
};

/// Adaptive step size from the gradient norm, the local curvature estimate
/// and the band floor. Guarded so the result always lies in
/// [1e-16, 1e-16 + 1e16] for any non-negative inputs.
double compute_step_size(double grad_norm, double lipschitz_estimate,
                         double band_lower);

/// Trigger test for inner iterate `psi` at inner index `inner_index` >= 1,
/// checked in order: radius, band, loop cap. The anchor itself (j = 0) is
/// never checked.
std::optional<TriggerReason> check_trigger(const Vector& psi,
                                           const Vector& theta,
                                           double grad_norm_at_psi,
                                           long inner_index,
                                           const GradientBand& band,
                                           const SolverParams& params);

/// Local curvature estimate: 1 on the very first inner iterate of the run,
/// the carried estimate at the start of later inner loops, and otherwise the
/// difference quotient |grad - previous_grad| / |point - previous_point|,
/// taken alone after an accepted outer iteration and combined with max
/// against the previous estimate after a rejected one. Throws
/// DivisionByZeroError when the two points coincide.
double update_lipschitz_estimate(long inner_index, long outer_index,
                                 const Vector& point,
                                 const Vector& previous_point,
                                 const Vector& grad,
                                 const Vector& previous_grad,
                                 double previous_estimate,
                                 bool last_outer_rejected);

/// Run one inner loop from the anchor in `state` until a trigger fires.
/// Returns std::nullopt if `step_allowance` gradient steps were exhausted
/// first (the harness budget, not an algorithmic event). Throws
/// NonFiniteGradientError if a gradient evaluation comes back non-finite.
std::optional<InnerLoopResult> run_inner_loop(
    const Problem& problem, const OuterState& state, const SolverParams& params,
    long step_allowance = std::numeric_limits<long>::max(),
    InnerLoopStats* stats = nullptr);

/// Resolve a fired trigger: accept or reject the terminal iterate and adapt
/// scale and band. The outer index always advances.
std::pair<OuterState, AcceptDecision> resolve_trigger(
    const OuterState& state, const InnerLoopResult& result,
    double objective_at_terminal, const SolverParams& params);

/// Full solve loop. Evaluates the objective exactly once at initialization
/// and once per outer iteration, never anywhere else.
SolveReport solve(const Problem& problem, const Vector& theta0,
                  const SolverParams& params);

}  // namespace evstep
