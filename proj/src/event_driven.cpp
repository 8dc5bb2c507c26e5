#include "evstep/event_driven.hpp"

#include <algorithm>
#include <cmath>

namespace evstep {

namespace {

constexpr double kTiny = 1e-16;
constexpr double kStepLowerBound = 1e-16;
constexpr double kStepUpperBound = 1e-16 + 1e16;

void note_step_size(InnerLoopStats* stats, double alpha) {
  if (!stats) return;
  stats->min_step_size = std::min(stats->min_step_size, alpha);
  stats->max_step_size = std::max(stats->max_step_size, alpha);
  if (!(alpha >= kStepLowerBound && alpha <= kStepUpperBound))
    ++stats->step_bound_violations;
}

}  // namespace

void SolverParams::validate() const {
  if (!(grad_tol >= 0.0))
    throw std::invalid_argument("SolverParams: grad_tol must be >= 0");
  if (!(armijo > 0.0 && armijo < 1.0))
    throw std::invalid_argument("SolverParams: armijo must lie in (0, 1)");
  if (!(scale_cap > 0.0))
    throw std::invalid_argument("SolverParams: scale_cap must be positive");
  if (!(initial_scale > 0.0 && initial_scale <= scale_cap))
    throw std::invalid_argument(
        "SolverParams: initial_scale must lie in (0, scale_cap]");
  if (!(trigger_radius > 0.0))
    throw std::invalid_argument("SolverParams: trigger_radius must be positive");
  if (max_inner < 1)
    throw std::invalid_argument("SolverParams: max_inner must be >= 1");
  if (outer_budget < 0)
    throw std::invalid_argument("SolverParams: outer_budget must be >= 0");
  if (step_budget < 0)
    throw std::invalid_argument("SolverParams: step_budget must be >= 0");
}

GradientBand initial_band(double grad_norm) {
  return {grad_norm / std::sqrt(2.0), std::sqrt(10.0) * grad_norm};
}

GradientBand reset_band(double grad_norm) {
  const double lower = grad_norm / std::sqrt(2.0);
  return {lower, std::sqrt(20.0) * lower};
}

const char* trigger_name(TriggerReason r) {
  switch (r) {
    case TriggerReason::RadiusExceeded: return "RadiusExceeded";
    case TriggerReason::GradientOutsideBand: return "GradientOutsideBand";
    case TriggerReason::MaxInnerIterations: return "MaxInnerIterations";
  }
  return "Unknown";
}

const char* decision_name(AcceptDecision d) {
  switch (d) {
    case AcceptDecision::Rejected: return "Rejected";
    case AcceptDecision::AcceptedLowGradient: return "AcceptedLowGradient";
    case AcceptDecision::AcceptedHighGradient: return "AcceptedHighGradient";
    case AcceptDecision::AcceptedInterior: return "AcceptedInterior";
  }
  return "Unknown";
}

double compute_step_size(double grad_norm, double lipschitz_estimate,
                         double band_lower) {
  const double gn2 = grad_norm * grad_norm;
  const double c1 = gn2 * grad_norm + 0.5 * gn2 * lipschitz_estimate + kTiny;
  const double c2 = grad_norm + 0.5 * lipschitz_estimate + kTiny;
  return std::min(band_lower * band_lower / c1, 1.0 / c2) + kTiny;
}

std::optional<TriggerReason> check_trigger(const Vector& psi,
                                           const Vector& theta,
                                           double grad_norm_at_psi,
                                           long inner_index,
                                           const GradientBand& band,
                                           const SolverParams& params) {
  if ((psi - theta).norm() > params.trigger_radius)
    return TriggerReason::RadiusExceeded;
  if (!(grad_norm_at_psi > band.lower && grad_norm_at_psi < band.upper))
    return TriggerReason::GradientOutsideBand;
  if (inner_index >= params.max_inner)
    return TriggerReason::MaxInnerIterations;
  return std::nullopt;
}

double update_lipschitz_estimate(long inner_index, long outer_index,
                                 const Vector& point,
                                 const Vector& previous_point,
                                 const Vector& grad,
                                 const Vector& previous_grad,
                                 double previous_estimate,
                                 bool last_outer_rejected) {
  if (inner_index == 0)
    return outer_index == 0 ? 1.0 : previous_estimate;
  const double spread = (point - previous_point).norm();
  if (spread == 0.0)
    throw DivisionByZeroError(
        "update_lipschitz_estimate: iterates coincide");
  const double ratio = (grad - previous_grad).norm() / spread;
  if (!last_outer_rejected) return ratio;
  return std::max(ratio, previous_estimate);
}

std::optional<InnerLoopResult> run_inner_loop(const Problem& problem,
                                              const OuterState& state,
                                              const SolverParams& params,
                                              long step_allowance,
                                              InnerLoopStats* stats) {
  Vector psi = state.theta;
  Vector grad = state.gradient;
  double estimate = update_lipschitz_estimate(
      0, state.outer_index, psi, psi, grad, grad, state.lipschitz_estimate,
      state.last_rejected);
  double alpha = compute_step_size(grad.norm(), estimate, state.band.lower);
  const double alpha0 = alpha;
  note_step_size(stats, alpha);

  long j = 0;
  long steps = 0;
  while (true) {
    if (steps >= step_allowance) return std::nullopt;
    Vector next = psi - state.scale * alpha * grad;
    ++j;
    ++steps;
    if (stats) stats->steps = steps;
    Vector next_grad = problem.gradient(next);
    if (!next_grad.allFinite())
      throw NonFiniteGradientError("run_inner_loop: non-finite gradient");
    if ((next - psi).norm() != 0.0) {
      estimate = update_lipschitz_estimate(j, state.outer_index, next, psi,
                                           next_grad, grad, estimate,
                                           state.last_rejected);
    }
    // A step so small it does not move the iterate (possible after many
    // scale halvings) keeps the current estimate instead of dividing by zero.
    psi = std::move(next);
    grad = std::move(next_grad);
    if (auto reason = check_trigger(psi, state.theta, grad.norm(), j,
                                    state.band, params)) {
      return InnerLoopResult{std::move(psi), std::move(grad), j,
                             alpha0,         *reason,         estimate};
    }
    alpha = compute_step_size(grad.norm(), estimate, state.band.lower);
    note_step_size(stats, alpha);
  }
}

std::pair<OuterState, AcceptDecision> resolve_trigger(
    const OuterState& state, const InnerLoopResult& result,
    double objective_at_terminal, const SolverParams& params) {
  if (std::isnan(state.objective_value))
    throw NonFiniteStateError("resolve_trigger: anchor objective is NaN");

  OuterState next = state;
  next.outer_index = state.outer_index + 1;
  next.lipschitz_estimate = result.lipschitz_estimate;

  const double gn_anchor = state.gradient.norm();
  const double threshold =
      state.objective_value -
      params.armijo * state.scale * result.first_step_size * gn_anchor *
          gn_anchor;
  if (std::isnan(objective_at_terminal) || objective_at_terminal >= threshold) {
    next.scale = 0.5 * state.scale;
    next.last_rejected = true;
    return {std::move(next), AcceptDecision::Rejected};
  }

  next.theta = result.terminal_point;
  next.gradient = result.terminal_gradient;
  next.objective_value = objective_at_terminal;
  next.last_rejected = false;
  const double gn_terminal = result.terminal_gradient.norm();
  if (gn_terminal <= state.band.lower) {
    next.band = reset_band(gn_terminal);
    return {std::move(next), AcceptDecision::AcceptedLowGradient};
  }
  next.scale = std::min(1.5 * state.scale, params.scale_cap);
  if (gn_terminal >= state.band.upper) {
    next.band = reset_band(gn_terminal);
    return {std::move(next), AcceptDecision::AcceptedHighGradient};
  }
  return {std::move(next), AcceptDecision::AcceptedInterior};
}

SolveReport solve(const Problem& problem, const Vector& theta0,
                  const SolverParams& params) {
  params.validate();
  if (theta0.size() != problem.dimension())
    throw std::invalid_argument("solve: starting point has wrong dimension");

  const long objective_before = problem.objective_evals();
  const long gradient_before = problem.gradient_evals();

  SolveReport report;
  OuterState state;
  state.theta = theta0;
  state.scale = params.initial_scale;
  state.gradient = problem.gradient(theta0);
  state.objective_value = problem.objective(theta0);

  double grad_norm = state.gradient.norm();
  state.band = initial_band(grad_norm);
  report.trace.push_back({0, state.objective_value, grad_norm});

  Termination termination = Termination::IterationBudget;
  long consecutive_rejections = 0;

  if (!state.gradient.allFinite() || std::isnan(state.objective_value)) {
    termination = Termination::NonFiniteValue;
  } else {
    while (true) {
      if (grad_norm <= params.grad_tol) {
        termination = Termination::GradientTolerance;
        break;
      }
      if (state.outer_index >= params.outer_budget ||
          report.gradient_steps >= params.step_budget) {
        termination = Termination::IterationBudget;
        break;
      }

      InnerLoopStats stats;
      std::optional<InnerLoopResult> inner;
      bool gradient_blew_up = false;
      try {
        inner = run_inner_loop(problem, state, params,
                               params.step_budget - report.gradient_steps,
                               &stats);
      } catch (const NonFiniteGradientError&) {
        gradient_blew_up = true;
      }
      report.gradient_steps += stats.steps;
      report.min_step_size = std::min(report.min_step_size, stats.min_step_size);
      report.max_step_size = std::max(report.max_step_size, stats.max_step_size);
      report.step_bound_violations += stats.step_bound_violations;
      if (gradient_blew_up) {
        termination = Termination::NonFiniteValue;
        break;
      }
      if (!inner) {
        termination = Termination::IterationBudget;
        break;
      }

      const double candidate_objective =
          problem.objective(inner->terminal_point);
      auto [next_state, decision] =
          resolve_trigger(state, *inner, candidate_objective, params);
      state = std::move(next_state);
      if (decision == AcceptDecision::Rejected) {
        ++consecutive_rejections;
        report.max_consecutive_rejections =
            std::max(report.max_consecutive_rejections, consecutive_rejections);
      } else {
        consecutive_rejections = 0;
      }
      grad_norm = state.gradient.norm();
      report.trace.push_back(
          {state.outer_index, state.objective_value, grad_norm});
    }
  }

  report.final_iterate = state.theta;
  report.iterations = state.outer_index;
  report.termination = termination;
  report.objective_evals = problem.objective_evals() - objective_before;
  report.gradient_evals = problem.gradient_evals() - gradient_before;
  return report;
}

}  // namespace evstep
