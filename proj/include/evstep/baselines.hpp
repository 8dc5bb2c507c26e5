#pragma once

#include <string>

#include "evstep/problem.hpp"

// Objective-function-free first-order baselines. Each method consumes only
// gradients while it runs; the objective is never evaluated inside the loop,
// so every report they produce has objective_evals == 0.

namespace evstep {

enum class BaselineMethod {
  FixedStep,            ///< constant step size
  DiminishingStep,      ///< step size halves on a doubling schedule
  BarzilaiBorweinLong,  ///< |dx|^2 / (dx . dg) secant step
  BarzilaiBorweinShort, ///< (dx . dg) / |dg|^2 secant step
  LipschitzApprox,      ///< step adapted from a local curvature bound
  Nesterov,             ///< constant step with momentum extrapolation
  WNGrad,               ///< step 1/b_k with b_k grown by squared gradients
};

/// Canonical command-line identifier for a method ("fixed", "bb-long", ...).
const char* method_name(BaselineMethod m);

/// Inverse of method_name; throws std::invalid_argument on unknown names.
BaselineMethod method_from_name(const std::string& name);

struct BaselineSpec {
  BaselineMethod method = BaselineMethod::FixedStep;
  double step_param = 1.0;  ///< step size, initial step, or 1/b_0 depending on method
  long budget = 1000;       ///< maximum gradient steps
  double grad_tol = 0.0;    ///< stop once the gradient norm falls here; 0 disables

  void validate() const;  // throws std::invalid_argument
};

/// Multiplier applied to the base step at iteration k under the diminishing
/// schedule: 1 for k < 100, then 1/2 on [100, 200), 1/4 on [200, 400),
/// halving each time the iteration count doubles.
double diminishing_factor(long k);

/// Run `spec.method` from `theta0`. The trace records the gradient norm at
/// every evaluation point (objective entries stay NaN); for the momentum
/// method the evaluation points are the extrapolated ones and the final
/// iterate is the last evaluation point. Gradient evaluations never exceed
/// budget + 1.
SolveReport run_baseline(const Problem& problem, const Vector& theta0,
                         const BaselineSpec& spec);

}  // namespace evstep
