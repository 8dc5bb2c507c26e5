#include "evstep/problem.hpp"

#include <cmath>

namespace evstep {

const char* termination_name(Termination t) {
  switch (t) {
    case Termination::GradientTolerance: return "gradient_tolerance";
    case Termination::IterationBudget: return "iteration_budget";
    case Termination::NonFiniteValue: return "non_finite_value";
  }
  return "unknown";
}

Vector finite_difference_gradient(const Problem& problem, const Vector& point,
                                  double h) {
  if (!(h > 0.0))
    throw std::invalid_argument("finite_difference_gradient: h must be > 0");
  if (point.size() != problem.dimension())
    throw std::invalid_argument(
        "finite_difference_gradient: point size does not match problem");

  Vector grad(point.size());
  Vector probe = point;
  for (Index i = 0; i < point.size(); ++i) {
    const double saved = probe[i];
    probe[i] = saved + h;
    const double above = problem.objective(probe);
    probe[i] = saved - h;
    const double below = problem.objective(probe);
    probe[i] = saved;
    if (!std::isfinite(above) || !std::isfinite(below))
      throw NonFiniteObjectiveError(
          "finite_difference_gradient: non-finite objective in stencil at "
          "component " + std::to_string(i));
    grad[i] = (above - below) / (2.0 * h);
  }
  return grad;
}

}  // namespace evstep
