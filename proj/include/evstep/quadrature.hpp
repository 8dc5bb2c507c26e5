#pragma once

#include <functional>

// Deterministic adaptive quadrature used by the quasi-likelihood objective.

namespace evstep {

struct QuadratureConfig {
  double abs_tol = 1e-10;
  int max_depth = 50;

  void validate() const;  // throws std::invalid_argument
};

struct QuadratureResult {
  double value = 0.0;
  long nodes = 0;        ///< integrand evaluations
  bool converged = true; ///< false on depth exhaustion or a non-finite integrand
};

/// Integrate f over [a, b] (either orientation) by adaptive Simpson with
/// interval bisection and Richardson correction. A subinterval is accepted
/// when its refinement shifts the estimate by at most 15 times its share of
/// the tolerance. A non-finite integrand value stops refinement immediately
/// and yields value = NaN with converged = false; exhausting max_depth keeps
/// the best estimate but also clears converged.
QuadratureResult integrate(const std::function<double(double)>& f, double a,
                           double b, const QuadratureConfig& config = {});

}  // namespace evstep
