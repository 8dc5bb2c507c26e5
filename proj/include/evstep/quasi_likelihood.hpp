#pragma once

#include <string>

#include "evstep/problem.hpp"
#include "evstep/quadrature.hpp"

// Quasi-likelihood estimation with a logistic link: the objective integrates
// (y - mu) / V(mu) from 0 to the predicted mean and is expensive, while the
// gradient is available in closed form and cheap. The asymmetry is what the
// event-driven solver exploits.

namespace evstep {

/// Numerically stable logistic function, in (0,1) for finite input and
/// saturating to exactly 0/1 for large |eta|.
double logistic_link(double eta);

/// Derivative of the logistic function, g(eta) * (1 - g(eta)), evaluated
/// stably.
double logistic_derivative(double eta);

/// Mean-variance relationships, all strictly positive on (0,1):
///   V1: 1 + mu + sin(2 pi mu)
///   V2: |mu|^4.5 + 1
///   V3: exp(|mu - 1|^4.5)
///   V4: log(|mu - 1|^4.5 + 1) + 1
enum class VarianceFunction { V1, V2, V3, V4 };

double variance_value(VarianceFunction v, double mu);

/// Short identifier: "v1".."v4".
const char* variance_name(VarianceFunction v);

/// Inverse of variance_name; throws std::invalid_argument on unknown names.
VarianceFunction variance_from_name(const std::string& name);

/**
 * The estimation objective
 *
 *   F(theta) = -sum_i integral_0^{g(x_i . theta)} (y_i - mu) / V(mu) dmu
 *
 * with gradient -sum_i (y_i - g_i) / V(g_i) * g_i (1 - g_i) * x_i, which
 * needs no integration. A quadrature that exhausts its depth budget makes the
 * whole objective NaN and bumps quadrature_failures; node counts accumulate
 * in quadrature_nodes. Construction validates that the first design column is
 * identically 1 and that the variance function is positive across (0,1).
 */
class QLProblem final : public Problem {
 public:
  QLProblem(Matrix X, Vector y, VarianceFunction variance,
            QuadratureConfig quadrature = {});

  VarianceFunction variance() const { return variance_; }
  const Matrix& design() const { return X_; }
  const Vector& response() const { return y_; }
  long quadrature_nodes() const { return quadrature_nodes_; }
  long quadrature_failures() const { return quadrature_failures_; }

 private:
  double evaluate_objective(const Vector& theta) const override;
  Vector evaluate_gradient(const Vector& theta) const override;

  Matrix X_;
  Vector y_;
  VarianceFunction variance_;
  QuadratureConfig quadrature_;
  mutable long quadrature_nodes_ = 0;
  mutable long quadrature_failures_ = 0;
};

}  // namespace evstep
