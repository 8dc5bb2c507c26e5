#include "evstep/quasi_likelihood.hpp"

#include <cmath>

namespace evstep {

namespace {

constexpr double kTwoPi = 6.283185307179586476925286766559;
constexpr double kVarianceExponent = 4.5;  // 2p with p = 2.25

}  // namespace

double logistic_link(double eta) {
  if (eta >= 0.0) return 1.0 / (1.0 + std::exp(-eta));
  const double e = std::exp(eta);
  return e / (1.0 + e);
}

double logistic_derivative(double eta) {
  const double e = std::exp(-std::abs(eta));
  const double denom = 1.0 + e;
  return e / (denom * denom);
}

double variance_value(VarianceFunction v, double mu) {
  switch (v) {
    case VarianceFunction::V1:
      return 1.0 + mu + std::sin(kTwoPi * mu);
    case VarianceFunction::V2:
      return std::pow(std::abs(mu), kVarianceExponent) + 1.0;
    case VarianceFunction::V3:
      return std::exp(std::pow(std::abs(mu - 1.0), kVarianceExponent));
    case VarianceFunction::V4:
      return std::log(std::pow(std::abs(mu - 1.0), kVarianceExponent) + 1.0) +
             1.0;
  }
  throw std::logic_error("variance_value: unhandled variance function");
}

const char* variance_name(VarianceFunction v) {
  switch (v) {
    case VarianceFunction::V1: return "v1";
    case VarianceFunction::V2: return "v2";
    case VarianceFunction::V3: return "v3";
    case VarianceFunction::V4: return "v4";
  }
  return "unknown";
}

VarianceFunction variance_from_name(const std::string& name) {
  if (name == "v1") return VarianceFunction::V1;
  if (name == "v2") return VarianceFunction::V2;
  if (name == "v3") return VarianceFunction::V3;
  if (name == "v4") return VarianceFunction::V4;
  throw std::invalid_argument("unknown variance function: " + name);
}

QLProblem::QLProblem(Matrix X, Vector y, VarianceFunction variance,
                     QuadratureConfig quadrature)
    : Problem(X.cols()),
      X_(std::move(X)),
      y_(std::move(y)),
      variance_(variance),
      quadrature_(quadrature) {
  quadrature_.validate();
  if (X_.rows() == 0)
    throw std::invalid_argument("QLProblem: design matrix has no rows");
  if (y_.size() != X_.rows())
    throw std::invalid_argument(
        "QLProblem: response length does not match design rows");
  for (Index i = 0; i < X_.rows(); ++i)
    if (X_(i, 0) != 1.0)
      throw std::invalid_argument(
          "QLProblem: first design column must be identically 1");
  for (int i = 0; i < 1000; ++i) {
    const double mu = (i + 0.5) / 1000.0;
    if (!(variance_value(variance_, mu) > 0.0))
      throw std::invalid_argument(
          "QLProblem: variance function is not positive on (0,1)");
  }
}

double QLProblem::evaluate_objective(const Vector& theta) const {
  const Vector eta = X_ * theta;
  double total = 0.0;
  bool failed = false;
  for (Index i = 0; i < X_.rows(); ++i) {
    // An infinite predictor saturates the link to exactly 0 or 1 and the
    // integral limit with it; only NaN is unrecoverable.
    if (std::isnan(eta[i])) {
      ++quadrature_failures_;
      failed = true;
      continue;
    }
    const double upper = logistic_link(eta[i]);
    const double yi = y_[i];
    const VarianceFunction v = variance_;
    const QuadratureResult q = integrate(
        [yi, v](double mu) { return (yi - mu) / variance_value(v, mu); }, 0.0,
        upper, quadrature_);
    quadrature_nodes_ += q.nodes;
    if (!q.converged) {
      ++quadrature_failures_;
      failed = true;
      continue;
    }
    total += q.value;
  }
  if (failed) return std::numeric_limits<double>::quiet_NaN();
  return -total;
}

Vector QLProblem::evaluate_gradient(const Vector& theta) const {
  const Vector eta = X_ * theta;
  Vector weights(X_.rows());
  for (Index i = 0; i < X_.rows(); ++i) {
    const double g = logistic_link(eta[i]);
    weights[i] =
        (y_[i] - g) / variance_value(variance_, g) * logistic_derivative(eta[i]);
  }
  return -(X_.transpose() * weights);
}

}  // namespace evstep
