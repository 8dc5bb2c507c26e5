#include "doctest.h"

#include <cmath>
#include <limits>
#include <stdexcept>

#include "evstep/quasi_likelihood.hpp"
#include "evstep/quadrature.hpp"

using namespace evstep;

TEST_CASE("logistic link values") {
  CHECK(logistic_link(0.0) == 0.5);
  CHECK(logistic_link(36.7) == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(logistic_link(-36.7) == doctest::Approx(0.0).epsilon(1e-15));
  for (double eta : {0.3, 1.7, 5.0, 30.0}) {
    CHECK(logistic_link(-eta) ==
          doctest::Approx(1.0 - logistic_link(eta)).epsilon(1e-15));
  }
  CHECK(logistic_link(std::numeric_limits<double>::infinity()) == 1.0);
  CHECK(logistic_link(-std::numeric_limits<double>::infinity()) == 0.0);
  CHECK(logistic_derivative(0.0) == 0.25);
  CHECK(logistic_derivative(3.0) ==
        doctest::Approx(logistic_link(3.0) * (1.0 - logistic_link(3.0)))
            .epsilon(1e-12));
}

TEST_CASE("variance function table") {
  CHECK(variance_value(VarianceFunction::V1, 0.5) ==
        doctest::Approx(1.5).epsilon(1e-12));
  CHECK(variance_value(VarianceFunction::V2, 0.0) == 1.0);
  CHECK(variance_value(VarianceFunction::V2, 1.0) == 2.0);
  CHECK(variance_value(VarianceFunction::V3, 1.0) == 1.0);
  CHECK(variance_value(VarianceFunction::V4, 1.0) == 1.0);
  // V1 oscillates around 1 + mu.
  CHECK(variance_value(VarianceFunction::V1, 0.25) ==
        doctest::Approx(1.25 + std::sin(0.5 * 3.14159265358979323846))
            .epsilon(1e-12));
}

TEST_CASE("variance names round trip") {
  for (VarianceFunction v : {VarianceFunction::V1, VarianceFunction::V2,
                             VarianceFunction::V3, VarianceFunction::V4}) {
    CHECK(variance_from_name(variance_name(v)) == v);
  }
  CHECK_THROWS_AS(variance_from_name("v9"), std::invalid_argument);
}

TEST_CASE("construction validates the design matrix") {
  Matrix X(2, 2);
  X << 1.0, 0.5, 1.0, -0.5;
  Vector y(2);
  y << 0.2, 0.8;
  CHECK_NOTHROW(QLProblem(X, y, VarianceFunction::V1));

  Matrix bad = X;
  bad(1, 0) = 2.0;
  CHECK_THROWS_AS(QLProblem(bad, y, VarianceFunction::V1),
                  std::invalid_argument);

  Vector short_y(1);
  short_y << 0.2;
  CHECK_THROWS_AS(QLProblem(X, short_y, VarianceFunction::V1),
                  std::invalid_argument);
}

TEST_CASE("intercept-only gradient has the closed form") {
  // One observation, one parameter, y = 1, theta = 0: the weight is
  // (1 - 0.5) * 0.25 / V(0.5), so the gradient is -0.125 / (0.5^4.5 + 1).
  Matrix X(1, 1);
  X << 1.0;
  Vector y(1);
  y << 1.0;
  const QLProblem problem(X, y, VarianceFunction::V2);
  const Vector g = problem.gradient(Vector::Zero(1));
  CHECK(g[0] ==
        doctest::Approx(-0.125 / (std::pow(0.5, 4.5) + 1.0)).epsilon(1e-14));
}

TEST_CASE("objective matches a dense composite oracle") {
  Matrix X(3, 2);
  X << 1.0, 0.4, 1.0, -1.1, 1.0, 2.0;
  Vector y(3);
  y << 0.9, 0.1, 0.6;
  const QLProblem problem(X, y, VarianceFunction::V2);

  Vector theta(2);
  theta << 0.3, -0.7;

  // Independent evaluation: composite Simpson with one million panels per
  // observation, accumulated in long double.
  long double total = 0.0L;
  for (int i = 0; i < 3; ++i) {
    const double eta = X(i, 0) * theta[0] + X(i, 1) * theta[1];
    const double upper = logistic_link(eta);
    const auto integrand = [&](double mu) {
      return (y[i] - mu) / (std::pow(std::abs(mu), 4.5) + 1.0);
    };
    const long panels = 1000000;
    const long double h = static_cast<long double>(upper) / panels;
    long double acc = integrand(0.0) + integrand(upper);
    for (long k = 1; k < panels; ++k) {
      acc += (k % 2 == 1 ? 4.0L : 2.0L) *
             integrand(static_cast<double>(k * h));
    }
    total += acc * h / 3.0L;
  }
  const double oracle = -static_cast<double>(total);

  CHECK(problem.objective(theta) == doctest::Approx(oracle).epsilon(1e-8));
  CHECK(problem.quadrature_nodes() > 0);
  CHECK(problem.quadrature_failures() == 0);
}

TEST_CASE("analytic gradients agree with finite differences") {
  Matrix X(5, 3);
  X << 1.0, 0.4, -0.2,
       1.0, -1.1, 0.9,
       1.0, 2.0, 0.3,
       1.0, -0.6, -1.4,
       1.0, 0.1, 0.8;
  Vector y(5);
  y << 0.9, 0.1, 0.6, 0.4, 0.2;

  QuadratureConfig tight;
  tight.abs_tol = 1e-12;
  for (VarianceFunction v : {VarianceFunction::V1, VarianceFunction::V2,
                             VarianceFunction::V3, VarianceFunction::V4}) {
    const QLProblem problem(X, y, v, tight);
    Vector theta(3);
    theta << 0.3, -0.5, 0.2;
    const Vector g = problem.gradient(theta);
    const Vector fd = finite_difference_gradient(problem, theta);
    CHECK((fd - g).norm() / std::max(1.0, g.norm()) <= 1e-5);
  }
}

TEST_CASE("saturated predictors stay finite") {
  Matrix X(2, 2);
  X << 1.0, 1.0, 1.0, -1.0;
  Vector y(2);
  y << 0.8, 0.3;
  const QLProblem problem(X, y, VarianceFunction::V3);

  Vector theta(2);
  theta << 500.0, 400.0;  // eta = 900 and 100: the link saturates to 1
  const double value = problem.objective(theta);
  CHECK(std::isfinite(value));
  CHECK(problem.quadrature_failures() == 0);

  const Vector g = problem.gradient(theta);
  CHECK(g.allFinite());
}

TEST_CASE("quadrature exhaustion yields NaN and counts a failure") {
  Matrix X(1, 1);
  X << 1.0;
  Vector y(1);
  y << 0.5;
  QuadratureConfig starved;
  starved.abs_tol = 1e-300;
  starved.max_depth = 1;
  const QLProblem problem(X, y, VarianceFunction::V1, starved);
  const double value = problem.objective(Vector::Ones(1));
  CHECK(std::isnan(value));
  CHECK(problem.quadrature_failures() == 1);
}
