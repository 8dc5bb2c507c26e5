#include "doctest.h"

#include <cmath>
#include <limits>
#include <stdexcept>

#include "evstep/problem.hpp"

using namespace evstep;

namespace {

FunctionProblem make_quadratic() {
  return FunctionProblem(
      2, [](const Vector& t) { return 0.5 * t.squaredNorm(); },
      [](const Vector& t) { return Vector(t); });
}

}  // namespace

TEST_CASE("problem counts objective and gradient evaluations") {
  FunctionProblem p = make_quadratic();
  Vector t(2);
  t << 3.0, 4.0;

  CHECK(p.objective_evals() == 0);
  CHECK(p.gradient_evals() == 0);
  CHECK(p.objective(t) == doctest::Approx(12.5));
  CHECK(p.objective(t) == doctest::Approx(12.5));
  CHECK(p.gradient(t).norm() == doctest::Approx(5.0));
  CHECK(p.objective_evals() == 2);
  CHECK(p.gradient_evals() == 1);

  p.reset_counters();
  CHECK(p.objective_evals() == 0);
  CHECK(p.gradient_evals() == 0);
}

TEST_CASE("gradient with wrong dimension is rejected") {
  FunctionProblem p(
      2, [](const Vector&) { return 0.0; },
      [](const Vector&) { return Vector::Zero(3); });
  CHECK_THROWS_AS(p.gradient(Vector::Zero(2)), std::logic_error);
}

TEST_CASE("finite differences match an analytic gradient") {
  FunctionProblem p = make_quadratic();
  Vector t(2);
  t << 1.25, -0.5;
  const Vector fd = finite_difference_gradient(p, t);
  CHECK((fd - t).norm() <= 1e-6);
}

TEST_CASE("finite differences reject a non-finite stencil") {
  FunctionProblem p(
      1,
      [](const Vector&) { return std::numeric_limits<double>::quiet_NaN(); },
      [](const Vector&) { return Vector::Zero(1); });
  CHECK_THROWS_AS(finite_difference_gradient(p, Vector::Zero(1)),
                  NonFiniteObjectiveError);
}

TEST_CASE("recording problem captures gradient call sites") {
  FunctionProblem inner = make_quadratic();
  RecordingProblem rec(inner);
  Vector a = Vector::Zero(2);
  Vector b = Vector::Ones(2);
  rec.gradient(a);
  rec.objective(b);
  rec.gradient(b);
  REQUIRE(rec.gradient_points().size() == 2);
  CHECK(rec.gradient_points()[0] == a);
  CHECK(rec.gradient_points()[1] == b);
}

TEST_CASE("solve report start and end helpers read the trace") {
  SolveReport report;
  report.trace.push_back(TracePoint{0, 4.0, 2.0});
  report.trace.push_back(TracePoint{1, 1.0, 0.5});
  CHECK(report.start_objective() == 4.0);
  CHECK(report.end_objective() == 1.0);
  CHECK(report.start_grad_norm() == 2.0);
  CHECK(report.end_grad_norm() == 0.5);
}
