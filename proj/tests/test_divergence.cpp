#include "doctest.h"

#include <cmath>
#include <stdexcept>
#include <vector>

#include "evstep/divergence.hpp"
#include "evstep/event_driven.hpp"

using namespace evstep;

TEST_CASE("two-segment curve joins continuously at the breakpoint") {
  const PiecewiseObjective curve = build_divergence_objective(
      {0.0, 1.0, 2.0}, {2.0, 3.0, -2.0});

  // First segment ends at (1/32)(22 - 3 - 3) = 0.5.
  CHECK(curve.offset(1) == doctest::Approx(0.5).epsilon(1e-14));
  const double below = curve.value(std::nextafter(1.0, 0.0));
  const double at = curve.value(1.0);
  const double above = curve.value(std::nextafter(1.0, 2.0));
  CHECK(std::abs(below - at) <= 1e-12);
  CHECK(std::abs(at - above) <= 1e-12);

  // Second segment ends at 0.5 + (1/32)(22 - 3 + 3) = 0.5 + 22/32.
  CHECK(curve.offset(2) == doctest::Approx(0.5 + 22.0 / 32.0).epsilon(1e-14));
}

TEST_CASE("linear extensions continue the boundary slopes") {
  const PiecewiseObjective curve = build_divergence_objective(
      {0.0, 1.0, 2.0}, {2.0, 3.0, -2.0});

  // Left of the first breakpoint the slope is -descents[0].
  CHECK(curve.value(-1.0) == doctest::Approx(2.0).epsilon(1e-14));
  CHECK(curve.slope(-1.0) == doctest::Approx(-2.0).epsilon(1e-14));
  // Right of the last breakpoint the slope is -descents.back().
  CHECK(curve.value(3.0) ==
        doctest::Approx(0.5 + 22.0 / 32.0 + 2.0).epsilon(1e-14));
  CHECK(curve.slope(3.0) == doctest::Approx(2.0).epsilon(1e-14));
}

TEST_CASE("breakpoints must increase strictly and finitely") {
  CHECK_THROWS_AS(build_divergence_objective({0.0, 1.0, 1.0}, {1.0, 1.0, 1.0}),
                  NonIncreasingBreakpointsError);
  CHECK_THROWS_AS(build_divergence_objective({0.0, -1.0}, {1.0, 1.0}),
                  NonIncreasingBreakpointsError);
  CHECK_THROWS_AS(
      build_divergence_objective(
          {0.0, std::numeric_limits<double>::infinity()}, {1.0, 1.0}),
      std::invalid_argument);
  // Sequence lengths must match.
  CHECK_THROWS_AS(build_divergence_objective({0.0, 1.0}, {1.0, 1.0, 1.0}),
                  std::invalid_argument);
  // At least one segment.
  CHECK_THROWS_AS(build_divergence_objective({0.0}, {1.0}),
                  std::invalid_argument);
}

TEST_CASE("lazily generated curves materialize on demand") {
  const PiecewiseObjective curve(
      [](long j) { return static_cast<double>(j); },
      [](long) { return 1.0; });

  // Unit segments with unit descents accumulate exactly half their width.
  CHECK(curve.value(5.0) == doctest::Approx(2.5).epsilon(1e-14));
  CHECK(curve.value(5.5) == doctest::Approx(2.75).epsilon(1e-13));
  CHECK(curve.materialized() >= 6);

  // Points left of the origin use the extension without growing the curve.
  CHECK(curve.value(-2.0) == doctest::Approx(2.0).epsilon(1e-14));
}

TEST_CASE("closed forms predict the replayed iterates") {
  for (BaselineMethod method :
       {BaselineMethod::FixedStep, BaselineMethod::DiminishingStep,
        BaselineMethod::BarzilaiBorweinLong, BaselineMethod::BarzilaiBorweinShort,
        BaselineMethod::LipschitzApprox, BaselineMethod::WNGrad}) {
    const long horizon = 20;
    const AdversarialSequences seq = adversarial_sequences(method, 1.0, horizon);
    const AdversarialRow row = adversarial_row(method, 1.0, horizon + 2);
    REQUIRE(seq.iterates.size() == static_cast<std::size_t>(horizon + 2));
    REQUIRE(row.iterates.size() == seq.iterates.size());
    REQUIRE(row.descents.size() == seq.descents.size());
    for (std::size_t k = 0; k < seq.iterates.size(); ++k) {
      const double scale = std::max(1.0, std::abs(row.iterates[k]));
      CHECK(std::abs(seq.iterates[k] - row.iterates[k]) / scale <= 1e-9);
      CHECK(seq.descents[k] == row.descents[k]);
    }
  }
}

TEST_CASE("momentum has no pinned construction") {
  CHECK_THROWS_AS(adversarial_sequences(BaselineMethod::Nesterov, 1.0, 10),
                  UnsupportedMethodError);
  CHECK_THROWS_AS(adversarial_row(BaselineMethod::Nesterov, 1.0, 10),
                  UnsupportedMethodError);
  CHECK_THROWS_AS(verify_anti_convergence(BaselineMethod::Nesterov, 1.0, 10),
                  UnsupportedMethodError);
}

TEST_CASE("fixed step fails to approach stationarity on its curve") {
  const DivergenceCheck check =
      verify_anti_convergence(BaselineMethod::FixedStep, 1.0, 50);
  CHECK(check.ok);
  CHECK(check.failure.empty());
  REQUIRE(check.iterates.size() == 51);
  // Unit steps on unit slopes: theta_k = k.
  CHECK(check.iterates[50] == doctest::Approx(50.0).epsilon(1e-12));
  CHECK(check.objectives[50] >= 25.0);
  CHECK(check.min_grad_norm == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(check.min_growth_margin >= 0.0);
  CHECK(check.max_iterate_error <= 1e-9);
}

TEST_CASE("step-doubling variants also keep moving") {
  for (BaselineMethod method :
       {BaselineMethod::BarzilaiBorweinLong, BaselineMethod::LipschitzApprox,
        BaselineMethod::WNGrad, BaselineMethod::DiminishingStep}) {
    const DivergenceCheck check = verify_anti_convergence(method, 1.0, 30);
    CHECK(check.ok);
    CHECK(check.min_growth_margin >= 0.0);
  }
}

TEST_CASE("the event-driven solver is immune to the engineered curves") {
  for (BaselineMethod method :
       {BaselineMethod::FixedStep, BaselineMethod::LipschitzApprox}) {
    const AdversarialSequences seq = adversarial_sequences(method, 1.0, 30);
    PiecewiseProblem problem(
        PiecewiseObjective(seq.iterates, seq.descents));

    SolverParams params;
    params.grad_tol = 1e-9;
    params.outer_budget = 100;
    Vector theta0 = Vector::Zero(1);
    const SolveReport report = solve(problem, theta0, params);

    REQUIRE(!report.trace.empty());
    const double start = report.trace.front().objective;
    double previous = start;
    for (const TracePoint& point : report.trace) {
      CHECK(point.objective <= previous + 1e-15);
      CHECK(point.objective <= start + 1e-15);
      previous = point.objective;
    }
  }
}
