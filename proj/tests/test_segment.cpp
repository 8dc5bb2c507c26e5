#include "doctest.h"

#include <cmath>
#include <limits>
#include <vector>

#include "evstep/segment_function.hpp"

using namespace evstep;

namespace {

SegmentShape shape_of(double m, double d, double delta) {
  SegmentShape s;
  s.width = m;
  s.entry_descent = d;
  s.exit_descent = delta;
  return s;
}

// The nine distinct junction coordinates of the piece chain.
std::vector<double> junctions(const SegmentShape& s) {
  const double m = s.width;
  const double a = std::max(std::abs(s.entry_descent), 1.0);
  const double b = std::max(std::abs(s.exit_descent), 1.0);
  return {m / (16.0 * a),
          m / (8.0 * a),
          m / 8.0,
          3.0 * m / 16.0,
          m / 2.0,
          13.0 * m / 16.0,
          14.0 * m / 16.0,
          (16.0 * b - 2.0) * m / (16.0 * b),
          (16.0 * b - 1.0) * m / (16.0 * b)};
}

}  // namespace

TEST_CASE("values match independently derived piece formulas") {
  // m = 1, d = 2, delta = 3: a = 2, b = 3, dip = -3/32, crest = 19/32.
  const SegmentShape s = shape_of(1.0, 2.0, 3.0);
  const double dip = -0.09375;
  const double crest = 0.59375;

  CHECK(segment_value(0.0, s) == 0.0);
  // Entry ramp of slope -d.
  CHECK(segment_value(0.02, s) == doctest::Approx(-0.04).epsilon(1e-14));
  // Entry blend: 8 d a / m * (x - 1/16)^2 + dip at x = 0.05.
  CHECK(segment_value(0.05, s) ==
        doctest::Approx(32.0 * 0.0125 * 0.0125 + dip).epsilon(1e-12));
  // Dip plateau.
  CHECK(segment_value(0.1, s) == doctest::Approx(dip).epsilon(1e-14));
  // Rising blend: 8 / m * (x - 1/8)^2 + dip at x = 0.15.
  CHECK(segment_value(0.15, s) ==
        doctest::Approx(8.0 * 0.025 * 0.025 + dip).epsilon(1e-12));
  // Left flat-approach piece at x = 0.25.
  CHECK(segment_value(0.25, s) ==
        doctest::Approx(-0.3125 * std::exp(0.3125 / (0.25 - 0.5) + 1.0) +
                        0.34375 + dip)
            .epsilon(1e-12));
  // Midpoint plateau value.
  CHECK(segment_value(0.5, s) == doctest::Approx(0.34375 + dip).epsilon(1e-14));
  // Right flat-departure piece at x = 0.7.
  CHECK(segment_value(0.7, s) ==
        doctest::Approx(0.3125 * std::exp(-0.3125 / (0.7 - 0.5) + 1.0) +
                        0.34375 + dip)
            .epsilon(1e-12));
  // Crest blend: -8 / m * (x - 7/8)^2 + crest at x = 0.85.
  CHECK(segment_value(0.85, s) ==
        doctest::Approx(-8.0 * 0.025 * 0.025 + crest).epsilon(1e-12));
  // Crest plateau.
  CHECK(segment_value(0.9, s) == doctest::Approx(crest).epsilon(1e-14));
  // Exit blend: -8 delta b / m * (x - 46/48)^2 + crest at x = 0.96.
  CHECK(segment_value(0.96, s) ==
        doctest::Approx(-72.0 * (0.96 - 46.0 / 48.0) * (0.96 - 46.0 / 48.0) +
                        crest)
            .epsilon(1e-10));
  // Exit ramp lands on the closed-form end value.
  CHECK(segment_value(1.0, s) == doctest::Approx(0.5).epsilon(1e-14));
  CHECK(segment_end_value(s) == doctest::Approx(0.5).epsilon(1e-14));
}

TEST_CASE("gentle descents are clamped by the unit floor") {
  // m = 2, d = 0.25, delta = -3: a = 1, b = 3.
  const SegmentShape s = shape_of(2.0, 0.25, -3.0);
  // Entry ramp keeps slope -d even when |d| < 1.
  CHECK(segment_value(0.0625, s) ==
        doctest::Approx(-0.25 * 0.0625).epsilon(1e-14));
  // Blend piece: dip + 8 d a / m * r^2 with dip = -3 * 2 * 0.25 / 32 and
  // r = 0.22 - 0.25.
  CHECK(segment_value(0.22, s) ==
        doctest::Approx(-0.046875 + 0.0009).epsilon(1e-14));
  // End value from the closed form: (m/32)(22 - 3*0.25 - 3*(-1)).
  CHECK(segment_end_value(s) ==
        doctest::Approx(2.0 / 32.0 * (22.0 - 0.75 + 3.0)).epsilon(1e-14));
}

TEST_CASE("segments join continuously at every junction") {
  const std::vector<SegmentShape> shapes = {
      shape_of(1.0, 2.0, 3.0),   shape_of(0.5, -3.0, 0.75),
      shape_of(2.0, 0.25, -1.0), shape_of(1.0, 1.0, 1.0),
      shape_of(2.0, -1.0, 3.0)};
  for (const SegmentShape& s : shapes) {
    for (double x : junctions(s)) {
      const double below =
          segment_value(std::nextafter(x, 0.0), s);
      const double at = segment_value(x, s);
      const double above =
          segment_value(std::nextafter(x, s.width), s);
      CHECK(std::abs(below - at) <= 1e-10);
      CHECK(std::abs(at - above) <= 1e-10);
    }
  }
}

TEST_CASE("slopes agree with central differences in piece interiors") {
  const SegmentShape s = shape_of(1.0, 2.0, 3.0);
  const double h = 1e-7;
  for (double x : {0.02, 0.05, 0.1, 0.15, 0.25, 0.4, 0.6, 0.7, 0.85, 0.9}) {
    const double fd =
        (segment_value(x + h, s) - segment_value(x - h, s)) / (2.0 * h);
    CHECK(segment_slope(x, s, Side::Right) == doctest::Approx(fd).epsilon(1e-5));
  }
}

TEST_CASE("endpoint slopes are the requested descents") {
  for (const SegmentShape& s :
       {shape_of(1.0, 2.0, 3.0), shape_of(0.5, -3.0, 0.75),
        shape_of(2.0, 0.25, -1.0)}) {
    CHECK(segment_slope(0.0, s, Side::Right) == -s.entry_descent);
    CHECK(segment_slope(s.width, s, Side::Left) == -s.exit_descent);
  }
}

TEST_CASE("left and right slopes agree at interior junctions") {
  const SegmentShape s = shape_of(1.0, 2.0, 3.0);
  for (double x : junctions(s)) {
    const double left = segment_slope(x, s, Side::Left);
    const double right = segment_slope(x, s, Side::Right);
    CHECK(std::abs(left - right) <= 1e-9);
  }
}

TEST_CASE("derivative flattens superlinearly into the midpoint plateau") {
  const SegmentShape s = shape_of(1.0, 1.0, 1.0);
  // Quotient |f'(m/2 - h) - f'(m/2)| / h must fall by at least 5x per decade;
  // at the midpoint the slope is exactly zero.
  CHECK(segment_slope(0.5, s, Side::Left) == 0.0);
  const double q2 = std::abs(segment_slope(0.5 - 1e-2, s, Side::Right)) / 1e-2;
  const double q3 = std::abs(segment_slope(0.5 - 1e-3, s, Side::Right)) / 1e-3;
  CHECK(q3 <= q2 / 5.0);

  // In the linear entry zone the quotient is exactly zero at both scales.
  const double r2 =
      std::abs(segment_slope(1e-2, s, Side::Right) -
               segment_slope(0.0, s, Side::Right)) / 1e-2;
  const double r3 =
      std::abs(segment_slope(1e-3, s, Side::Right) -
               segment_slope(0.0, s, Side::Right)) / 1e-3;
  CHECK(r2 == 0.0);
  CHECK(r3 <= r2 / 5.0);
}

TEST_CASE("end value is exactly half the width at the knife edge") {
  // Whenever both descents are >= 1 the slope ratios are exactly 1 and the
  // closed form collapses to width / 2 with no rounding.
  for (double m : {0.5, 1.0, 2.0}) {
    for (double d : {1.0, 2.0, 3.7}) {
      for (double delta : {1.0, 5.0, 1000.0}) {
        CHECK(segment_end_value(shape_of(m, d, delta)) == m / 2.0);
      }
    }
  }
}

TEST_CASE("values stay above the dip floor") {
  for (const SegmentShape& s :
       {shape_of(1.0, 2.0, 3.0), shape_of(0.5, -3.0, -3.0),
        shape_of(2.0, 0.25, 0.75)}) {
    const double floor = -s.width / 8.0;
    for (int i = 0; i <= 2000; ++i) {
      const double x = s.width * static_cast<double>(i) / 2000.0;
      CHECK(segment_value(x, s) >= floor);
    }
  }
}

TEST_CASE("out of domain coordinates are rejected") {
  const SegmentShape s = shape_of(1.0, 1.0, 1.0);
  CHECK_THROWS_AS(segment_value(-0.1, s), OutOfDomainError);
  CHECK_THROWS_AS(segment_value(1.1, s), OutOfDomainError);
  CHECK_THROWS_AS(
      segment_value(std::numeric_limits<double>::quiet_NaN(), s),
      OutOfDomainError);
  CHECK_THROWS_AS(segment_slope(-0.1, s, Side::Right), OutOfDomainError);
}
