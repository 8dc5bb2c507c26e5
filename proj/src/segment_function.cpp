#include "evstep/segment_function.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace evstep {

namespace {

// Exponent threshold for the two exponential pieces. Below this the factor
// underflows to zero anyway and the pole denominator can overflow first, so
// the plateau limit is returned directly.
const double kExpFloor = -700.0;

struct Frame {
  double m, d, delta;
  double a, b;    // slope normalizers max(|d|, 1), max(|delta|, 1)
  double dip;     // -3 m d / (32 a), the value of the low plateau
  double crest;   // 22 m / 32 + dip, the value of the high plateau
};

Frame make_frame(const SegmentShape& shape) {
  Frame f;
  f.m = shape.width;
  f.d = shape.entry_descent;
  f.delta = shape.exit_descent;
  f.a = std::max(std::abs(f.d), 1.0);
  f.b = std::max(std::abs(f.delta), 1.0);
  f.dip = -3.0 * f.m * (f.d / f.a) / 32.0;
  f.crest = 22.0 * f.m / 32.0 + f.dip;
  return f;
}

void check_domain(double x, const SegmentShape& shape, const char* who) {
  if (!(shape.width > 0.0))
    throw std::invalid_argument(std::string(who) + ": width must be positive");
  if (!(x >= 0.0) || !(x <= shape.width))
    throw OutOfDomainError(std::string(who) +
                           ": coordinate outside [0, width]");
}

}  // namespace

double segment_value(double x, const SegmentShape& shape) {
  check_domain(x, shape, "segment_value");
  const Frame f = make_frame(shape);
  const double m = f.m;

  if (x < m / (16.0 * f.a)) {
    return -f.d * x;
  }
  if (x < m / (8.0 * f.a)) {
    const double r = x - m / (8.0 * f.a);
    return 8.0 * f.d * f.a / m * r * r + f.dip;
  }
  if (x <= m / 8.0) {
    return f.dip;
  }
  if (x < 3.0 * m / 16.0) {
    const double r = x - m / 8.0;
    return 8.0 / m * r * r + f.dip;
  }
  if (x < m / 2.0) {
    const double expo = (5.0 / 16.0) / (x / m - 0.5) + 1.0;
    if (expo < kExpFloor) return 11.0 * m / 32.0 + f.dip;
    return -(5.0 * m / 16.0) * std::exp(expo) + 11.0 * m / 32.0 + f.dip;
  }
  if (x == m / 2.0) {
    return 11.0 * m / 32.0 + f.dip;
  }
  if (x < 13.0 * m / 16.0) {
    const double expo = -(5.0 / 16.0) / (x / m - 0.5) + 1.0;
    if (expo < kExpFloor) return 11.0 * m / 32.0 + f.dip;
    return (5.0 * m / 16.0) * std::exp(expo) + 11.0 * m / 32.0 + f.dip;
  }
  if (x < 14.0 * m / 16.0) {
    const double r = x - 7.0 * m / 8.0;
    return -8.0 / m * r * r + f.crest;
  }
  if (x <= (16.0 * f.b - 2.0) * m / (16.0 * f.b)) {
    return f.crest;
  }
  if (x < (16.0 * f.b - 1.0) * m / (16.0 * f.b)) {
    const double r = x - (16.0 * f.b - 2.0) * m / (16.0 * f.b);
    return -8.0 * f.delta * f.b / m * r * r + f.crest;
  }
  // Exit ramp, written centered at x = width. The expanded form cancels
  // catastrophically when |exit_descent| is huge, this one is exact at the
  // endpoint and keeps every term at the width scale.
  return -f.delta * (x - m) + f.crest - 3.0 * m * (f.delta / f.b) / 32.0;
}

double segment_end_value(const SegmentShape& shape) {
  check_domain(shape.width, shape, "segment_end_value");
  const Frame f = make_frame(shape);
  // Single-expression form of the value at width. With both slope ratios
  // exactly 1 the parenthesis is exactly 16, making the result exactly
  // width/2; offset accumulation over many segments depends on that.
  return f.m / 32.0 * (22.0 - 3.0 * (f.d / f.a) - 3.0 * (f.delta / f.b));
}

double segment_slope(double x, const SegmentShape& shape, Side side) {
  check_domain(x, shape, "segment_slope");
  const Frame f = make_frame(shape);
  const double m = f.m;

  // The segment is C^1 on the open interval, so at interior piece boundaries
  // both pieces' formulas agree; the side is only decisive at 0 and width.
  // For Side::Left a boundary coordinate selects the piece to its left.
  const bool left = side == Side::Left;
  const auto in_piece = [&](double open_boundary) {
    return left ? x <= open_boundary : x < open_boundary;
  };

  if (in_piece(m / (16.0 * f.a))) {
    return -f.d;
  }
  if (in_piece(m / (8.0 * f.a))) {
    return 16.0 * f.d * f.a / m * (x - m / (8.0 * f.a));
  }
  if (x <= m / 8.0) {
    return 0.0;
  }
  if (in_piece(3.0 * m / 16.0)) {
    return 16.0 / m * (x - m / 8.0);
  }
  if (x < m / 2.0) {
    const double u = x / m - 0.5;
    const double expo = (5.0 / 16.0) / u + 1.0;
    if (expo < kExpFloor) return 0.0;
    return (25.0 / 256.0) * std::exp(expo) / (u * u);
  }
  if (x == m / 2.0) {
    return 0.0;
  }
  if (in_piece(13.0 * m / 16.0)) {
    const double u = x / m - 0.5;
    const double expo = -(5.0 / 16.0) / u + 1.0;
    if (expo < kExpFloor) return 0.0;
    return (25.0 / 256.0) * std::exp(expo) / (u * u);
  }
  if (in_piece(14.0 * m / 16.0)) {
    return -16.0 / m * (x - 7.0 * m / 8.0);
  }
  if (x <= (16.0 * f.b - 2.0) * m / (16.0 * f.b)) {
    return 0.0;
  }
  if (in_piece((16.0 * f.b - 1.0) * m / (16.0 * f.b))) {
    return -16.0 * f.delta * f.b / m *
           (x - (16.0 * f.b - 2.0) * m / (16.0 * f.b));
  }
  return -f.delta;
}

}  // namespace evstep
