#pragma once

#include <stdexcept>

// A smooth-in-the-interior piecewise segment on [0, width] with prescribed
// one-sided slopes at both ends, used as the building block for objectives on
// which gradient methods that never evaluate the objective diverge. The shape
// enters descending at rate entry_descent (derivative -entry_descent at 0),
// dips, climbs over a central hump worth at least width/2, flattens, and
// leaves descending at rate exit_descent (derivative -exit_descent at width).
// Steep requested slopes are confined to end zones whose width shrinks with
// the slope so the net rise never suffers.

namespace evstep {

struct OutOfDomainError : std::out_of_range {
  using std::out_of_range::out_of_range;
};

struct SegmentShape {
  double width = 1.0;
  double entry_descent = 1.0;  ///< derivative at 0 is -entry_descent
  double exit_descent = 1.0;   ///< derivative at width is -exit_descent
};

enum class Side { Left, Right };

/// Segment value at local coordinate x in [0, width]; value 0 at x = 0.
/// Throws OutOfDomainError outside the interval.
double segment_value(double x, const SegmentShape& shape);

/// One-sided derivative at x. The segment is continuously differentiable on
/// the open interval, so the side only changes the answer at 0 (use Right)
/// and width (use Left); elsewhere it selects which piece's formula is used
/// when x sits exactly on a piece boundary.
double segment_slope(double x, const SegmentShape& shape, Side side);

/// Guaranteed properties: value at width is at least width/2, and the segment
/// never dips below -3*width*min(|entry_descent|, 1)/32 (in particular never
/// below -width/8).
double segment_end_value(const SegmentShape& shape);

}  // namespace evstep
