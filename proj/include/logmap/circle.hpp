#pragma once

#include <cmath>

namespace logmap {

// Reduce to [0, 1). floor() handles negatives; the guard catches the case
// where x is a tiny negative and x - floor(x) rounds up to exactly 1.0.
inline double wrap_unit(double x) {
  double r = x - std::floor(x);
  return r >= 1.0 ? r - 1.0 : r;
}

// x - y reduced to [-1/2, 1/2): the shortest signed displacement from y to x.
inline double signed_circle_diff(double x, double y) {
  double d = wrap_unit(x - y);
  return d >= 0.5 ? d - 1.0 : d;
}

// Distance on the circle of unit circumference, in [0, 1/2].
inline double circle_dist(double x, double y) {
  double d = std::fabs(wrap_unit(x - y));
  return d > 0.5 ? 1.0 - d : d;
}

}  // namespace logmap
