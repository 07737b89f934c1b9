#pragma once

#include <cmath>
#include <cstddef>

#include "logmap/windows.hpp"

namespace logmap {

// The bound period of a point x that entered the critical neighborhood:
// the unique p ≥ 2 with D_p ≤ |f(x) - c₀| < D_{p-1}, read off the annuli of
// the window table. The annulus test is side-agnostic (radii only).
struct BoundPeriodResult {
  enum class Status { ok, outside_window, saturated };
  Status status = Status::outside_window;
  int p = 1;  // 1 encodes "no bound period" for outside-window returns
};

inline BoundPeriodResult bound_period_from_dist(const WindowTable& w,
                                                double dist, std::size_t pmax) {
  BoundPeriodResult r;
  const double ld = std::log(dist);
  const std::size_t cap = std::min(pmax, w.valid_to);
  if (cap < 1 || ld >= w.log_Dn[1]) return r;  // outside the first window
  // log_Dn is strictly decreasing; find the first p with log_Dn[p] ≤ ld.
  std::size_t lo = 1, hi = cap;
  if (w.log_Dn[cap] > ld) {
    r.status = BoundPeriodResult::Status::saturated;
    r.p = static_cast<int>(cap);
    return r;
  }
  while (lo < hi) {
    const std::size_t mid = (lo + hi) / 2;
    if (w.log_Dn[mid] <= ld) hi = mid; else lo = mid + 1;
  }
  r.status = BoundPeriodResult::Status::ok;
  r.p = static_cast<int>(lo < 2 ? 2 : lo);
  return r;
}

// Convenience form matching the structural API: x near the critical point c
// whose critical-value orbit is c_record.
inline BoundPeriodResult bound_period(const MapParams& params,
                                      const OrbitRecord& c_record,
                                      const WindowTable& windows, double x,
                                      std::size_t pmax) {
  const FEval fx = f_eval(params, x);
  if (fx.status != EvalStatus::ok) return {};
  return bound_period_from_dist(windows,
                                circle_dist(fx.y, c_record.points[0]), pmax);
}

}  // namespace logmap
