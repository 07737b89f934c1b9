#pragma once

#include <cmath>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <utility>
#include <vector>

#include "logmap/map_family.hpp"
#include "logmap/point_set.hpp"

namespace logmap {

// An orbit with everything later stages need, kept in log space:
//   points[i]            = c_i
//   log_deriv_prefix[i]  = Σ_{j<i} ln|f'(c_j)|  (so ln J^i is a lookup)
//   deriv_sign[i]        = sign of f'(c_i), for i < steps
//   dC/dS[i], nearest_C[i] = circle distance and index of nearest critical /
//                            singular point
//   log_d[i]             = ln dC(i) + ln dS(i) - log_deriv_prefix[i]
// All per-point vectors share one length; prefix has the same length with
// entry 0 = 0. A halt records the index whose evaluation failed.
struct OrbitRecord {
  double origin = 0.0;
  std::vector<double> points;
  std::vector<double> log_deriv_prefix;
  std::vector<std::int8_t> deriv_sign;
  std::vector<double> dC, dS, log_d;
  std::vector<std::uint32_t> nearest_C;
  std::optional<std::pair<std::size_t, EvalStatus>> halted_at;

  std::size_t last() const { return points.size() - 1; }
  bool halted() const { return halted_at.has_value(); }
};

inline OrbitRecord iterate_orbit(const MapParams& p, const StructureSets& st,
                                 double x0, std::size_t n) {
  OrbitRecord rec;
  rec.origin = wrap_unit(x0);
  rec.points.reserve(n + 1);
  rec.log_deriv_prefix.reserve(n + 1);
  rec.deriv_sign.reserve(n);
  rec.dC.reserve(n + 1);
  rec.dS.reserve(n + 1);
  rec.log_d.reserve(n + 1);
  rec.nearest_C.reserve(n + 1);

  auto push_point = [&](double x) {
    const Nearest nc = nearest_in_set(x, st.C);
    const double ds = dist_to(st.S, x);
    rec.points.push_back(x);
    rec.dC.push_back(nc.dist);
    rec.dS.push_back(ds);
    rec.nearest_C.push_back(static_cast<std::uint32_t>(nc.index));
    rec.log_d.push_back(std::log(nc.dist) + std::log(ds) -
                        rec.log_deriv_prefix.back());
  };

  rec.log_deriv_prefix.push_back(0.0);
  push_point(rec.origin);
  double x = rec.origin;
  for (std::size_t i = 0; i < n; ++i) {
    const StepResult s = map_step(p, x);
    if (s.status != EvalStatus::ok) {
      rec.halted_at = {i, s.status};
      break;
    }
    rec.log_deriv_prefix.push_back(rec.log_deriv_prefix.back() + s.log_fp);
    rec.deriv_sign.push_back(static_cast<std::int8_t>(s.sign_fp));
    x = s.y;
    push_point(x);
  }
  return rec;
}

// ln J^{j-i}(c_i) as a prefix difference; i ≤ j within the record.
inline double log_jacobian(const OrbitRecord& rec, std::size_t i,
                           std::size_t j) {
  if (i > j || j >= rec.log_deriv_prefix.size())
    throw std::out_of_range("log_jacobian: indices outside record");
  return rec.log_deriv_prefix[j] - rec.log_deriv_prefix[i];
}

// Least-squares slope of the log-derivative prefix over the second half of
// the record; the discarded first half absorbs bound-period transients.
inline std::optional<double> lyapunov_slope(const OrbitRecord& rec,
                                            double discard_fraction = 0.5) {
  const std::size_t n = rec.last();
  if (n < 100) return std::nullopt;
  const std::size_t start = static_cast<std::size_t>(
      discard_fraction * static_cast<double>(n));
  const std::size_t m = n - start + 1;
  double mean_i = 0.0, mean_y = 0.0;
  for (std::size_t i = start; i <= n; ++i) {
    mean_i += static_cast<double>(i);
    mean_y += rec.log_deriv_prefix[i];
  }
  mean_i /= static_cast<double>(m);
  mean_y /= static_cast<double>(m);
  double sxx = 0.0, sxy = 0.0;
  for (std::size_t i = start; i <= n; ++i) {
    const double di = static_cast<double>(i) - mean_i;
    sxx += di * di;
    sxy += di * (rec.log_deriv_prefix[i] - mean_y);
  }
  return sxy / sxx;
}

}  // namespace logmap
