#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <vector>

#include "logmap/circle.hpp"
#include "logmap/map_family.hpp"

namespace logmap {

enum class PointKind { critical, singular };

struct PointSet {
  std::vector<double> points;  // sorted, in [0, 1)
  PointKind kind = PointKind::singular;
  double tolerance = 0.0;      // residual bound: |Φ| or |f'| at each point
};

struct Nearest {
  std::size_t index = 0;
  double dist = 0.0;
};

// Closest set point by circle distance; equidistant candidates resolve to
// the lowest index so itineraries are reproducible.
inline Nearest nearest_in_set(double x, const PointSet& set) {
  if (set.points.empty()) throw std::invalid_argument("nearest_in_set: empty set");
  Nearest best{0, circle_dist(x, set.points[0])};
  for (std::size_t i = 1; i < set.points.size(); ++i) {
    const double d = circle_dist(x, set.points[i]);
    if (d < best.dist) best = {i, d};
  }
  return best;
}

struct DegenerateZero : std::runtime_error {
  using std::runtime_error::runtime_error;
};

namespace detail {

// Bisection on a sign change of g over [lo, hi] (g(lo), g(hi) of opposite
// signs); refines to double resolution.
template <typename G>
double bisect(G&& g, double lo, double hi) {
  double glo = g(lo);
  for (int it = 0; it < 200 && hi - lo > 1e-17 * (1.0 + std::fabs(lo)); ++it) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    const double gm = g(mid);
    if ((glo < 0.0) == (gm < 0.0)) {
      lo = mid;
      glo = gm;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

// Scans [0,1) at the given resolution for sign changes of g and bisects each
// bracket. Grid points that are themselves (near-)roots are taken directly.
template <typename G>
std::vector<double> scan_roots(G&& g, int grid, double direct_tol) {
  std::vector<double> roots;
  double x_prev = 0.0;
  double g_prev = g(0.0);
  for (int i = 1; i <= grid; ++i) {
    const double x = static_cast<double>(i) / grid;
    const double gx = g(x);
    if (std::fabs(g_prev) < direct_tol) {
      roots.push_back(wrap_unit(x_prev));
    } else if ((g_prev < 0.0) != (gx < 0.0)) {
      roots.push_back(wrap_unit(bisect(g, x_prev, x)));
    }
    x_prev = x;
    g_prev = gx;
  }
  std::sort(roots.begin(), roots.end());
  // Merge duplicates from a root sitting on a scan node.
  std::vector<double> out;
  for (double r : roots) {
    if (out.empty() || (circle_dist(out.back(), r) > 1e-9 &&
                        circle_dist(out.front(), r) > 1e-9))
      out.push_back(r);
  }
  return out;
}

inline constexpr int kScanGrid = 4096;

}  // namespace detail

// Zeros of Φ in [0, 1). Each zero must be transversal (|Φ'| bounded away
// from zero), else the map family hypothesis fails.
inline PointSet find_singular_points(const PhiSpec& phi) {
  auto value = [&phi](double x) { return phi.eval(x).value; };
  PointSet set;
  set.kind = PointKind::singular;
  set.tolerance = kSingularTol;
  set.points = detail::scan_roots(value, detail::kScanGrid, kSingularTol);
  for (double s : set.points) {
    const PhiEval e = phi.eval(s);
    if (std::fabs(e.d1) < 1e-6)
      throw DegenerateZero("zero of phi at " + std::to_string(s) +
                           " has vanishing slope");
  }
  return set;
}

// Zeros of f' = 1 + L·Φ'/Φ in [0,1) away from the singular set. Away from
// zeros of Φ these coincide with zeros of the smooth residual
// h = Φ/L + Φ', which has no singularities, so a plain scan over the whole
// circle brackets every root; h is nonzero near S because Φ' is.
inline PointSet find_critical_points(const PhiSpec& phi, double L) {
  auto h = [&phi, L](double x) {
    const PhiEval e = phi.eval(x);
    return e.value / L + e.d1;
  };
  PointSet set;
  set.kind = PointKind::critical;
  set.tolerance = critical_tol(L);
  for (double r : detail::scan_roots(h, detail::kScanGrid, 0.0)) {
    if (std::fabs(phi.eval(r).value) < 1e-6) continue;  // coincides with S
    set.points.push_back(r);
  }
  return set;
}

struct StructureSets {
  PointSet C;  // zeros of f' (position depends on L)
  PointSet S;  // zeros of Φ
};

inline StructureSets build_structure(const PhiSpec& phi, double L) {
  return {find_critical_points(phi, L), find_singular_points(phi)};
}

inline double dist_to(const PointSet& set, double x) {
  if (set.points.empty()) return 0.5;  // empty set: nothing to be near
  return nearest_in_set(x, set).dist;
}

}  // namespace logmap
