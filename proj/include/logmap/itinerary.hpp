#pragma once

#include <cmath>
#include <cstdint>
#include <optional>
#include <vector>

#include "logmap/binding.hpp"
#include "logmap/constants.hpp"
#include "logmap/orbit.hpp"
#include "logmap/windows.hpp"

namespace logmap {

// A free return of a critical orbit into the chosen neighborhood of C.
//   time:     step index of the return
//   binding:  index of the nearest critical point (the shadowed orbit)
//   depth_r:  the unique r with dist ∈ (L^{-r}, L^{-r+1}]
//   p:        bound period; p = 1 with outside_window set when the image
//             lands beyond the first window and no annulus applies
//   deep:     the return's closeness dominates the accumulated closeness of
//             every later-return stretch (flag filled by the deep detector)
struct ReturnEvent {
  std::size_t time = 0;
  std::size_t binding = 0;
  int depth_r = 0;
  int p = 1;
  bool deep = false;
  bool outside_window = false;
  bool saturated = false;
  double dist_c = 0.0;
};

struct Itinerary {
  std::vector<ReturnEvent> events;
  std::size_t horizon = 0;
  std::size_t owner = 0;
  bool halted = false;
};

// Shared lazily-built critical-value orbits and window tables, one per
// critical point, so itineraries binding to either point reuse them.
class BindingContext {
 public:
  BindingContext(const MapParams& p, const StructureSets& st,
                 std::size_t horizon)
      : params_(p), st_(st), horizon_(horizon),
        slots_(st.C.points.size()) {}

  struct Entry {
    OrbitRecord rec;
    WindowTable windows;
  };

  const Entry* get(std::size_t c_index) {
    if (c_index >= slots_.size()) return nullptr;
    auto& slot = slots_[c_index];
    if (!slot) {
      const FEval c0 = f_eval(params_, st_.C.points[c_index]);
      if (c0.status != EvalStatus::ok) {
        slot.emplace();  // unusable entry: empty record
        return nullptr;
      }
      Entry e;
      e.rec = iterate_orbit(params_, st_, c0.y, horizon_);
      e.windows = compute_window_table(e.rec, params_.L, horizon_);
      slot = std::move(e);
    }
    return slot->rec.points.empty() ? nullptr : &*slot;
  }

  const MapParams& params() const { return params_; }
  std::size_t horizon() const { return horizon_; }

 private:
  const MapParams& params_;
  const StructureSets& st_;
  std::size_t horizon_;
  std::vector<std::optional<Entry>> slots_;
};

inline int depth_index(double dist, double L) {
  // dist ∈ (L^{-r}, L^{-r+1}] picks out r = floor(-log_L dist) + 1; the
  // floor lands the closed upper endpoint in the right annulus.
  return static_cast<int>(std::floor(-std::log(dist) / std::log(L))) + 1;
}

// Decomposes the orbit of the critical value c₀ = f(c) into free segments
// and bound stretches: the first return is the first j ≥ 0 with
// dC(c_j) < radius, each later one is the first such j past the previous
// bound stretch, so n_1 < n_1+p_1 ≤ n_2 < n_2+p_2 ≤ ... by construction.
inline Itinerary build_itinerary(const OrbitRecord& rec, double radius,
                                 BindingContext& ctx, std::size_t owner) {
  Itinerary itin;
  itin.owner = owner;
  itin.horizon = rec.last();
  itin.halted = rec.halted();
  std::size_t j = 0;
  while (j <= rec.last()) {
    if (!(rec.dC[j] < radius)) {
      ++j;
      continue;
    }
    ReturnEvent ev;
    ev.time = j;
    ev.binding = rec.nearest_C[j];
    ev.dist_c = rec.dC[j];
    ev.depth_r = depth_index(ev.dist_c, ctx.params().L);
    if (j == rec.last()) {
      // No next point to place in an annulus; treat as an unresolved stub.
      ev.outside_window = true;
      ev.saturated = true;
    } else {
      const BindingContext::Entry* bind = ctx.get(ev.binding);
      if (bind == nullptr) {
        ev.outside_window = true;
      } else {
        const double d_next =
            circle_dist(rec.points[j + 1], bind->rec.points[0]);
        const BoundPeriodResult bp =
            bound_period_from_dist(bind->windows, d_next, ctx.horizon());
        ev.p = bp.p;
        ev.outside_window =
            bp.status == BoundPeriodResult::Status::outside_window;
        ev.saturated = bp.status == BoundPeriodResult::Status::saturated;
      }
    }
    itin.events.push_back(ev);
    j += static_cast<std::size_t>(ev.p > 0 ? ev.p : 1);
  }
  return itin;
}

// Deep-return flags from the return depths alone, in base-L logs. A return ν
// is deep iff for every earlier return i,
//   Σ_{returns j in (i, ν]} 2·log_L dC(c_j) ≤ log_L dC(c_i),
// equivalently T(ν) ≤ min_i [T(i) + log_L dC(c_i)] over cumulative depth
// sums T; the running minimum makes the scan linear. The first return has no
// earlier returns, so it is deep vacuously.
inline std::vector<bool> deep_flags_from_depths(
    const std::vector<double>& logL_dC) {
  std::vector<bool> deep(logL_dC.size(), false);
  double T = 0.0;
  double runmin = std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k < logL_dC.size(); ++k) {
    T += 2.0 * logL_dC[k];
    deep[k] = T <= runmin;
    runmin = std::min(runmin, T + logL_dC[k]);
  }
  return deep;
}

inline void detect_deep_returns(Itinerary& itin, double L) {
  std::vector<double> depths;
  depths.reserve(itin.events.size());
  const double logL = std::log(L);
  for (const ReturnEvent& ev : itin.events)
    depths.push_back(std::log(ev.dist_c) / logL);
  const std::vector<bool> deep = deep_flags_from_depths(depths);
  for (std::size_t k = 0; k < itin.events.size(); ++k)
    itin.events[k].deep = deep[k];
}

// One-call assembly at the standard return radius δ.
inline Itinerary build_itinerary(const MapParams& p, const StructureSets& st,
                                 const ConstantsProfile& profile,
                                 std::size_t owner, std::size_t horizon,
                                 double radius, BindingContext& ctx) {
  const BindingContext::Entry* own = ctx.get(owner);
  if (own == nullptr) return Itinerary{{}, horizon, owner, true};
  Itinerary itin = build_itinerary(own->rec, radius, ctx, owner);
  (void)profile;
  detect_deep_returns(itin, p.L);
  return itin;
}

}  // namespace logmap
