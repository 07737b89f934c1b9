#pragma once

#include <cmath>
#include <optional>

#include "logmap/itinerary.hpp"

namespace logmap {

// Recovery at an in-window return: over the bound period the orbit regains
// the expansion it pledged at entry,
//   p ≤ log_L dist^{-2/λ}   and   J^p(x) ≥ max(dist^{-1+16α/λ}, L^{(λ/3)p}),
// with x the returning point and dist its distance to the binding critical
// point.
struct RecoveryReport {
  bool applicable = false;
  bool pass_cap = false;
  bool pass_growth = false;
  double log_Jp = 0.0;
  double cap_rhs = 0.0;       // allowed maximum for p
  double growth_margin = 0.0; // ln J^p minus the binding requirement
  bool pass() const { return applicable && pass_cap && pass_growth; }
};

inline RecoveryReport recovery_check(const ConstantsProfile& profile, double L,
                                     const ReturnEvent& ev,
                                     const OrbitRecord& owner_rec) {
  RecoveryReport rep;
  if (ev.outside_window || ev.saturated) return rep;
  const std::size_t end = ev.time + static_cast<std::size_t>(ev.p);
  if (end > owner_rec.last()) return rep;
  rep.applicable = true;

  const double logL = std::log(L);
  const double log_dist = std::log(ev.dist_c);
  rep.cap_rhs = (-2.0 / profile.lambda) * (log_dist / logL);
  rep.pass_cap = static_cast<double>(ev.p) <= rep.cap_rhs;

  rep.log_Jp = log_jacobian(owner_rec, ev.time, end);
  const double need = std::max(
      (-1.0 + 16.0 * profile.alpha / profile.lambda) * log_dist,
      (profile.lambda / 3.0) * static_cast<double>(ev.p) * logL);
  rep.growth_margin = rep.log_Jp - need;
  rep.pass_growth = rep.growth_margin >= 0.0;
  return rep;
}

// Empirical stand-in for the theory's generic constant in the two floor
// bounds below: the smallest constant that makes the distance floor hold on
// the given records, with 1.05 headroom.
inline double fit_floor_constant(const std::vector<const OrbitRecord*>& recs,
                                 const ConstantsProfile& profile, double L,
                                 std::size_t n) {
  const double sigma = profile.sigma(L);
  const double logL = std::log(L);
  double K = 1.0;
  for (const OrbitRecord* rec : recs) {
    const std::size_t limit = std::min(n, rec->last());
    for (std::size_t i = 0; i <= limit; ++i) {
      const double floor_i =
          sigma * std::exp(-profile.alpha * static_cast<double>(i) * logL);
      K = std::max(K, floor_i / rec->dC[i]);
    }
  }
  return 1.05 * K;
}

// Distance floor along a conditioned critical orbit: dC(c_i) ≥ K⁻¹·σ·L^{-αi}.
inline std::optional<std::size_t> floor_violation(const OrbitRecord& rec,
                                                  const ConstantsProfile& prof,
                                                  double L, std::size_t n,
                                                  double K) {
  const double logL = std::log(L);
  const double log_sigma_K = std::log(prof.sigma(L) / K);
  const std::size_t limit = std::min(n, rec.last());
  for (std::size_t i = 0; i <= limit; ++i) {
    if (std::log(rec.dC[i]) < log_sigma_K - prof.alpha * static_cast<double>(i) * logL)
      return i;
  }
  return std::nullopt;
}

// Window floor along a conditioned critical orbit: J^i(c₀)·D_{i+1} ≥ L^{-1-7αi}.
inline std::optional<std::size_t> window_floor_violation(
    const OrbitRecord& rec, const WindowTable& w, const ConstantsProfile& prof,
    double L, std::size_t n) {
  if (w.valid_to == 0) return std::nullopt;
  const double logL = std::log(L);
  const std::size_t limit = std::min({n, rec.last(), w.valid_to - 1});
  for (std::size_t i = 0; i <= limit; ++i) {
    const double lhs = rec.log_deriv_prefix[i] + w.at(i + 1);
    if (lhs < (-1.0 - 7.0 * prof.alpha * static_cast<double>(i)) * logL)
      return i;
  }
  return std::nullopt;
}

// Expansion at a deep return ν: J^ν(c₀)·D_ν(c₀) ≥ √dC(c_ν).
struct DeepExpansionReport {
  bool is_deep = false;
  bool pass = false;
  double lhs = 0.0;  // ln J^ν + ln D_ν
  double rhs = 0.0;  // ½·ln dC(c_ν)
  double margin() const { return lhs - rhs; }
};

inline DeepExpansionReport deep_return_expansion_check(const OrbitRecord& rec,
                                                       const WindowTable& w,
                                                       const ReturnEvent& ev) {
  DeepExpansionReport rep;
  rep.is_deep = ev.deep;
  if (!ev.deep) return rep;
  const std::size_t nu = ev.time;
  rep.lhs = rec.log_deriv_prefix[nu] + w.at(nu);
  rep.rhs = 0.5 * std::log(rec.dC[nu]);
  rep.pass = rep.lhs >= rep.rhs;
  return rep;
}

// The annulus point check: a point of C_{δ₀}\C_δ acquires a bound period
// p ≤ N and expands like J^p(y) ≥ K⁻¹·L^{-1/2}·σ²·dist⁻¹ and J^p(y) ≥ L^{p/300}.
struct AnnulusPointReport {
  bool in_annulus = false;
  bool outside_window = false;
  bool saturated = false;
  int p = 0;
  bool p_within_N = false;
  bool pass_dist_bound = false;
  bool pass_rate_bound = false;
  double log_Jp = 0.0;
  bool pass() const {
    return in_annulus && !outside_window && !saturated && p_within_N &&
           pass_dist_bound && pass_rate_bound;
  }
};

inline AnnulusPointReport annulus_point_check(
    const MapParams& params, const StructureSets& st,
    const ConstantsProfile& profile, std::size_t c_index, double y, double K,
    BindingContext& ctx) {
  AnnulusPointReport rep;
  const double c = st.C.points[c_index];
  const double dist = circle_dist(y, c);
  const double delta = profile.delta(params.L);
  const double delta0 = profile.delta0(params.L);
  rep.in_annulus = dist >= delta && dist < delta0;
  if (!rep.in_annulus) return rep;
  const BindingContext::Entry* bind = ctx.get(c_index);
  if (bind == nullptr) return rep;
  const BoundPeriodResult bp =
      bound_period(params, bind->rec, bind->windows, y, ctx.horizon());
  rep.outside_window = bp.status == BoundPeriodResult::Status::outside_window;
  rep.saturated = bp.status == BoundPeriodResult::Status::saturated;
  if (bp.status != BoundPeriodResult::Status::ok) return rep;
  rep.p = bp.p;
  rep.p_within_N = bp.p <= profile.N;

  // J^p(y) by direct iteration.
  double x = y, acc = 0.0;
  for (int i = 0; i < bp.p; ++i) {
    const StepResult s = map_step(params, x);
    if (s.status != EvalStatus::ok) return rep;
    acc += s.log_fp;
    x = s.y;
  }
  rep.log_Jp = acc;
  const double sigma = profile.sigma(params.L);
  const double logL = std::log(params.L);
  rep.pass_dist_bound =
      acc >= -std::log(K) - 0.5 * logL + 2.0 * std::log(sigma) - std::log(dist);
  rep.pass_rate_bound = acc >= static_cast<double>(bp.p) / 300.0 * logL;
  return rep;
}

// The scale ordering that makes the annulus construction work:
//   L⁻¹·D_N < δ² < δ₀² < L⁻¹·D_1,
// evaluated per critical orbit in log space.
struct ChainReport {
  double log_LinvDN = 0.0;
  double log_delta2 = 0.0;
  double log_delta02 = 0.0;
  double log_LinvD1 = 0.0;
  bool ok = false;
};

inline ChainReport appendix_chain_check(const WindowTable& w,
                                        const ConstantsProfile& profile,
                                        double L) {
  ChainReport rep;
  const double logL = std::log(L);
  const std::size_t N = static_cast<std::size_t>(profile.N);
  rep.log_LinvDN = -logL + w.at(std::min(N, w.valid_to));
  rep.log_delta2 = 2.0 * std::log(profile.delta(L));
  rep.log_delta02 = 2.0 * std::log(profile.delta0(L));
  rep.log_LinvD1 = -logL + w.at(1);
  rep.ok = rep.log_LinvDN < rep.log_delta2 &&
           rep.log_delta2 < rep.log_delta02 &&
           rep.log_delta02 < rep.log_LinvD1;
  return rep;
}

}  // namespace logmap
