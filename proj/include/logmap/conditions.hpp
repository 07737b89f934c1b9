#pragma once

#include <cmath>
#include <optional>
#include <vector>

#include "logmap/itinerary.hpp"

namespace logmap {

// Initial avoidance: every critical value orbit stays σ away from both the
// critical and the singular set through step N (points c_0..c_N, where
// c_0 = f(c)). A halted orbit counts as failure at the halt step.
struct DeltaNResult {
  bool ok = true;
  std::optional<std::size_t> witness_step;
  std::optional<std::size_t> witness_critical;
};

inline DeltaNResult check_deltaN_one(const OrbitRecord& rec,
                                     const ConstantsProfile& profile,
                                     double L) {
  DeltaNResult r;
  const double sigma = profile.sigma(L);
  const std::size_t N = static_cast<std::size_t>(profile.N);
  for (std::size_t i = 0; i <= N; ++i) {
    if (i > rec.last()) {  // halted before reaching step i
      r.ok = false;
      r.witness_step = rec.last();
      return r;
    }
    if (rec.dC[i] < sigma || rec.dS[i] < sigma) {
      r.ok = false;
      r.witness_step = i;
      return r;
    }
  }
  return r;
}

// Growth condition pair scan: J^{j-i}(c_i) ≥ L·min{σ, L^{-αi}} for all
// 0 ≤ i < j ≤ n+1. The threshold depends on i alone, so the earliest
// violating j is found exactly by one forward pass: j violates some pair iff
// prefix(j) < max_{i<j} [prefix(i) + ln(L·min{σ, L^{-αi}})].
inline std::optional<std::size_t> check_G1(const OrbitRecord& rec,
                                           const ConstantsProfile& profile,
                                           double L, std::size_t n) {
  const double logL = std::log(L);
  const double log_sigma = std::log(profile.sigma(L));
  const std::size_t limit = std::min(n + 1, rec.last());
  double runmax = -std::numeric_limits<double>::infinity();
  for (std::size_t j = 1; j <= limit; ++j) {
    const std::size_t i = j - 1;
    const double log_min =
        std::min(log_sigma, -profile.alpha * static_cast<double>(i) * logL);
    runmax = std::max(runmax, rec.log_deriv_prefix[i] + logL + log_min);
    if (rec.log_deriv_prefix[j] < runmax) return j;
  }
  return std::nullopt;
}

// Cumulative growth: J^i(c₀) ≥ L^{λi} for 0 < i ≤ n+1.
inline std::optional<std::size_t> check_G2(const OrbitRecord& rec,
                                           const ConstantsProfile& profile,
                                           double L, std::size_t n) {
  const double rate = profile.lambda * std::log(L);
  const std::size_t limit = std::min(n + 1, rec.last());
  for (std::size_t i = 1; i <= limit; ++i) {
    if (rec.log_deriv_prefix[i] < rate * static_cast<double>(i)) return i;
  }
  return std::nullopt;
}

// Singular avoidance after the initial stretch: dS(c_i) ≥ L^{-4αi} for
// N ≤ i ≤ n.
inline std::optional<std::size_t> check_G3(const OrbitRecord& rec,
                                           const ConstantsProfile& profile,
                                           double L, std::size_t n) {
  const double rate = 4.0 * profile.alpha * std::log(L);
  const std::size_t limit = std::min(n, rec.last());
  for (std::size_t i = static_cast<std::size_t>(profile.N); i <= limit; ++i) {
    if (std::log(rec.dS[i]) < -rate * static_cast<double>(i)) return i;
  }
  return std::nullopt;
}

// Depth budget over deep returns: Π_{deep i ≤ j} dC(c_i) ≥ L^{-λαj/20} for
// every N ≤ j ≤ n. The running depth sum only moves at deep returns and the
// budget loosens as j grows, so failures can only first appear at j = N or
// at a deep-return time; scanning those candidates gives the exact first
// failing j.
inline std::optional<std::size_t> check_R(const Itinerary& itin,
                                          const ConstantsProfile& profile,
                                          double L, std::size_t n) {
  const double logL = std::log(L);
  const double budget_rate = profile.lambda * profile.alpha / 20.0;
  const std::size_t N = static_cast<std::size_t>(profile.N);
  double T = 0.0;  // Σ log_L dC over deep returns seen so far
  std::size_t ev = 0;
  auto violated_at = [&](std::size_t j) {
    return T < -budget_rate * static_cast<double>(j);
  };
  // Accumulate returns before N, then check at j = N.
  while (ev < itin.events.size() && itin.events[ev].time <= N) {
    if (itin.events[ev].deep) T += std::log(itin.events[ev].dist_c) / logL;
    ++ev;
  }
  if (N <= n && violated_at(N)) return N;
  while (ev < itin.events.size() && itin.events[ev].time <= n) {
    const ReturnEvent& e = itin.events[ev];
    if (e.deep) {
      T += std::log(e.dist_c) / logL;
      if (violated_at(e.time)) return e.time;
    }
    ++ev;
  }
  return std::nullopt;
}

// Full per-parameter condition evaluation across all critical points.
struct ConditionReport {
  struct PerCritical {
    bool deltaN_ok = false;
    std::optional<std::size_t> deltaN_witness;
    std::optional<std::size_t> g1_fail, g2_fail, g3_fail, r_fail;
    std::optional<std::pair<std::size_t, EvalStatus>> halted;
    std::size_t returns = 0;
    std::size_t deep_returns = 0;
    std::optional<double> slope;
  };
  std::vector<PerCritical> per_critical;
  std::size_t horizon = 0;

  bool deltaN_ok() const {
    for (const auto& pc : per_critical)
      if (!pc.deltaN_ok) return false;
    return !per_critical.empty();
  }
  // The inductive good set keeps a parameter while Δ_N holds and neither the
  // depth budget nor singular avoidance has failed by step j (halts fail at
  // the halt step).
  std::optional<std::size_t> first_exclusion() const {
    std::optional<std::size_t> first;
    auto consider = [&first](std::optional<std::size_t> v) {
      if (v && (!first || *v < *first)) first = v;
    };
    for (const auto& pc : per_critical) {
      consider(pc.r_fail);
      consider(pc.g3_fail);
      if (pc.halted) consider(pc.halted->first);
    }
    return first;
  }
  bool good_through(std::size_t j) const {
    if (!deltaN_ok()) return false;
    const auto fe = first_exclusion();
    return !fe || *fe > j;
  }
};

inline ConditionReport evaluate_conditions(const MapParams& p,
                                           const StructureSets& st,
                                           const ConstantsProfile& profile,
                                           std::size_t n) {
  ConditionReport rep;
  rep.horizon = n;
  const double delta = profile.delta(p.L);
  BindingContext ctx(p, st, n + 1);
  for (std::size_t c = 0; c < st.C.points.size(); ++c) {
    ConditionReport::PerCritical pc;
    const BindingContext::Entry* entry = ctx.get(c);
    if (entry == nullptr) {
      pc.halted = {0, EvalStatus::singular_hit};
      rep.per_critical.push_back(pc);
      continue;
    }
    const OrbitRecord& rec = entry->rec;
    if (rec.halted_at) pc.halted = rec.halted_at;
    const DeltaNResult dn = check_deltaN_one(rec, profile, p.L);
    pc.deltaN_ok = dn.ok;
    pc.deltaN_witness = dn.witness_step;
    pc.g1_fail = check_G1(rec, profile, p.L, n);
    pc.g2_fail = check_G2(rec, profile, p.L, n);
    pc.g3_fail = check_G3(rec, profile, p.L, n);
    Itinerary itin = build_itinerary(rec, delta, ctx, c);
    detect_deep_returns(itin, p.L);
    pc.returns = itin.events.size();
    for (const auto& ev : itin.events)
      if (ev.deep) ++pc.deep_returns;
    pc.r_fail = check_R(itin, profile, p.L, n);
    pc.slope = lyapunov_slope(rec);
    rep.per_critical.push_back(pc);
  }
  return rep;
}

// Parameter-derivative recursion along a critical value orbit:
//   τ_0 = 1,  τ_k = 1 + f'(c_{k-1})·τ_{k-1},
// kept as (ln|τ|, sign) so the products never overflow. Three regimes keep
// the update stable: once |f'τ| is large the +1 is a log1p correction; when
// it is negligible τ is 1 + tiny; in between plain arithmetic is exact
// enough.
struct TauRecord {
  std::vector<double> log_abs;
  std::vector<int> sign;
  std::size_t owner = 0;

  double ratio_to_jacobian(const OrbitRecord& rec, std::size_t k) const {
    return std::exp(log_abs[k] - rec.log_deriv_prefix[k]);
  }
};

inline TauRecord tau_from_record(const OrbitRecord& rec, std::size_t owner = 0) {
  TauRecord tau;
  tau.owner = owner;
  const std::size_t n = rec.last();
  tau.log_abs.reserve(n + 1);
  tau.sign.reserve(n + 1);
  tau.log_abs.push_back(0.0);
  tau.sign.push_back(1);
  for (std::size_t k = 1; k <= n; ++k) {
    const double log_fp =
        rec.log_deriv_prefix[k] - rec.log_deriv_prefix[k - 1];
    const int sign_fp = rec.deriv_sign[k - 1];
    const double log_u = log_fp + tau.log_abs[k - 1];
    const int sign_u = sign_fp * tau.sign[k - 1];
    double log_t;
    int sign_t;
    if (sign_u == 0) {  // previous τ was exactly 0: τ_k = 1
      log_t = 0.0;
      sign_t = 1;
    } else if (log_u > 50.0) {
      log_t = log_u + std::log1p(static_cast<double>(sign_u) * std::exp(-log_u));
      sign_t = sign_u;
    } else if (log_u < -40.0) {
      log_t = std::log1p(static_cast<double>(sign_u) * std::exp(log_u));
      sign_t = 1;
    } else {
      const double v = 1.0 + static_cast<double>(sign_u) * std::exp(log_u);
      if (v == 0.0) {
        log_t = -std::numeric_limits<double>::infinity();
        sign_t = 0;
      } else {
        log_t = std::log(std::fabs(v));
        sign_t = v > 0.0 ? 1 : -1;
      }
    }
    tau.log_abs.push_back(log_t);
    tau.sign.push_back(sign_t);
  }
  return tau;
}

// Transversality: |τ_k| stays within a factor 2 of J^k(c₀) for all k ≤ n.
struct TransversalityReport {
  bool pass = false;
  double min_ratio = 1.0;
  double max_ratio = 1.0;
  std::optional<std::size_t> first_violation;
};

inline TransversalityReport transversality_report(const OrbitRecord& rec,
                                                  const TauRecord& tau,
                                                  std::size_t n) {
  TransversalityReport rep;
  const std::size_t limit = std::min(n, rec.last());
  for (std::size_t k = 0; k <= limit; ++k) {
    const double ratio = tau.ratio_to_jacobian(rec, k);
    rep.min_ratio = std::min(rep.min_ratio, ratio);
    rep.max_ratio = std::max(rep.max_ratio, ratio);
    if ((ratio < 0.5 || ratio > 2.0) && !rep.first_violation)
      rep.first_violation = k;
  }
  rep.pass = !rep.first_violation;
  return rep;
}

}  // namespace logmap
