#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <map>
#include <stdexcept>
#include <vector>

#include "logmap/conditions.hpp"
#include "logmap/parallel.hpp"

namespace logmap {

// Scalar digest of one parameter's ConditionReport. First-failure steps are
// aggregated over critical points (-1 = no failure observed); the slope is
// the weakest critical orbit's.
struct ParamDigest {
  double a = 0.0;
  bool deltaN = false;
  long long g1_fail = -1;
  long long g2_fail = -1;
  long long g3_fail = -1;
  long long r_fail = -1;
  long long halted_at = -1;
  double slope = std::numeric_limits<double>::quiet_NaN();

  // Survival through step j: the initial stage passed and neither the depth
  // budget, singular avoidance, nor a halt has struck by j.
  bool good_through(std::size_t j) const {
    if (!deltaN) return false;
    const auto hit = [j](long long v) {
      return v >= 0 && static_cast<std::size_t>(v) <= j;
    };
    return !hit(g3_fail) && !hit(r_fail) && !hit(halted_at);
  }
};

inline ParamDigest digest_report(double a, const ConditionReport& rep) {
  ParamDigest d;
  d.a = a;
  d.deltaN = rep.deltaN_ok();
  const auto fold = [](long long& dst, std::size_t v) {
    if (dst < 0 || static_cast<long long>(v) < dst)
      dst = static_cast<long long>(v);
  };
  for (const auto& pc : rep.per_critical) {
    if (pc.g1_fail) fold(d.g1_fail, *pc.g1_fail);
    if (pc.g2_fail) fold(d.g2_fail, *pc.g2_fail);
    if (pc.g3_fail) fold(d.g3_fail, *pc.g3_fail);
    if (pc.r_fail) fold(d.r_fail, *pc.r_fail);
    if (pc.halted) fold(d.halted_at, pc.halted->first);
    if (pc.slope && !(d.slope <= *pc.slope)) d.slope = *pc.slope;
  }
  return d;
}

struct SweepResult {
  double L = 0.0;
  ConstantsProfile profile;
  PhiSpec phi;
  std::size_t M = 0;
  std::size_t n = 0;
  std::vector<ParamDigest> digests;
  double deltaN_fraction = 0.0;
  std::vector<double> good_fraction;  // index j = 0..n

  double resolution() const {
    return M == 0 ? 0.0 : 1.0 / static_cast<double>(M);
  }
};

// Full condition evaluation on the uniform grid a = k/M, k = 0..M-1.
inline SweepResult grid_sweep(const PhiSpec& phi, double L,
                              const ConstantsProfile& profile, std::size_t M,
                              std::size_t n, int threads = 1) {
  if (M == 0) throw std::invalid_argument("grid_sweep: M must be positive");
  SweepResult out;
  out.L = L;
  out.profile = profile;
  out.phi = phi;
  out.M = M;
  out.n = n;
  const StructureSets st = build_structure(phi, L);
  out.digests.resize(M);
  parallel_for(M, resolve_threads(threads),
               [&](std::size_t lo, std::size_t hi) {
                 for (std::size_t k = lo; k < hi; ++k) {
                   const MapParams p{
                       static_cast<double>(k) / static_cast<double>(M), L,
                       phi};
                   out.digests[k] =
                       digest_report(p.a, evaluate_conditions(p, st, profile, n));
                 }
               });

  // Survival histogram: bucket each parameter by its first exclusion step
  // (n+1 = never), then suffix-sum.
  std::vector<std::size_t> cut(n + 2, 0);
  std::size_t dn = 0;
  for (const auto& d : out.digests) {
    if (!d.deltaN) continue;
    ++dn;
    std::size_t e = n + 1;
    const auto consider = [&e](long long v) {
      if (v >= 0 && static_cast<std::size_t>(v) < e)
        e = static_cast<std::size_t>(v);
    };
    consider(d.g3_fail);
    consider(d.r_fail);
    consider(d.halted_at);
    ++cut[std::min(e, n + 1)];
  }
  out.deltaN_fraction = static_cast<double>(dn) / static_cast<double>(M);
  out.good_fraction.assign(n + 1, 0.0);
  std::size_t surviving = dn;
  for (std::size_t j = 0; j <= n; ++j) {
    surviving -= cut[j];
    out.good_fraction[j] =
        static_cast<double>(surviving) / static_cast<double>(M);
  }
  return out;
}

// Initial-stage measure only: the fraction of grid parameters whose critical
// value orbits all clear the σ-avoidance stage. Much cheaper than a full
// sweep when only this number is needed.
inline double deltaN_fraction_scan(const PhiSpec& phi, double L,
                                   const ConstantsProfile& profile,
                                   std::size_t M, int threads = 1) {
  if (M == 0) throw std::invalid_argument("deltaN_fraction_scan: M must be positive");
  const StructureSets st = build_structure(phi, L);
  const auto N = static_cast<std::size_t>(profile.N);
  std::vector<std::uint8_t> ok(M, 0);
  parallel_for(M, resolve_threads(threads),
               [&](std::size_t lo, std::size_t hi) {
                 for (std::size_t k = lo; k < hi; ++k) {
                   const MapParams p{
                       static_cast<double>(k) / static_cast<double>(M), L,
                       phi};
                   bool good = true;
                   for (double c : st.C.points) {
                     const FEval c0 = f_eval(p, c);
                     if (c0.status != EvalStatus::ok) {
                       good = false;
                       break;
                     }
                     const OrbitRecord rec = iterate_orbit(p, st, c0.y, N);
                     if (!check_deltaN_one(rec, profile, p.L).ok) {
                       good = false;
                       break;
                     }
                   }
                   ok[k] = good ? 1 : 0;
                 }
               });
  std::size_t count = 0;
  for (std::uint8_t v : ok) count += v;
  return static_cast<double>(count) / static_cast<double>(M);
}

// Per-step excluded fraction next to the closed-form per-step envelope
// L^{-λαj/100} + L^{-αj/3}, evaluated with the sweep's own constants.
struct StepExclusion {
  std::size_t j = 0;
  double excluded = 0.0;
  double bound = 0.0;
};

inline std::vector<StepExclusion> exclusion_comparison(const SweepResult& s) {
  std::vector<StepExclusion> rows;
  rows.reserve(s.n);
  for (std::size_t j = 1; j <= s.n; ++j) {
    StepExclusion row;
    row.j = j;
    row.excluded = s.good_fraction[j - 1] - s.good_fraction[j];
    const double jd = static_cast<double>(j);
    row.bound =
        std::pow(s.L, -s.profile.lambda * s.profile.alpha * jd / 100.0) +
        std::pow(s.L, -s.profile.alpha * jd / 3.0);
    rows.push_back(row);
  }
  return rows;
}

// ---------------------------------------------------------------------------
// Interval refinement

struct Interval {
  double lo = 0.0;
  double hi = 0.0;
  bool depth_exceeded = false;
  double width() const { return hi - lo; }
};

struct IntervalSet {
  std::vector<Interval> intervals;  // sorted, disjoint
  std::size_t generation = 0;

  double total_length() const {
    double s = 0.0;
    for (const auto& iv : intervals) s += iv.width();
    return s;
  }
  bool contains(double a) const {
    for (const auto& iv : intervals)
      if (a >= iv.lo && a < iv.hi) return true;
    return false;
  }
};

// Inductive refinement of the surviving parameter set, one generation per
// horizon from the initial stage up to n_max. Each interval is classified by
// three probes: unanimous pass keeps it whole, unanimous fail discards it,
// and a mixed verdict subdivides until the width limit or subdivision depth
// is reached, at which point the interval is kept with depth_exceeded set.
// Probes sit at the midpoint and 1/64 inside each end — never on the
// endpoints: the intervals are half-open (the right endpoint belongs to the
// neighbor), and the dyadic endpoint lattice k/4 consists precisely of the
// parameters that translate a critical point onto C ∪ S, where Δ_N fails for
// arithmetic rather than dynamical reasons. Probing there would unanimously
// discard [0,1) at the root. Probes are evaluated once at horizon n_max; a
// probe that fails generation n also fails every later generation, so the
// cached verdict serves all generations.
inline std::vector<IntervalSet> interval_refine(const PhiSpec& phi, double L,
                                                const ConstantsProfile& profile,
                                                std::size_t n_max, int depth,
                                                double width_min = 1e-12) {
  const auto N = static_cast<std::size_t>(profile.N);
  if (n_max < N)
    throw std::invalid_argument("interval_refine: n_max below the initial stage");
  const StructureSets st = build_structure(phi, L);

  struct Verdict {
    bool deltaN = false;
    std::size_t first_excl = std::numeric_limits<std::size_t>::max();
  };
  std::map<double, Verdict> cache;
  const auto probe = [&](double a) -> const Verdict& {
    auto it = cache.find(a);
    if (it == cache.end()) {
      const MapParams p{a, L, phi};
      const ConditionReport rep = evaluate_conditions(p, st, profile, n_max);
      Verdict v;
      v.deltaN = rep.deltaN_ok();
      if (const auto fe = rep.first_exclusion()) v.first_excl = *fe;
      it = cache.emplace(a, v).first;
    }
    return it->second;
  };
  const auto passes = [&](double a, std::size_t gen) {
    const Verdict& v = probe(a);
    return v.deltaN && v.first_excl > gen;
  };

  std::vector<IntervalSet> out;
  std::vector<Interval> current{{0.0, 1.0, false}};
  for (std::size_t gen = N; gen <= n_max; ++gen) {
    std::vector<Interval> kept;
    std::vector<Interval> work = current;
    while (!work.empty()) {
      const Interval iv = work.back();
      work.pop_back();
      const double mid = 0.5 * (iv.lo + iv.hi);
      // Exact dyadic inset keeps probe values bit-identical when the same
      // interval recurs in later generations, so the cache stays effective.
      const double inset = iv.width() / 64.0;
      const int votes = (passes(iv.lo + inset, gen) ? 1 : 0) +
                        (passes(mid, gen) ? 1 : 0) +
                        (passes(iv.hi - inset, gen) ? 1 : 0);
      if (votes == 3) {
        kept.push_back({iv.lo, iv.hi, false});
        continue;
      }
      if (votes == 0) continue;
      // All intervals are dyadic pieces of [0,1), so the subdivision level
      // is recoverable from the width alone.
      const int level = static_cast<int>(std::lround(-std::log2(iv.width())));
      if (level >= depth || iv.width() <= width_min) {
        kept.push_back({iv.lo, iv.hi, true});
        continue;
      }
      work.push_back({iv.lo, mid, false});
      work.push_back({mid, iv.hi, false});
    }
    std::sort(kept.begin(), kept.end(),
              [](const Interval& x, const Interval& y) { return x.lo < y.lo; });
    IntervalSet set;
    set.intervals = kept;
    set.generation = gen;
    out.push_back(set);
    current = std::move(kept);
  }
  return out;
}

// ---------------------------------------------------------------------------
// Closed-form exclusion bounds

struct BoundsRecord {
  double deep_exclusion = 0.0;      // L^{-λαn/100}
  double distance_exclusion = 0.0;  // L^{-αn/3}
  double min_bound_period = 0.0;    // (1/2)αN
  double max_deep_returns = 0.0;    // 2n/(αN)
  double recovery_exponent = 0.0;   // λαn/20
  double log10_deep_exclusion = 0.0;
  double log10_distance_exclusion = 0.0;
};

// Pure arithmetic in the profile constants; the log10 fields stay meaningful
// when the plain values flush to 0 or round to 1.
inline BoundsRecord theoretical_bounds(const ConstantsProfile& profile,
                                       double L, double n) {
  BoundsRecord b;
  const double lg = std::log10(L);
  b.log10_deep_exclusion = -profile.lambda * profile.alpha * n / 100.0 * lg;
  b.log10_distance_exclusion = -profile.alpha * n / 3.0 * lg;
  b.deep_exclusion = std::pow(10.0, b.log10_deep_exclusion);
  b.distance_exclusion = std::pow(10.0, b.log10_distance_exclusion);
  b.min_bound_period = 0.5 * profile.alpha * static_cast<double>(profile.N);
  b.max_deep_returns =
      2.0 * n / (profile.alpha * static_cast<double>(profile.N));
  b.recovery_exponent = profile.lambda * profile.alpha * n / 20.0;
  return b;
}

// ---------------------------------------------------------------------------
// Lyapunov census over sweep survivors

struct CensusStats {
  std::size_t survivors = 0;
  std::size_t measured = 0;  // survivors with a computable slope
  std::size_t horizon = 0;
  double min_slope = std::numeric_limits<double>::quiet_NaN();
  double median_slope = std::numeric_limits<double>::quiet_NaN();
  double frac_third = std::numeric_limits<double>::quiet_NaN();
  bool pass = false;  // min slope ≥ λ·ln L over all measured survivors
};

// Re-derives the Lyapunov slope of every critical orbit of every surviving
// parameter at the requested horizon; a parameter's slope is its weakest
// orbit's.
inline CensusStats lyapunov_census(const SweepResult& sweep,
                                   std::size_t horizon, int threads = 1) {
  CensusStats out;
  out.horizon = horizon;
  std::vector<double> params;
  for (const auto& d : sweep.digests)
    if (d.good_through(sweep.n)) params.push_back(d.a);
  out.survivors = params.size();
  if (params.empty()) return out;

  const StructureSets st = build_structure(sweep.phi, sweep.L);
  std::vector<double> slopes(params.size(),
                             std::numeric_limits<double>::quiet_NaN());
  parallel_for(params.size(), resolve_threads(threads),
               [&](std::size_t lo, std::size_t hi) {
                 for (std::size_t k = lo; k < hi; ++k) {
                   const MapParams p{params[k], sweep.L, sweep.phi};
                   double worst = std::numeric_limits<double>::quiet_NaN();
                   for (double c : st.C.points) {
                     const FEval c0 = f_eval(p, c);
                     if (c0.status != EvalStatus::ok) continue;
                     const OrbitRecord rec = iterate_orbit(p, st, c0.y, horizon);
                     const auto s = lyapunov_slope(rec);
                     if (s && !(worst <= *s)) worst = *s;
                   }
                   slopes[k] = worst;
                 }
               });

  std::vector<double> finite;
  finite.reserve(slopes.size());
  for (double s : slopes)
    if (std::isfinite(s)) finite.push_back(s);
  out.measured = finite.size();
  if (finite.empty()) return out;
  std::sort(finite.begin(), finite.end());
  out.min_slope = finite.front();
  out.median_slope = finite[finite.size() / 2];
  const double third = std::log(sweep.L) / 3.0;
  std::size_t above = 0;
  for (double s : finite)
    if (s >= third) ++above;
  out.frac_third = static_cast<double>(above) / static_cast<double>(finite.size());
  out.pass = out.measured == out.survivors &&
             out.min_slope >= sweep.profile.lambda * std::log(sweep.L);
  return out;
}

// ---------------------------------------------------------------------------
// Measure trend across L

struct TrendRow {
  double L = 0.0;
  double deltaN_fraction = 0.0;
  double good_fraction_n = 0.0;
  CensusStats census;
};

struct TrendStudy {
  std::vector<TrendRow> rows;
  std::size_t M = 0;
  std::size_t n = 0;
  double tolerance = 0.0;  // 2/√M
  bool monotone_pass = false;
};

inline TrendStudy trend_study(const PhiSpec& phi, const std::vector<double>& Ls,
                              const ConstantsProfile& profile, std::size_t M,
                              std::size_t n, int threads = 1) {
  if (Ls.empty()) throw std::invalid_argument("trend_study: empty L list");
  for (std::size_t i = 1; i < Ls.size(); ++i)
    if (!(Ls[i] > Ls[i - 1]))
      throw std::invalid_argument("trend_study: L values must increase");
  TrendStudy out;
  out.M = M;
  out.n = n;
  out.tolerance = 2.0 / std::sqrt(static_cast<double>(M));
  for (double L : Ls) {
    const SweepResult sweep = grid_sweep(phi, L, profile, M, n, threads);
    TrendRow row;
    row.L = L;
    row.deltaN_fraction = sweep.deltaN_fraction;
    row.good_fraction_n = sweep.good_fraction[n];
    row.census = lyapunov_census(sweep, n, threads);
    out.rows.push_back(row);
  }
  out.monotone_pass = true;
  for (std::size_t i = 1; i < out.rows.size(); ++i) {
    if (out.rows[i].good_fraction_n <
        out.rows[i - 1].good_fraction_n - out.tolerance)
      out.monotone_pass = false;
  }
  return out;
}

}  // namespace logmap
