#pragma once

#include <cmath>
#include <limits>
#include <stdexcept>
#include <vector>

#include "logmap/constants.hpp"
#include "logmap/logsum.hpp"
#include "logmap/orbit.hpp"
#include "logmap/rng.hpp"

namespace logmap {

// ln D_n around a critical value c₀, where
//   D_n = L^{-1/2} · [Σ_{i<n} d_i⁻¹]⁻¹,  d_i = dC(c_i)·dS(c_i)/J^i(c₀),
// computed as ln D_n = -½·lnL - logsumexp_i(-log_d[i]). Entry 0 is a NaN
// sentinel; entries run 1..valid_to. The sum grows with n, so the table is
// strictly decreasing.
struct WindowTable {
  std::vector<double> log_Dn;
  std::size_t valid_to = 0;
  double c0 = 0.0;

  double at(std::size_t n) const {
    if (n < 1 || n > valid_to)
      throw std::out_of_range("WindowTable: n outside 1..valid_to");
    return log_Dn[n];
  }
};

inline WindowTable compute_window_table(const OrbitRecord& rec, double L,
                                        std::size_t n_max) {
  WindowTable t;
  t.c0 = rec.points[0];
  const std::size_t limit = std::min(n_max, rec.last());
  t.log_Dn.assign(limit + 1, std::numeric_limits<double>::quiet_NaN());
  LogSumExp lse;
  const double half_logL = 0.5 * std::log(L);
  for (std::size_t i = 0; i < limit; ++i) {
    lse.add(-rec.log_d[i]);
    t.log_Dn[i + 1] = -half_logL - lse.value();
  }
  t.valid_to = limit;
  return t;
}

inline double log_window(const OrbitRecord& rec, double L, std::size_t n) {
  if (n > rec.last()) throw std::out_of_range("log_window: orbit too short");
  return compute_window_table(rec, L, n).at(n);
}

// Empirical distortion over the window [c₀-D_n, c₀+D_n]: the maximum of
// J^n(x)/J^n(y) over sampled pairs. Pairs whose orbit hits C or S are
// reported, not fatal; the hypothesis excludes hits on the central orbit
// only.
struct DistortionReport {
  double max_ratio = 1.0;
  std::size_t pairs_tested = 0;
  std::size_t pairs_halted = 0;
  bool central_ok = false;
  bool pass = false;  // max_ratio ≤ 2 with a usable central orbit
};

inline DistortionReport distortion_ratio(const MapParams& p,
                                         const StructureSets& st,
                                         double critical_point, std::size_t n,
                                         int pairs, SplitMix64& rng) {
  DistortionReport rep;
  const FEval c0 = f_eval(p, critical_point);
  if (c0.status != EvalStatus::ok) return rep;
  const OrbitRecord rec = iterate_orbit(p, st, c0.y, n);
  if (rec.halted() || rec.last() < n) return rep;
  rep.central_ok = true;
  const double Dn = std::exp(compute_window_table(rec, p.L, n).at(n));

  auto log_Jn = [&](double x) -> std::optional<double> {
    double acc = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const StepResult s = map_step(p, x);
      if (s.status != EvalStatus::ok) return std::nullopt;
      acc += s.log_fp;
      x = s.y;
    }
    return acc;
  };

  for (int k = 0; k < pairs; ++k) {
    const double x = c0.y + Dn * (2.0 * rng.uniform() - 1.0);
    const double y = c0.y + Dn * (2.0 * rng.uniform() - 1.0);
    const auto jx = log_Jn(x), jy = log_Jn(y);
    if (!jx || !jy) {
      ++rep.pairs_halted;
      continue;
    }
    ++rep.pairs_tested;
    rep.max_ratio = std::max(rep.max_ratio, std::exp(std::fabs(*jx - *jy)));
  }
  rep.pass = rep.central_ok && rep.max_ratio <= 2.0;
  return rep;
}

// Expansion along a segment that stays outside C_δ: J^n ≥ δ·L^{2λn}, and the
// stronger J^n ≥ L^{2λn} when the segment's endpoint has just entered C_δ.
struct OutsideExpansionReport {
  enum class Status { pass, fail, inapplicable, halted };
  Status status = Status::inapplicable;
  bool ends_in_C_delta = false;
  double log_Jn = 0.0;
  double margin = 0.0;          // ln J^n - required (the binding branch)
  std::size_t witness = 0;      // first step inside C_δ when inapplicable
};

inline OutsideExpansionReport outside_expansion_check(
    const MapParams& p, const StructureSets& st,
    const ConstantsProfile& profile, double x0, std::size_t n) {
  OutsideExpansionReport rep;
  const double delta = profile.delta(p.L);
  const OrbitRecord rec = iterate_orbit(p, st, x0, n);
  if (rec.halted() || rec.last() < n) {
    rep.status = OutsideExpansionReport::Status::halted;
    return rep;
  }
  for (std::size_t i = 0; i < n; ++i) {
    if (rec.dC[i] < delta) {
      rep.status = OutsideExpansionReport::Status::inapplicable;
      rep.witness = i;
      return rep;
    }
  }
  const double logL = std::log(p.L);
  rep.log_Jn = rec.log_deriv_prefix[n];
  rep.ends_in_C_delta = rec.dC[n] < delta;
  double required = std::log(delta) + 2.0 * profile.lambda *
                                          static_cast<double>(n) * logL;
  if (rep.ends_in_C_delta)
    required = 2.0 * profile.lambda * static_cast<double>(n) * logL;
  rep.margin = rep.log_Jn - required;
  rep.status = rep.margin >= 0.0 ? OutsideExpansionReport::Status::pass
                                 : OutsideExpansionReport::Status::fail;
  return rep;
}

}  // namespace logmap
