#pragma once

#include <cmath>
#include <optional>

#include "logmap/conditions.hpp"
#include "logmap/rng.hpp"
#include "logmap/windows.hpp"

namespace logmap {

// The parameter window I_n(a*, c) = [a* - D_n, a* + D_n], where D_n is the
// distortion window of the critical value orbit at a*.
struct ParameterWindow {
  double a_star = 0.0;
  double log_Dn = 0.0;  // kept in logs: D_n underflows a double near n ≈ 240
  std::size_t n = 0;
  double Dn() const { return std::exp(log_Dn); }
  bool representable() const {
    // Endpoint evaluation only makes sense while the window width clears the
    // parameter's own ulp by a safe margin.
    const double ulp = std::nextafter(std::fabs(a_star) + 1.0, 2.0) -
                       (std::fabs(a_star) + 1.0);
    return Dn() >= 64.0 * ulp;
  }
};

inline std::optional<ParameterWindow> parameter_window(
    const MapParams& p, const StructureSets& st, std::size_t c_index,
    std::size_t n) {
  const FEval c0 = f_eval(p, st.C.points[c_index]);
  if (c0.status != EvalStatus::ok) return std::nullopt;
  const OrbitRecord rec = iterate_orbit(p, st, c0.y, n);
  if (rec.halted() || rec.last() < n) return std::nullopt;
  const WindowTable w = compute_window_table(rec, p.L, n);
  return ParameterWindow{p.a, w.at(n), n};
}

// Comparability of the parameter derivative across one window: for a inside
// I_n(a*, c), |τ_k(a)| / |τ_k(a*)| ∈ (1/2, 2] for every k ≤ n.
struct ComparabilityReport {
  bool applicable = false;
  std::size_t samples = 0;
  std::size_t violations = 0;
  double min_ratio = 1.0;
  double max_ratio = 1.0;
  bool pass() const { return applicable && violations == 0; }
};

inline ComparabilityReport window_comparability(const MapParams& p_star,
                                                const StructureSets& st,
                                                std::size_t c_index,
                                                std::size_t n, int samples,
                                                SplitMix64& rng) {
  ComparabilityReport rep;
  const auto win = parameter_window(p_star, st, c_index, n);
  if (!win || !win->representable()) return rep;

  auto tau_at = [&](double a) -> std::optional<TauRecord> {
    MapParams p = p_star;
    p.a = a;
    const FEval c0 = f_eval(p, st.C.points[c_index]);
    if (c0.status != EvalStatus::ok) return std::nullopt;
    const OrbitRecord rec = iterate_orbit(p, st, c0.y, n);
    if (rec.halted() || rec.last() < n) return std::nullopt;
    return tau_from_record(rec, c_index);
  };
  const auto tau_star = tau_at(p_star.a);
  if (!tau_star) return rep;
  rep.applicable = true;

  const double Dn = win->Dn();
  for (int s = 0; s < samples; ++s) {
    const double a = p_star.a + Dn * (2.0 * rng.uniform() - 1.0);
    const auto tau = tau_at(a);
    if (!tau) continue;
    ++rep.samples;
    for (std::size_t k = 1; k <= n; ++k) {
      const double ratio = std::exp(tau->log_abs[k] - tau_star->log_abs[k]);
      rep.min_ratio = std::min(rep.min_ratio, ratio);
      rep.max_ratio = std::max(rep.max_ratio, ratio);
      if (!(ratio > 0.5 && ratio <= 2.0)) ++rep.violations;
    }
  }
  return rep;
}

// Length of the image of the parameter window under a ↦ c_n(a), against the
// applicable floor: L^{1/7}·σ for n ≤ N, L^{-3αn} beyond. When the window
// endpoints are distinguishable in doubles the image is measured directly
// (γ_n at both endpoints, unwrapped by the shortest displacement); once D_n
// drops below parameter resolution the first-order estimate 2·|τ_n|·D_n
// stands in. Images wider than 1/4 cannot be unwrapped on the circle and are
// reported as the lower bound 1/4.
struct WindowImageReport {
  enum class Regime { endpoints, first_order };
  bool applicable = false;
  Regime regime = Regime::endpoints;
  bool wrapped = false;
  double length = 0.0;
  double bound = 0.0;
  bool pass = false;
};

inline WindowImageReport window_image_bound(const MapParams& p_star,
                                            const StructureSets& st,
                                            const ConstantsProfile& profile,
                                            std::size_t c_index,
                                            std::size_t n) {
  WindowImageReport rep;
  const auto win = parameter_window(p_star, st, c_index, n);
  if (!win) return rep;

  const FEval c0 = f_eval(p_star, st.C.points[c_index]);
  const OrbitRecord rec_star = iterate_orbit(p_star, st, c0.y, n);
  if (rec_star.halted() || rec_star.last() < n) return rep;
  const TauRecord tau_star = tau_from_record(rec_star, c_index);
  rep.applicable = true;

  // τ_n and D_n separately overflow/underflow far before their product does,
  // so the first-order length estimate is assembled in logs.
  const double log_estimate =
      std::log(2.0) + tau_star.log_abs[n] + win->log_Dn;
  const double estimate = std::exp(log_estimate);

  auto gamma_n = [&](double a) -> std::optional<double> {
    MapParams p = p_star;
    p.a = a;
    const FEval v0 = f_eval(p, st.C.points[c_index]);
    if (v0.status != EvalStatus::ok) return std::nullopt;
    const OrbitRecord r = iterate_orbit(p, st, v0.y, n);
    if (r.halted() || r.last() < n) return std::nullopt;
    return r.points[n];
  };

  if (log_estimate > std::log(0.25)) {
    rep.wrapped = true;
    rep.length = 0.25;
  } else if (win->representable()) {
    rep.regime = WindowImageReport::Regime::endpoints;
    const auto lo = gamma_n(p_star.a - win->Dn());
    const auto hi = gamma_n(p_star.a + win->Dn());
    if (lo && hi) {
      rep.length = std::fabs(signed_circle_diff(*hi, *lo));
    } else {
      rep.length = estimate;  // an endpoint orbit halted; fall back
      rep.regime = WindowImageReport::Regime::first_order;
    }
  } else {
    rep.regime = WindowImageReport::Regime::first_order;
    rep.length = estimate;
  }

  const double logL = std::log(p_star.L);
  rep.bound = (n <= static_cast<std::size_t>(profile.N))
                  ? std::exp(logL / 7.0) * profile.sigma(p_star.L)
                  : std::pow(p_star.L, -3.0 * profile.alpha *
                                           static_cast<double>(n));
  rep.pass = rep.length >= rep.bound;
  return rep;
}

// Finite-difference reference for τ_k: the displacement of the k-th critical
// value point under a parameter nudge, divided by the nudge.
inline std::optional<double> tau_finite_difference(const MapParams& p,
                                                   const StructureSets& st,
                                                   std::size_t c_index,
                                                   std::size_t k, double h) {
  auto gamma_k = [&](double a) -> std::optional<double> {
    MapParams q = p;
    q.a = a;
    const FEval v0 = f_eval(q, st.C.points[c_index]);
    if (v0.status != EvalStatus::ok) return std::nullopt;
    OrbitRecord r = iterate_orbit(q, st, v0.y, k);
    if (r.halted() || r.last() < k) return std::nullopt;
    return r.points[k];
  };
  // a ± h rounds onto the double grid; dividing by the nominal 2h would
  // misstate the realized spacing by up to ulp(a)/2h. The difference of the
  // two rounded endpoints is exact, so use it as the denominator.
  const double ap = p.a + h;
  const double am = p.a - h;
  const auto plus = gamma_k(ap);
  const auto minus = gamma_k(am);
  if (!plus || !minus || ap == am) return std::nullopt;
  return signed_circle_diff(*plus, *minus) / (ap - am);
}

}  // namespace logmap
