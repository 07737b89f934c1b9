#pragma once

#include <algorithm>
#include <cmath>
#include <vector>

#include "logmap/map_family.hpp"
#include "logmap/point_set.hpp"
#include "logmap/rng.hpp"

namespace logmap {

// Empirical derivative-bracket constants for one Φ across a list of L:
//   K0:   single constant with K0⁻¹·L·dC/dS ≤ |f'| ≤ K0·L·dC/dS and
//         |f''| ≤ K0·L/dS² on the whole sample, with 1.05 headroom.
//   eps0: radius around the critical set where K0⁻¹·L < |f''| < K0·L,
//         with 0.95 headroom.
struct BracketFit {
  double K0 = 0.0;
  double eps0 = 0.0;
  std::size_t samples = 0;
};

namespace detail {

struct BracketRatios {
  double upper_a = 0.0;   // |f'|·dS/(L·dC)
  double lower_a = 0.0;   // L·dC/(dS·|f'|)
  double second = 0.0;    // |f''|·dS²/L
};

inline BracketRatios bracket_ratios(const MapParams& p,
                                    const StructureSets& st, double x) {
  const double dC = dist_to(st.C, x);
  const double dS = dist_to(st.S, x);
  const double fp = std::fabs(f_deriv_raw(p, x));
  const double fpp = std::fabs(f_second(p, x));
  return {fp * dS / (p.L * dC), p.L * dC / (dS * fp), fpp * dS * dS / p.L};
}

inline bool too_close(const StructureSets& st, double x, double margin) {
  return dist_to(st.C, x) < margin || dist_to(st.S, x) < margin;
}

}  // namespace detail

// Maximizes the three bracket ratios over a dense grid plus a random sample
// at every L, then adds the safety factor. The constant is existential in
// the underlying theory; the fit reports the one that actually works here.
inline BracketFit fit_derivative_constant(const PhiSpec& phi,
                                          const std::vector<double>& Ls,
                                          int grid, int random_samples,
                                          std::uint64_t seed) {
  BracketFit fit;
  double worst = 0.0;
  for (double L : Ls) {
    const MapParams p{0.0, L, phi};
    const StructureSets st = build_structure(phi, L);
    SplitMix64 rng(derive_seed(seed, 0xb2acce75, static_cast<std::uint64_t>(L)));
    auto feed = [&](double x) {
      if (detail::too_close(st, x, 1e-8)) return;
      const auto r = detail::bracket_ratios(p, st, x);
      worst = std::max({worst, r.upper_a, r.lower_a, r.second});
      ++fit.samples;
    };
    for (int i = 0; i < grid; ++i) feed((i + 0.5) / static_cast<double>(grid));
    for (int i = 0; i < random_samples; ++i) feed(rng.uniform());
  }
  fit.K0 = 1.05 * worst;

  // Largest radius where the two-sided |f''| bracket holds at every L,
  // probed on a per-radius grid and shrunk by bisection.
  auto bracket_holds_at = [&](double eps) {
    for (double L : Ls) {
      const MapParams p{0.0, L, phi};
      const StructureSets st = build_structure(phi, L);
      for (double c : st.C.points) {
        for (int i = 1; i <= 256; ++i) {
          const double t = eps * static_cast<double>(i) / 256.0;
          for (double x : {c - t, c + t}) {
            const double fpp = std::fabs(f_second(p, x));
            if (!(fpp > p.L / fit.K0) || !(fpp < fit.K0 * p.L)) return false;
          }
        }
      }
    }
    return true;
  };
  double lo = 0.0, hi = 0.25;
  for (int it = 0; it < 40; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (bracket_holds_at(mid)) lo = mid; else hi = mid;
  }
  fit.eps0 = 0.95 * lo;
  return fit;
}

// Fresh-sample verification of all bracket forms at one L.
struct BracketReport {
  std::size_t tested = 0;
  std::size_t viol_upper_a = 0;   // |f'| ≤ K0·L·dC/dS
  std::size_t viol_lower_a = 0;   // |f'| ≥ K0⁻¹·L·dC/dS
  std::size_t viol_second = 0;    // |f''| ≤ K0·L/dS²
  std::size_t viol_eps_form = 0;  // x ∉ C_ε ⇒ |f'| ≥ K0⁻¹·L·ε
  std::size_t viol_near_c = 0;    // K0⁻¹·L < |f''| < K0·L on C_eps0
  std::size_t violations() const {
    return viol_upper_a + viol_lower_a + viol_second + viol_eps_form +
           viol_near_c;
  }
};

inline BracketReport verify_derivative_brackets(const PhiSpec& phi, double L,
                                                const BracketFit& fit,
                                                int samples,
                                                std::uint64_t seed) {
  const MapParams p{0.0, L, phi};
  const StructureSets st = build_structure(phi, L);
  SplitMix64 rng(derive_seed(seed, 0x0b5e77ed, static_cast<std::uint64_t>(L)));
  BracketReport rep;
  const double eps_probes[] = {1e-1, 1e-2, 1e-3};
  for (int i = 0; i < samples; ++i) {
    const double x = rng.uniform();
    if (detail::too_close(st, x, 1e-8)) continue;
    const auto r = detail::bracket_ratios(p, st, x);
    ++rep.tested;
    if (r.upper_a > fit.K0) ++rep.viol_upper_a;
    if (r.lower_a > fit.K0) ++rep.viol_lower_a;
    if (r.second > fit.K0) ++rep.viol_second;
    const double dC = dist_to(st.C, x);
    const double fp = std::fabs(f_deriv_raw(p, x));
    for (double eps : eps_probes)
      if (dC >= eps && fp < L * eps / fit.K0) ++rep.viol_eps_form;
  }
  // Dedicated probes inside C_eps0 for the two-sided second-derivative form.
  for (double c : st.C.points) {
    for (int i = 1; i <= 512; ++i) {
      const double t = fit.eps0 * static_cast<double>(i) / 512.0;
      for (double x : {c - t, c + t}) {
        const double fpp = std::fabs(f_second(p, x));
        if (!(fpp > L / fit.K0) || !(fpp < fit.K0 * L)) ++rep.viol_near_c;
        ++rep.tested;
      }
    }
  }
  return rep;
}

}  // namespace logmap
