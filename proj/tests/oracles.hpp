#pragma once

// Independent recomputation for the test suite: direct long-double
// arithmetic with none of the library's log-space machinery, plus
// brute-force (quadratic/cubic) versions of the linear-scan detectors.

#include <cmath>
#include <cstddef>
#include <functional>
#include <vector>

namespace oracle {

inline long double pi_ld() { return std::acos(-1.0L); }

inline long double wrap_ld(long double x) {
  long double r = x - std::floor(x);
  if (r >= 1.0L) r -= 1.0L;
  if (r < 0.0L) r += 1.0L;
  return r;
}

inline long double circle_dist_ld(long double x, long double y) {
  const long double d = std::fabs(wrap_ld(x - y));
  return d <= 0.5L ? d : 1.0L - d;
}

// Φ(x) = sin(2π·harmonics·x) + shift and its first derivative.
struct PhiLD {
  int harmonics = 1;
  long double shift = 0.0L;
  long double value(long double x) const {
    return std::sin(2.0L * pi_ld() * harmonics * x) + shift;
  }
  long double d1(long double x) const {
    const long double w = 2.0L * pi_ld() * harmonics;
    return w * std::cos(w * x);
  }
};

struct MapLD {
  long double a = 0.0L;
  long double L = 1.0L;
  PhiLD phi;

  long double f(long double x) const {
    return wrap_ld(x + a + L * std::log(std::fabs(phi.value(x))));
  }
  long double fprime(long double x) const {
    return 1.0L + L * phi.d1(x) / phi.value(x);
  }
  std::vector<long double> orbit(long double x0, std::size_t n) const {
    std::vector<long double> xs{wrap_ld(x0)};
    for (std::size_t i = 0; i < n; ++i) xs.push_back(f(xs.back()));
    return xs;
  }
};

// Πᵢ |f'(xᵢ)| by plain multiplication.
inline long double jacobian_ld(const MapLD& m,
                               const std::vector<long double>& xs,
                               std::size_t k) {
  long double prod = 1.0L;
  for (std::size_t i = 0; i < k; ++i) prod *= std::fabs(m.fprime(xs[i]));
  return prod;
}

// Window radii by the defining sum, D_n = L^{-1/2} / Σ_{i<n} Jⁱ/(dC_i·dS_i),
// with the distances supplied by the caller.
inline long double window_ld(long double L,
                             const std::vector<long double>& jac_prefix,
                             const std::vector<long double>& dC,
                             const std::vector<long double>& dS,
                             std::size_t n) {
  long double sum = 0.0L;
  for (std::size_t i = 0; i < n; ++i) sum += jac_prefix[i] / (dC[i] * dS[i]);
  return 1.0L / (std::sqrt(L) * sum);
}

// Deep flags straight from the definition: return k is deep iff for every
// earlier return i, Σ_{j∈(i,k]} 2·log_L dC(c_j) ≤ log_L dC(c_i).
inline std::vector<bool> deep_flags_brute(const std::vector<double>& lg) {
  std::vector<bool> deep(lg.size(), false);
  for (std::size_t k = 0; k < lg.size(); ++k) {
    bool ok = true;
    for (std::size_t i = 0; i < k && ok; ++i) {
      double s = 0.0;
      for (std::size_t j = i + 1; j <= k; ++j) s += 2.0 * lg[j];
      if (s > lg[i]) ok = false;
    }
    deep[k] = ok;
  }
  return deep;
}

// First failure of the pairwise growth requirement
// prefix[i] - prefix[j] ≥ rate·(i-j) for all j < i ≤ n, by full enumeration.
inline std::vector<std::size_t> growth_pair_failures(
    const std::vector<double>& prefix, double rate, std::size_t n) {
  std::vector<std::size_t> fails;
  for (std::size_t i = 1; i <= n && i < prefix.size(); ++i) {
    for (std::size_t j = 0; j < i; ++j) {
      if (prefix[i] - prefix[j] <
          rate * static_cast<double>(i - j) - 1e-12) {
        fails.push_back(i);
        break;
      }
    }
  }
  return fails;
}

// Bisection on a sign change of g over [lo, hi].
inline double bisect(const std::function<double(double)>& g, double lo,
                     double hi, int iters = 200) {
  double glo = g(lo);
  for (int i = 0; i < iters; ++i) {
    const double mid = 0.5 * (lo + hi);
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

}  // namespace oracle
