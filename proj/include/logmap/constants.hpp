#pragma once

#include <cmath>
#include <string>

namespace logmap {

// The constants bundle behind every structural check: expansion rate λ,
// exclusion rate α, initial horizon N, and the σ-exponent. The derived
// scales are σ = L^{-sigma_exp} (initial avoidance radius), δ = L^{-αN}
// (return radius), δ₀ = L^{-11/12} (outer annulus radius).
struct ConstantsProfile {
  std::string name = "desk";
  double lambda = 0.05;
  double alpha = 0.05;
  long long N = 20;
  double sigma_exp = 0.75;

  double sigma(double L) const { return std::pow(L, -sigma_exp); }
  double delta(double L) const {
    return std::pow(L, -alpha * static_cast<double>(N));
  }
  double delta0(double L) const { return std::pow(L, -11.0 / 12.0); }
};

// Asymptotic-scale constants. Structural runs are not possible here (δ needs
// N > 1/(6α) ≈ 1.7e5 before it even drops below σ); this profile feeds the
// closed-form bound calculators. N defaults to the smallest round value that
// passes validation.
inline ConstantsProfile paper_profile() {
  return {"paper", 1e-3, 1e-6, 200000, 1.0 / 6.0};
}

// Computation-scale constants: every derived radius is resolvable in doubles
// and the orderings δ < δ₀ < σ < 1 hold for L in 1e3..1e5.
inline ConstantsProfile desk_profile() { return {"desk", 0.05, 0.05, 20, 0.75}; }

// Desk-scale constants with the short horizon N = 5 used by the initial-
// measure and annulus checks; α rises so that αN stays above 11/12 and the
// annulus ordering δ < δ₀ survives.
inline ConstantsProfile appendix_profile() {
  return {"appendix", 0.05, 0.2, 5, 0.75};
}

struct ProfileCheck {
  bool ok = false;
  std::string reason;
};

// A profile is usable at a given L only if the radii are properly ordered:
// δ < σ < 1 and δ₀ < σ. Constructions at an invalid profile are rejected.
inline ProfileCheck validate_profile(const ConstantsProfile& p, double L) {
  if (!(L >= 1.0)) return {false, "L must be >= 1"};
  if (!(p.lambda > 0.0) || !(p.alpha > 0.0) || p.N < 0)
    return {false, "lambda, alpha must be positive and N nonnegative"};
  const double sigma = p.sigma(L);
  const double delta = p.delta(L);
  const double delta0 = p.delta0(L);
  if (!(delta < sigma))
    return {false, "rejected: delta = " + std::to_string(delta) +
                       " not below sigma = " + std::to_string(sigma)};
  if (!(sigma < 1.0)) return {false, "rejected: sigma not below 1"};
  if (!(delta0 < sigma))
    return {false, "rejected: delta0 = " + std::to_string(delta0) +
                       " not below sigma = " + std::to_string(sigma)};
  return {true, ""};
}

}  // namespace logmap
