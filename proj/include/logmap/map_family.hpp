#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>

#include "logmap/circle.hpp"
#include "logmap/phi.hpp"

namespace logmap {

// |Φ(x)| below this counts as landing on the singular set to machine
// resolution (about 100× the double ulp of a unit-scale value).
inline constexpr double kSingularTol = 1e-13;

// |f'(x)| threshold for a critical hit. f' = 1 + L·Φ'/Φ is computed from
// unit-scale quantities scaled by L, so its absolute rounding noise near a
// cancellation is of order L·ε; a flat cutoff would be unreachable in
// doubles once L ≥ 1e3. The threshold therefore scales with L.
inline double critical_tol(double L) { return 1e-13 * std::max(1.0, L); }

struct MapParams {
  double a = 0.0;   // rotation number offset, reduced mod 1
  double L = 1.0;   // singularity strength, L ≥ 1
  PhiSpec phi;
};

enum class EvalStatus : std::uint8_t { ok = 0, singular_hit, critical_hit };

inline const char* eval_status_name(EvalStatus s) {
  switch (s) {
    case EvalStatus::ok: return "ok";
    case EvalStatus::singular_hit: return "singular_hit";
    case EvalStatus::critical_hit: return "critical_hit";
  }
  return "?";
}

// One application of f(x) = x + a + L·ln|Φ(x)| with full derivative
// bookkeeping; Φ is evaluated exactly once. On singular_hit nothing else is
// valid; on critical_hit the image y is valid but the log-derivative is not.
struct StepResult {
  double y = 0.0;
  double fp = 0.0;       // f'(x) = 1 + L·Φ'(x)/Φ(x)
  double log_fp = 0.0;   // ln|f'(x)|
  int sign_fp = 0;
  EvalStatus status = EvalStatus::ok;
};

inline StepResult map_step(const MapParams& p, double x) {
  StepResult r;
  const PhiEval ph = p.phi.eval(wrap_unit(x));
  if (std::fabs(ph.value) < kSingularTol) {
    r.status = EvalStatus::singular_hit;
    return r;
  }
  r.y = wrap_unit(x + p.a + p.L * std::log(std::fabs(ph.value)));
  r.fp = 1.0 + p.L * ph.d1 / ph.value;
  if (std::fabs(r.fp) < critical_tol(p.L)) {
    r.status = EvalStatus::critical_hit;
    return r;
  }
  r.log_fp = std::log(std::fabs(r.fp));
  r.sign_fp = r.fp > 0.0 ? 1 : -1;
  return r;
}

struct FEval {
  double y = 0.0;
  EvalStatus status = EvalStatus::ok;
};

inline FEval f_eval(const MapParams& p, double x) {
  const StepResult s = map_step(p, x);
  if (s.status == EvalStatus::singular_hit) return {0.0, s.status};
  return {s.y, EvalStatus::ok};
}

struct FLogDeriv {
  double log_abs = 0.0;
  int sign = 0;
  EvalStatus status = EvalStatus::ok;
};

inline FLogDeriv f_log_deriv(const MapParams& p, double x) {
  const StepResult s = map_step(p, x);
  if (s.status != EvalStatus::ok) return {0.0, 0, s.status};
  return {s.log_fp, s.sign_fp, EvalStatus::ok};
}

// Raw f'(x) without hit detection; for root-finding residuals.
inline double f_deriv_raw(const MapParams& p, double x) {
  const PhiEval ph = p.phi.eval(wrap_unit(x));
  return 1.0 + p.L * ph.d1 / ph.value;
}

// f''(x) = L·(Φ''Φ - Φ'²)/Φ².
inline double f_second(const MapParams& p, double x) {
  const PhiEval ph = p.phi.eval(wrap_unit(x));
  return p.L * (ph.d2 * ph.value - ph.d1 * ph.d1) / (ph.value * ph.value);
}

}  // namespace logmap
