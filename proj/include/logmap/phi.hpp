#pragma once

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>
#include <string_view>

#include "logmap/circle.hpp"

namespace logmap {

struct PhiEval {
  double value;
  double d1;
  double d2;
};

// A forcing function of period 1 given by its analytic derivative triple.
// Built-ins are the sine family sin(2π·harmonics·x) + shift; new shapes are
// added here with their closed-form derivatives (no runtime expression
// parsing — an exact d1/d2 is part of the admissibility contract).
struct PhiSpec {
  std::string name = "sin2pi";
  int harmonics = 1;
  double shift = 0.0;

  PhiEval eval(double x) const {
    const double w = 2.0 * std::numbers::pi * static_cast<double>(harmonics);
    const double s = std::sin(w * x);
    const double c = std::cos(w * x);
    return {s + shift, w * c, -w * w * s};
  }
};

// Registry lookup: "sin2pi", "sin4pi", or "sin2pi+c" / "sin2pi-c" with a
// numeric constant c (|c| < 1 keeps the zero set nonempty and nondegenerate).
inline PhiSpec make_phi(std::string_view name) {
  PhiSpec spec;
  spec.name = std::string(name);
  std::string_view base = name;
  double shift = 0.0;
  const auto plus = name.find_first_of("+-", 3);
  if (plus != std::string_view::npos) {
    base = name.substr(0, plus);
    try {
      shift = std::stod(std::string(name.substr(plus)));
    } catch (const std::exception&) {
      throw std::invalid_argument("unparseable shift in phi name: " +
                                  std::string(name));
    }
  }
  if (base == "sin2pi") {
    spec.harmonics = 1;
  } else if (base == "sin4pi") {
    spec.harmonics = 2;
  } else {
    throw std::invalid_argument("unknown phi: " + std::string(name));
  }
  spec.shift = shift;
  return spec;
}

struct PhiAdmissibility {
  bool periodic = false;        // Φ(x+1) = Φ(x) within tolerance
  bool derivatives_match = false;  // d1, d2 agree with central differences
  double max_period_defect = 0.0;
  double max_d1_rel_err = 0.0;
  double max_d2_rel_err = 0.0;
  bool ok() const { return periodic && derivatives_match; }
};

// Samples the periodicity and derivative-consistency requirements on a grid.
inline PhiAdmissibility check_phi_admissible(const PhiSpec& spec,
                                             int samples = 257) {
  PhiAdmissibility r;
  // h balances truncation (∝ h²) against rounding (∝ ε/h²) so the second
  // difference resolves d2 to ~1e-7 relative.
  const double h = 1e-4;
  double period_defect = 0.0, d1_err = 0.0, d2_err = 0.0;
  for (int i = 0; i < samples; ++i) {
    const double x = (i + 0.3) / static_cast<double>(samples);
    const PhiEval at = spec.eval(x);
    const PhiEval shifted = spec.eval(x + 1.0);
    period_defect = std::max(period_defect, std::fabs(shifted.value - at.value));

    const PhiEval lo = spec.eval(x - h);
    const PhiEval hi = spec.eval(x + h);
    const double fd1 = (hi.value - lo.value) / (2.0 * h);
    const double fd2 = (hi.value - 2.0 * at.value + lo.value) / (h * h);
    const double s1 = std::max(1.0, std::fabs(at.d1));
    const double s2 = std::max(1.0, std::fabs(at.d2));
    d1_err = std::max(d1_err, std::fabs(fd1 - at.d1) / s1);
    d2_err = std::max(d2_err, std::fabs(fd2 - at.d2) / s2);
  }
  r.max_period_defect = period_defect;
  r.max_d1_rel_err = d1_err;
  r.max_d2_rel_err = d2_err;
  r.periodic = period_defect < 1e-12;
  r.derivatives_match = d1_err < 1e-6 && d2_err < 1e-6;
  return r;
}

}  // namespace logmap
