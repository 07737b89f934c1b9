#pragma once

#include <cstdio>
#include <fstream>
#include <iostream>
#include <stdexcept>
#include <string>

#include <json.hpp>

#include "logmap/conditions.hpp"
#include "logmap/derivative_bounds.hpp"
#include "logmap/sweep.hpp"

namespace logmap::io {

using ordered_json = nlohmann::ordered_json;

// All CSV floats go through one formatter: 17 significant digits, '.'
// decimal, locale-independent, so identical inputs produce identical bytes.
inline std::string fmt_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return std::string(buf);
}

// path "" or "-" selects stdout.
inline void write_text(const std::string& path, const std::string& text) {
  if (path.empty() || path == "-") {
    std::cout << text;
    return;
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open output file: " + path);
  out << text;
}

inline std::string dump_json(const ordered_json& j) { return j.dump(2) + "\n"; }

inline ordered_json json_opt(const std::optional<std::size_t>& v) {
  if (v) return *v;
  return nullptr;
}

inline ordered_json profile_json(const ConstantsProfile& p) {
  ordered_json j;
  j["name"] = p.name;
  j["lambda"] = p.lambda;
  j["alpha"] = p.alpha;
  j["N"] = p.N;
  j["sigma_exp"] = p.sigma_exp;
  return j;
}

// ---------------------------------------------------------------------------
// Orbit

inline std::string orbit_csv(const OrbitRecord& rec) {
  std::string out = "step,point,log_deriv_prefix,dC,dS,log_d\n";
  for (std::size_t i = 0; i < rec.points.size(); ++i) {
    out += std::to_string(i);
    out += ',';
    out += fmt_double(rec.points[i]);
    out += ',';
    out += fmt_double(rec.log_deriv_prefix[i]);
    out += ',';
    out += fmt_double(rec.dC[i]);
    out += ',';
    out += fmt_double(rec.dS[i]);
    out += ',';
    out += fmt_double(rec.log_d[i]);
    out += '\n';
  }
  return out;
}

inline ordered_json orbit_json(const OrbitRecord& rec) {
  ordered_json j;
  j["steps"] = rec.points.size();
  if (rec.halted_at) {
    j["halted_step"] = rec.halted_at->first;
    j["halted_reason"] = eval_status_name(rec.halted_at->second);
  } else {
    j["halted_step"] = nullptr;
    j["halted_reason"] = nullptr;
  }
  j["point"] = rec.points;
  j["log_deriv_prefix"] = rec.log_deriv_prefix;
  j["dC"] = rec.dC;
  j["dS"] = rec.dS;
  j["log_d"] = rec.log_d;
  return j;
}

// ---------------------------------------------------------------------------
// Itinerary

inline ordered_json itinerary_json(const Itinerary& itin) {
  ordered_json j;
  j["owner"] = itin.owner;
  j["horizon"] = itin.horizon;
  j["halted"] = itin.halted;
  ordered_json events = ordered_json::array();
  for (const auto& e : itin.events) {
    ordered_json je;
    je["time"] = e.time;
    je["binding"] = e.binding;
    je["r"] = e.depth_r;
    je["p"] = e.p;
    je["deep"] = e.deep;
    je["outside_window"] = e.outside_window;
    je["saturated"] = e.saturated;
    je["dist_c"] = e.dist_c;
    events.push_back(je);
  }
  j["events"] = events;
  return j;
}

// ---------------------------------------------------------------------------
// Condition report

inline ordered_json check_json(const MapParams& p,
                               const ConstantsProfile& profile,
                               const ConditionReport& rep) {
  ordered_json j;
  j["phi"] = p.phi.name;
  j["L"] = p.L;
  j["a"] = p.a;
  j["profile"] = profile_json(profile);
  j["horizon"] = rep.horizon;
  j["deltaN_ok"] = rep.deltaN_ok();
  j["first_exclusion"] = json_opt(rep.first_exclusion());
  ordered_json per = ordered_json::array();
  for (const auto& pc : rep.per_critical) {
    ordered_json jc;
    jc["deltaN_ok"] = pc.deltaN_ok;
    jc["deltaN_witness"] = json_opt(pc.deltaN_witness);
    jc["g1_fail"] = json_opt(pc.g1_fail);
    jc["g2_fail"] = json_opt(pc.g2_fail);
    jc["g3_fail"] = json_opt(pc.g3_fail);
    jc["r_fail"] = json_opt(pc.r_fail);
    if (pc.halted) {
      jc["halted_step"] = pc.halted->first;
      jc["halted_reason"] = eval_status_name(pc.halted->second);
    } else {
      jc["halted_step"] = nullptr;
      jc["halted_reason"] = nullptr;
    }
    jc["returns"] = pc.returns;
    jc["deep_returns"] = pc.deep_returns;
    jc["lyapunov_slope"] = pc.slope ? ordered_json(*pc.slope) : nullptr;
    per.push_back(jc);
  }
  j["per_critical"] = per;
  return j;
}

// ---------------------------------------------------------------------------
// Sweep

inline std::string sweep_csv(const SweepResult& s) {
  std::string out = "a,deltaN,g1_fail,g2_fail,g3_fail,r_fail,lyapunov_slope\n";
  for (const auto& d : s.digests) {
    out += fmt_double(d.a);
    out += ',';
    out += d.deltaN ? '1' : '0';
    out += ',';
    out += std::to_string(d.g1_fail);
    out += ',';
    out += std::to_string(d.g2_fail);
    out += ',';
    out += std::to_string(d.g3_fail);
    out += ',';
    out += std::to_string(d.r_fail);
    out += ',';
    out += fmt_double(d.slope);
    out += '\n';
  }
  return out;
}

inline ordered_json sweep_summary_json(const SweepResult& s) {
  ordered_json j;
  j["phi"] = s.phi.name;
  j["L"] = s.L;
  j["profile"] = profile_json(s.profile);
  j["M"] = s.M;
  j["n"] = s.n;
  j["resolution"] = s.resolution();
  j["deltaN_fraction"] = s.deltaN_fraction;
  j["good_fraction"] = s.good_fraction;
  ordered_json cmp = ordered_json::array();
  for (const auto& row : exclusion_comparison(s)) {
    ordered_json jr;
    jr["j"] = row.j;
    jr["excluded"] = row.excluded;
    jr["bound"] = row.bound;
    cmp.push_back(jr);
  }
  j["exclusion_vs_bound"] = cmp;
  return j;
}

// ---------------------------------------------------------------------------
// Interval refinement

inline ordered_json intervals_json(const std::vector<IntervalSet>& gens) {
  ordered_json j;
  ordered_json arr = ordered_json::array();
  for (const auto& g : gens) {
    ordered_json jg;
    jg["generation"] = g.generation;
    jg["count"] = g.intervals.size();
    jg["total_length"] = g.total_length();
    ordered_json ivs = ordered_json::array();
    for (const auto& iv : g.intervals) {
      ordered_json ji;
      ji["lo"] = iv.lo;
      ji["hi"] = iv.hi;
      ji["depth_exceeded"] = iv.depth_exceeded;
      ivs.push_back(ji);
    }
    jg["intervals"] = ivs;
    arr.push_back(jg);
  }
  j["generations"] = arr;
  return j;
}

// ---------------------------------------------------------------------------
// Structure / derivative constants

inline ordered_json roots_json(const PhiSpec& phi, double L,
                               const StructureSets& st,
                               const BracketFit* fit) {
  ordered_json j;
  j["phi"] = phi.name;
  j["L"] = L;
  j["critical"] = st.C.points;
  j["critical_tolerance"] = st.C.tolerance;
  j["singular"] = st.S.points;
  j["singular_tolerance"] = st.S.tolerance;
  if (fit != nullptr) {
    j["K0"] = fit->K0;
    j["eps0"] = fit->eps0;
    j["fit_samples"] = fit->samples;
  } else {
    j["K0"] = nullptr;
    j["eps0"] = nullptr;
    j["fit_samples"] = nullptr;
  }
  return j;
}

inline ordered_json bounds_json(const ConstantsProfile& profile, double L,
                                double n, const BoundsRecord& b) {
  ordered_json j;
  j["profile"] = profile_json(profile);
  j["L"] = L;
  j["n"] = n;
  j["deep_exclusion"] = b.deep_exclusion;
  j["distance_exclusion"] = b.distance_exclusion;
  j["log10_deep_exclusion"] = b.log10_deep_exclusion;
  j["log10_distance_exclusion"] = b.log10_distance_exclusion;
  j["min_bound_period"] = b.min_bound_period;
  j["max_deep_returns"] = b.max_deep_returns;
  j["recovery_exponent"] = b.recovery_exponent;
  return j;
}

// ---------------------------------------------------------------------------
// Trend study

inline std::string trend_csv(const TrendStudy& t) {
  std::string out =
      "L,deltaN_fraction,good_fraction,survivors,measured,min_slope,"
      "median_slope,frac_third\n";
  for (const auto& r : t.rows) {
    out += fmt_double(r.L);
    out += ',';
    out += fmt_double(r.deltaN_fraction);
    out += ',';
    out += fmt_double(r.good_fraction_n);
    out += ',';
    out += std::to_string(r.census.survivors);
    out += ',';
    out += std::to_string(r.census.measured);
    out += ',';
    out += fmt_double(r.census.min_slope);
    out += ',';
    out += fmt_double(r.census.median_slope);
    out += ',';
    out += fmt_double(r.census.frac_third);
    out += '\n';
  }
  return out;
}

inline ordered_json trend_json(const ConstantsProfile& profile,
                               const PhiSpec& phi, const TrendStudy& t) {
  ordered_json j;
  j["phi"] = phi.name;
  j["profile"] = profile_json(profile);
  j["M"] = t.M;
  j["n"] = t.n;
  j["tolerance"] = t.tolerance;
  j["monotone_pass"] = t.monotone_pass;
  ordered_json rows = ordered_json::array();
  for (const auto& r : t.rows) {
    ordered_json jr;
    jr["L"] = r.L;
    jr["deltaN_fraction"] = r.deltaN_fraction;
    jr["good_fraction"] = r.good_fraction_n;
    jr["survivors"] = r.census.survivors;
    jr["measured"] = r.census.measured;
    jr["min_slope"] = std::isfinite(r.census.min_slope)
                          ? ordered_json(r.census.min_slope)
                          : ordered_json(nullptr);
    jr["median_slope"] = std::isfinite(r.census.median_slope)
                             ? ordered_json(r.census.median_slope)
                             : ordered_json(nullptr);
    jr["frac_third"] = std::isfinite(r.census.frac_third)
                           ? ordered_json(r.census.frac_third)
                           : ordered_json(nullptr);
    jr["slope_pass"] = r.census.pass;
    rows.push_back(jr);
  }
  j["rows"] = rows;
  return j;
}

}  // namespace logmap::io
