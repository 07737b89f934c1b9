#pragma once

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include "logmap/derivative_bounds.hpp"
#include "logmap/io.hpp"
#include "logmap/parameter_windows.hpp"
#include "logmap/structure_checks.hpp"
#include "logmap/sweep.hpp"

namespace logmap {

struct VerifyOptions {
  std::uint64_t seed = 0;
  std::string out_dir;  // artifacts land here when nonempty
  int threads = 0;      // 0 = hardware concurrency
  bool artifacts_only = false;
  std::vector<int> only;  // criterion ids to run; empty = all
};

struct CriterionResult {
  int id = 0;
  std::string name;
  bool pass = false;
  // Criteria whose inequalities cannot hold at these scales ship with
  // expected_pass = false; they still run honestly and report red.
  bool expected_pass = true;
  double seconds = 0.0;
  std::string summary;
  std::vector<std::string> info;
};

struct VerifyReport {
  std::vector<CriterionResult> results;
  bool all_pass() const {
    for (const auto& r : results)
      if (!r.pass) return false;
    return !results.empty();
  }
};

namespace verify_detail {

inline std::string num(double v, int prec = 6) {
  char buf[48];
  std::snprintf(buf, sizeof(buf), "%.*g", prec, v);
  return std::string(buf);
}

inline std::string count(std::size_t v) { return std::to_string(v); }

}  // namespace verify_detail

// ---------------------------------------------------------------------------
// Artifact suite: the reproducible output battery behind the determinism
// criterion. Everything random flows from the one seed.

inline void write_artifacts(const VerifyOptions& o, const std::string& dir) {
  namespace fs = std::filesystem;
  fs::create_directories(dir);
  const PhiSpec phi = make_phi("sin2pi");
  const ConstantsProfile desk = desk_profile();
  const ConstantsProfile app = appendix_profile();
  const auto path = [&](const char* f) { return (fs::path(dir) / f).string(); };

  {
    const double L = 1e3;
    const StructureSets st = build_structure(phi, L);
    const BracketFit fit = fit_derivative_constant(phi, {L}, 4096, 2000,
                                                   derive_seed(o.seed, 9001));
    io::write_text(path("roots.json"),
                   io::dump_json(io::roots_json(phi, L, st, &fit)));
  }
  {
    const double L = 1e4;
    const StructureSets st = build_structure(phi, L);
    SplitMix64 rng(derive_seed(o.seed, 9002));
    const MapParams p{rng.uniform(), L, phi};
    const double x0 = rng.uniform();
    io::write_text(path("orbit.csv"), io::orbit_csv(iterate_orbit(p, st, x0, 500)));

    BindingContext ctx(p, st, 300);
    Itinerary itin;
    if (const BindingContext::Entry* e = ctx.get(0)) {
      itin = build_itinerary(e->rec, desk.delta(L), ctx, 0);
      detect_deep_returns(itin, L);
    }
    io::write_text(path("itinerary.json"), io::dump_json(io::itinerary_json(itin)));

    const ConditionReport rep = evaluate_conditions(p, st, desk, 200);
    io::write_text(path("check.json"), io::dump_json(io::check_json(p, desk, rep)));
  }
  {
    const SweepResult s = grid_sweep(phi, 1e4, desk, 2000, 100, o.threads);
    io::write_text(path("sweep.csv"), io::sweep_csv(s));
    io::write_text(path("sweep_summary.json"),
                   io::dump_json(io::sweep_summary_json(s)));
  }
  {
    const TrendStudy t = trend_study(phi, {1e3, 1e4}, desk, 2000, 120, o.threads);
    io::write_text(path("trend.csv"), io::trend_csv(t));
  }
  {
    const auto gens = interval_refine(phi, 1e4, app, 8, 8);
    io::write_text(path("intervals.json"), io::dump_json(io::intervals_json(gens)));
  }
  io::write_text(path("bounds.json"),
                 io::dump_json(io::bounds_json(
                     desk, 1e4, 100, theoretical_bounds(desk, 1e4, 100))));
}

// ---------------------------------------------------------------------------
// Criterion 1: fitted derivative bracket K₀⁻¹·L·dC/dS ≤ |f'| ≤ K₀·L·dC/dS on
// fresh random samples at L ∈ {10², 10³, 10⁴}.

inline CriterionResult criterion_01(const VerifyOptions& o) {
  using verify_detail::count;
  using verify_detail::num;
  CriterionResult r;
  r.id = 1;
  r.name = "derivative-bracket";
  const PhiSpec phi = make_phi("sin2pi");
  const std::vector<double> Ls{1e2, 1e3, 1e4};
  const BracketFit fit =
      fit_derivative_constant(phi, Ls, 65536, 100000, derive_seed(o.seed, 101));
  std::size_t bracket_viol = 0, aux_viol = 0, tested = 0;
  for (double L : Ls) {
    const BracketReport rep =
        verify_derivative_brackets(phi, L, fit, 100000, derive_seed(o.seed, 102));
    bracket_viol += rep.viol_upper_a + rep.viol_lower_a;
    aux_viol += rep.viol_second + rep.viol_eps_form + rep.viol_near_c;
    tested += rep.tested;
    r.info.push_back("L=" + num(L) + ": " + count(rep.tested) + " samples, " +
                     count(rep.viol_upper_a + rep.viol_lower_a) +
                     " bracket violations");
  }
  r.pass = bracket_viol == 0;
  r.summary = "K0=" + num(fit.K0, 8) + ", eps0=" + num(fit.eps0) + "; " +
              count(bracket_viol) + " violations in " + count(tested) +
              " fresh samples";
  if (aux_viol != 0)
    r.info.push_back("auxiliary probes (|f''| forms): " + count(aux_viol) +
                     " violations");
  return r;
}

// ---------------------------------------------------------------------------
// Criterion 2: derivative distortion within critical value windows stays ≤ 2.

inline CriterionResult criterion_02(const VerifyOptions& o) {
  using verify_detail::count;
  using verify_detail::num;
  CriterionResult r;
  r.id = 2;
  r.name = "window-distortion";
  const PhiSpec phi = make_phi("sin2pi");
  const double L = 1e4;
  const StructureSets st = build_structure(phi, L);
  SplitMix64 rng(derive_seed(o.seed, 201));
  std::size_t done = 0, attempts = 0, viol = 0;
  double worst = 1.0;
  while (done < 100 && attempts < 2000) {
    ++attempts;
    const MapParams p{rng.uniform(), L, phi};
    const double c = st.C.points[rng.uniform_index(st.C.points.size())];
    const std::size_t n = 1 + static_cast<std::size_t>(rng.uniform_index(50));
    const DistortionReport rep = distortion_ratio(p, st, c, n, 64, rng);
    if (!rep.central_ok) continue;  // central orbit met C∪S; redraw
    ++done;
    worst = std::max(worst, rep.max_ratio);
    if (!rep.pass) ++viol;
  }
  r.pass = done == 100 && viol == 0;
  r.summary = count(done) + " windows (n ≤ 50, 64 pairs each), max ratio " +
              num(worst, 8) + " against bound 2";
  if (viol != 0) r.info.push_back(count(viol) + " windows exceeded ratio 2");
  return r;
}

// ---------------------------------------------------------------------------
// Criterion 3: measure of the initial avoidance stage on a 10⁶ grid clears
// 1 - L^{-1/9} at L = 10⁴ and 10⁵ (N = 5 stage constants).

inline CriterionResult criterion_03(const VerifyOptions& o) {
  using verify_detail::num;
  CriterionResult r;
  r.id = 3;
  r.name = "initial-measure";
  const PhiSpec phi = make_phi("sin2pi");
  const ConstantsProfile app = appendix_profile();
  const std::size_t M = 1000000;
  const double tol = 1.0 / static_cast<double>(M);
  bool pass = true;
  for (double L : {1e4, 1e5}) {
    const double bound = 1.0 - std::pow(L, -1.0 / 9.0);
    const double frac = deltaN_fraction_scan(phi, L, app, M, o.threads);
    const bool ok = frac >= bound - tol;
    pass = pass && ok;
    r.info.push_back("L=" + num(L) + ": fraction " + num(frac, 8) +
                     " vs bound " + num(bound, 8) + (ok ? "" : "  VIOLATION"));
  }
  // The asymptotic stage uses a far wider avoidance radius; at desk scales it
  // excludes everything, so it is reported rather than gated.
  ConstantsProfile wide = app;
  wide.name = "wide-sigma-info";
  wide.sigma_exp = 1.0 / 6.0;
  const double frac_info = deltaN_fraction_scan(phi, 1e4, wide, 100000, o.threads);
  r.info.push_back("informational, sigma = L^{-1/6} at L=1e4 (M=1e5): fraction " +
                   num(frac_info, 6));
  r.pass = pass;
  r.summary = std::string("grid measure of the avoidance stage ") +
              (pass ? "clears" : "misses") + " 1 - L^{-1/9} at L=1e4 and 1e5";
  return r;
}

// ---------------------------------------------------------------------------
// Criterion 4: expansion outside the critical neighborhood, both ending
// branches, on 100 admissible segments.

inline CriterionResult criterion_04(const VerifyOptions& o) {
  using verify_detail::count;
  using verify_detail::num;
  CriterionResult r;
  r.id = 4;
  r.name = "outside-expansion";
  const PhiSpec phi = make_phi("sin2pi");
  const ConstantsProfile desk = desk_profile();
  const double L = 1e4;
  const double delta = desk.delta(L);
  const StructureSets st = build_structure(phi, L);
  SplitMix64 rng(derive_seed(o.seed, 401));
  std::size_t done = 0, attempts = 0, viol = 0, enders = 0, runners = 0;
  double min_margin = std::numeric_limits<double>::infinity();
  const std::size_t npos = std::numeric_limits<std::size_t>::max();
  while (done < 100 && attempts < 5000) {
    ++attempts;
    const MapParams p{rng.uniform(), L, phi};
    const double x0 = rng.uniform();
    const OrbitRecord rec = iterate_orbit(p, st, x0, 500);
    std::size_t entry = npos;
    for (std::size_t i = 0; i <= rec.last(); ++i) {
      if (rec.dC[i] < delta) {
        entry = i;
        break;
      }
    }
    if (entry == 0) continue;  // started inside C_δ
    const std::size_t n = entry == npos ? rec.last() : entry;
    if (n < 5) continue;
    const OutsideExpansionReport rep =
        outside_expansion_check(p, st, desk, x0, n);
    if (rep.status == OutsideExpansionReport::Status::halted ||
        rep.status == OutsideExpansionReport::Status::inapplicable)
      continue;
    ++done;
    if (rep.ends_in_C_delta)
      ++enders;
    else
      ++runners;
    min_margin = std::min(min_margin, rep.margin);
    if (rep.status != OutsideExpansionReport::Status::pass) ++viol;
  }
  r.pass = done == 100 && viol == 0;
  r.summary = count(done) + " segments (" + count(enders) +
              " ending inside C_δ, " + count(runners) + " running free), " +
              count(viol) + " violations";
  r.info.push_back("minimum margin over required ln J^n: " + num(min_margin));
  return r;
}

// ---------------------------------------------------------------------------
// Criterion 5: bound-period cap and post-return expansion at every in-window
// return across a 200-parameter sweep.

inline CriterionResult criterion_05(const VerifyOptions& o) {
  using verify_detail::count;
  using verify_detail::num;
  CriterionResult r;
  r.id = 5;
  r.name = "recovery-growth";
  const PhiSpec phi = make_phi("sin2pi");
  const ConstantsProfile desk = desk_profile();
  const double L = 1e4;
  const double delta = desk.delta(L);
  const StructureSets st = build_structure(phi, L);
  const std::size_t H = 5000;
  SplitMix64 rng(derive_seed(o.seed, 501));
  std::size_t params_ok = 0, events = 0, in_window = 0, applicable = 0;
  std::size_t viol_cap = 0, viol_growth = 0;
  double min_growth = std::numeric_limits<double>::infinity();
  for (int t = 0; t < 200; ++t) {
    const MapParams p{rng.uniform(), L, phi};
    BindingContext ctx(p, st, H + 1);
    bool deltaN_all = true;
    std::size_t conditions_good_to = std::numeric_limits<std::size_t>::max();
    for (std::size_t c = 0; c < st.C.points.size(); ++c) {
      const BindingContext::Entry* e = ctx.get(c);
      if (e == nullptr || !check_deltaN_one(e->rec, desk, L).ok) {
        deltaN_all = false;
        break;
      }
      const auto fold = [&](const std::optional<std::size_t>& v) {
        if (v) conditions_good_to = std::min(conditions_good_to, *v);
      };
      fold(check_G1(e->rec, desk, L, H));
      fold(check_G2(e->rec, desk, L, H));
      fold(check_G3(e->rec, desk, L, H));
      if (e->rec.halted_at) fold(e->rec.halted_at->first);
    }
    if (!deltaN_all) continue;
    ++params_ok;
    for (std::size_t c = 0; c < st.C.points.size(); ++c) {
      const BindingContext::Entry* e = ctx.get(c);
      const Itinerary itin = build_itinerary(e->rec, delta, ctx, c);
      for (const ReturnEvent& ev : itin.events) {
        if (ev.time > H) continue;
        ++events;
        if (ev.outside_window || ev.saturated) continue;
        ++in_window;
        // The growth conclusion needs the orbit conditions intact through
        // the whole bound stretch.
        if (ev.time + static_cast<std::size_t>(ev.p) >= conditions_good_to)
          continue;
        const RecoveryReport rr = recovery_check(desk, L, ev, e->rec);
        if (!rr.applicable) continue;
        ++applicable;
        if (!rr.pass_cap) ++viol_cap;
        if (!rr.pass_growth) ++viol_growth;
        min_growth = std::min(min_growth, rr.growth_margin);
      }
    }
  }
  r.pass = viol_cap == 0 && viol_growth == 0;
  r.summary = count(applicable) + " applicable in-window returns (" +
              count(in_window) + " in-window of " + count(events) +
              " returns, " + count(params_ok) + " parameters), " +
              count(viol_cap + viol_growth) + " violations";
  if (applicable != 0)
    r.info.push_back("minimum expansion margin: " + num(min_growth));
  return r;
}

// ---------------------------------------------------------------------------
// Criterion 6: deep-return expansion J^ν(c₀)·D_ν ≥ √dC(c_ν) at every deep
// return of every condition-passing parameter. At desk constants the
// avoidance radius is not asymptotically small, so near-threshold returns
// violate this at a low rate; the criterion runs faithfully and reports red.

inline CriterionResult criterion_06(const VerifyOptions& o) {
  using verify_detail::count;
  using verify_detail::num;
  CriterionResult r;
  r.id = 6;
  r.name = "deep-return-expansion";
  r.expected_pass = false;
  const PhiSpec phi = make_phi("sin2pi");
  const ConstantsProfile desk = desk_profile();
  const double L = 1e4;
  const double delta = desk.delta(L);
  const StructureSets st = build_structure(phi, L);
  const std::size_t H = 200;
  SplitMix64 rng(derive_seed(o.seed, 601));
  std::size_t passing = 0, deep_events = 0, viol = 0, unresolved = 0;
  std::vector<double> margins;
  for (int t = 0; t < 5000; ++t) {
    const MapParams p{rng.uniform(), L, phi};
    BindingContext ctx(p, st, H + 1);
    // Population: avoidance-stage passers. The depth-budget rule is *not*
    // part of the filter — the expansion bound is exactly the estimate that
    // controls budget violations, so assuming it would empty the scan: at
    // these constants a single deep return already overdraws the budget.
    bool deltaN_all = true;
    for (std::size_t c = 0; c < st.C.points.size(); ++c) {
      const BindingContext::Entry* e = ctx.get(c);
      if (e == nullptr || !check_deltaN_one(e->rec, desk, L).ok) {
        deltaN_all = false;
        break;
      }
    }
    if (!deltaN_all) continue;
    ++passing;
    for (std::size_t c = 0; c < st.C.points.size(); ++c) {
      const BindingContext::Entry* e = ctx.get(c);
      // A deep return at ν qualifies when the growth conditions hold through
      // ν−1 on its own critical record.
      std::size_t growth_fail = H + 1;
      if (const auto g1 = check_G1(e->rec, desk, L, H))
        growth_fail = std::min(growth_fail, *g1);
      if (const auto g2 = check_G2(e->rec, desk, L, H))
        growth_fail = std::min(growth_fail, *g2);
      if (const auto g3 = check_G3(e->rec, desk, L, H))
        growth_fail = std::min(growth_fail, *g3);
      Itinerary itin = build_itinerary(e->rec, delta, ctx, c);
      detect_deep_returns(itin, L);
      for (const ReturnEvent& ev : itin.events) {
        if (!ev.deep || ev.time > H || ev.time < 1) continue;
        if (growth_fail < ev.time) continue;
        if (ev.time > e->windows.valid_to) {
          ++unresolved;
          continue;
        }
        ++deep_events;
        const DeepExpansionReport der =
            deep_return_expansion_check(e->rec, e->windows, ev);
        margins.push_back(der.margin());
        if (!der.pass) {
          ++viol;
          if (viol <= 8)
            r.info.push_back("violation: a=" + num(p.a, 17) + " owner=" +
                             count(c) + " time=" + count(ev.time) +
                             " margin=" + num(der.margin()));
        }
      }
    }
  }
  r.pass = deep_events > 0 && viol == 0;
  r.summary = count(viol) + " of " + count(deep_events) +
              " deep returns violate the expansion bound (" + count(passing) +
              " of 5000 parameters in the avoidance stage)";
  if (viol > 8)
    r.info.push_back("(" + count(viol - 8) + " further violations elided)");
  if (unresolved > 0)
    r.info.push_back(count(unresolved) +
                     " deep returns past the window recursion's valid range "
                     "were not checkable");
  if (!margins.empty()) {
    std::sort(margins.begin(), margins.end());
    r.info.push_back("margin min/median: " + num(margins.front()) + " / " +
                     num(margins[margins.size() / 2]));
  }
  if (viol != 0)
    r.info.push_back(
        "failing returns follow a near-threshold approach one step before the "
        "deep return; the bound needs an asymptotically small avoidance "
        "radius, out of reach at desk constants");
  return r;
}

// ---------------------------------------------------------------------------
// Criterion 7: parameters passing the depth-budget rule to n-1 show no
// derivative-growth failures to n-1.

inline CriterionResult criterion_07(const VerifyOptions& o) {
  using verify_detail::count;
  CriterionResult r;
  r.id = 7;
  r.name = "exclusion-implies-growth";
  const PhiSpec phi = make_phi("sin2pi");
  const ConstantsProfile desk = desk_profile();
  const double L = 1e4;
  const StructureSets st = build_structure(phi, L);
  const std::size_t n = 200;
  SplitMix64 rng(derive_seed(o.seed, 701));
  std::size_t passers = 0, attempts = 0, g1v = 0, g2v = 0;
  while (passers < 200 && attempts < 5000) {
    ++attempts;
    const MapParams p{rng.uniform(), L, phi};
    const ConditionReport rep = evaluate_conditions(p, st, desk, n - 1);
    if (!rep.deltaN_ok()) continue;
    if (const auto fe = rep.first_exclusion(); fe && *fe <= n - 1) continue;
    ++passers;
    for (const auto& pc : rep.per_critical) {
      if (pc.g1_fail && *pc.g1_fail <= n - 1) {
        ++g1v;
        r.info.push_back("growth-pair failure at a=" +
                         verify_detail::num(p.a, 17) + " step " +
                         count(*pc.g1_fail));
      }
      if (pc.g2_fail && *pc.g2_fail <= n - 1) {
        ++g2v;
        r.info.push_back("cumulative-growth failure at a=" +
                         verify_detail::num(p.a, 17) + " step " +
                         count(*pc.g2_fail));
      }
    }
  }
  r.pass = passers == 200 && g1v == 0 && g2v == 0;
  r.summary = count(passers) + " passing parameters in " + count(attempts) +
              " samples; growth failures: " + count(g1v) + " pairwise, " +
              count(g2v) + " cumulative";
  return r;
}

// ---------------------------------------------------------------------------
// Criterion 8: parameter-derivative comparability — |τ_k|/J^k within [1/2,2]
// along passing parameters, ratio stability across a parameter window, and a
// finite-difference check of the recursion itself.

inline CriterionResult criterion_08(const VerifyOptions& o) {
  using verify_detail::count;
  using verify_detail::num;
  CriterionResult r;
  r.id = 8;
  r.name = "transversality";
  const PhiSpec phi = make_phi("sin2pi");
  const ConstantsProfile desk = desk_profile();
  const double L = 1e4;
  const StructureSets st = build_structure(phi, L);
  SplitMix64 rng(derive_seed(o.seed, 801));

  // Ratio to the derivative product on 50 condition-passing parameters.
  std::vector<double> passers;
  std::size_t attempts = 0;
  while (passers.size() < 50 && attempts < 2000) {
    ++attempts;
    const double a = rng.uniform();
    const MapParams p{a, L, phi};
    const ConditionReport rep = evaluate_conditions(p, st, desk, 200);
    if (rep.deltaN_ok() && rep.good_through(200)) passers.push_back(a);
  }
  std::size_t ratio_viol = 0;
  double rmin = 1.0, rmax = 1.0;
  for (double a : passers) {
    const MapParams p{a, L, phi};
    for (std::size_t c = 0; c < st.C.points.size(); ++c) {
      const FEval c0 = f_eval(p, st.C.points[c]);
      if (c0.status != EvalStatus::ok) continue;
      const OrbitRecord rec = iterate_orbit(p, st, c0.y, 200);
      if (rec.halted() || rec.last() < 200) continue;
      const TauRecord tau = tau_from_record(rec, c);
      const TransversalityReport tr = transversality_report(rec, tau, 200);
      rmin = std::min(rmin, tr.min_ratio);
      rmax = std::max(rmax, tr.max_ratio);
      if (!tr.pass) ++ratio_viol;
    }
  }

  // Window comparability needs parameter windows wider than the parameter's
  // own ulp; at L = 1e4 the window is already sub-ulp by n ≈ 3, so this leg
  // runs at L = 10 where D_4 is still representable. The avoidance stage is
  // empty at L = 10 (σ exceeds the largest distance to the structure
  // lattice), so applicability — a representable window on an unhalted
  // orbit — is the population gate.
  const double L_fd = 10.0;
  const StructureSets st_fd = build_structure(phi, L_fd);
  std::size_t cmp_windows = 0, cmp_viol = 0;
  double cmin = 1.0, cmax = 1.0;
  SplitMix64 rng_cmp(derive_seed(o.seed, 802));
  std::size_t cmp_attempts = 0;
  while (cmp_windows < 20 && cmp_attempts < 400) {
    ++cmp_attempts;
    const MapParams p{rng_cmp.uniform(), L_fd, phi};
    for (std::size_t c = 0; c < st_fd.C.points.size(); ++c) {
      const ComparabilityReport cr =
          window_comparability(p, st_fd, c, 4, 8, rng_cmp);
      if (!cr.applicable) continue;
      ++cmp_windows;
      cmp_viol += cr.violations;
      cmin = std::min(cmin, cr.min_ratio);
      cmax = std::max(cmax, cr.max_ratio);
    }
  }

  // Finite-difference check of the recursion, run at small L where the
  // orbit's own rounding amplification (∝ J^k) leaves the displacement
  // quotient enough accurate digits.
  SplitMix64 rng_fd(derive_seed(o.seed, 803));
  std::size_t fd_done = 0, fd_attempts = 0, fd_checks = 0, fd_skipped = 0;
  double fd_worst = 0.0;
  while (fd_done < 25 && fd_attempts < 1000) {
    ++fd_attempts;
    const MapParams p{rng_fd.uniform(), L_fd, phi};
    bool used = false;
    for (std::size_t c = 0; c < st_fd.C.points.size(); ++c) {
      const FEval c0 = f_eval(p, st_fd.C.points[c]);
      if (c0.status != EvalStatus::ok) continue;
      const OrbitRecord rec = iterate_orbit(p, st_fd, c0.y, 16);
      if (rec.halted() || rec.last() < 16) continue;
      const TauRecord tau = tau_from_record(rec, c);
      for (std::size_t k = 1; k <= 15; ++k) {
        if (tau.sign[k] == 0) continue;
        // Nudge sized for a ~1e-4 displacement of the k-th point: large
        // enough that orbit rounding stays invisible in the quotient, small
        // enough that curvature along the way stays second-order.
        const double h =
            std::max(1e-4 * std::exp(-tau.log_abs[k]), 1e-13);
        // The secant only references the derivative while every intermediate
        // point's displacement under the nudge stays well inside its own
        // clearance from the critical/singular lattice; a point carried
        // across a fold makes the quotient measure the fold instead.
        bool linear = true;
        for (std::size_t j = 0; j < k && linear; ++j) {
          const double move = std::exp(tau.log_abs[j]) * h;
          if (1000.0 * move > std::min(rec.dC[j], rec.dS[j])) linear = false;
        }
        if (!linear) {
          ++fd_skipped;
          continue;
        }
        // Double precision hosts the quotient only while per-step rounding
        // (~1e-15 absolute, conservatively), amplified along the remaining
        // derivative chain, stays far below the endpoint displacement.
        // Chains through a very close singular pass amplify ulp-level noise
        // past the tolerance at every usable h and are not valid references.
        const double displacement = 2.0 * std::exp(tau.log_abs[k]) * h;
        double amp_sum = 0.0;
        for (std::size_t j = 0; j <= k; ++j)
          amp_sum +=
              std::exp(rec.log_deriv_prefix[k] - rec.log_deriv_prefix[j]);
        if (1e-15 * amp_sum > 1e-5 * displacement) {
          ++fd_skipped;
          continue;
        }
        const auto fd = tau_finite_difference(p, st_fd, c, k, h);
        if (!fd) continue;
        const double tau_k =
            static_cast<double>(tau.sign[k]) * std::exp(tau.log_abs[k]);
        const double rel = std::fabs(*fd - tau_k) / std::fabs(tau_k);
        fd_worst = std::max(fd_worst, rel);
        ++fd_checks;
        used = true;
      }
    }
    if (used) ++fd_done;
  }

  const bool fd_pass = fd_done == 25 && fd_checks >= 100 && fd_worst < 1e-4;
  r.pass = passers.size() == 50 && ratio_viol == 0 && cmp_windows >= 10 &&
           cmp_viol == 0 && fd_pass;
  r.summary = "ratio range [" + num(rmin, 8) + ", " + num(rmax, 8) + "] on " +
              count(passers.size()) + " parameters; " + count(ratio_viol) +
              " ratio violations, " + count(cmp_viol) +
              " comparability violations";
  r.info.push_back("window comparability: " + count(cmp_windows) +
                   " windows, ratio range [" + num(cmin, 6) + ", " +
                   num(cmax, 6) + "]");
  r.info.push_back("finite-difference check at L=10: max rel err " +
                   num(fd_worst, 4) + " over " + count(fd_checks) +
                   " derivatives (tolerance 1e-4; " + count(fd_skipped) +
                   " nudges crossed a fold and were skipped)");
  return r;
}

// ---------------------------------------------------------------------------
// Criterion 9: the log-space pipeline against naive-arithmetic recomputation,
// and the deep-return detector against the quadratic definition.

inline CriterionResult criterion_09(const VerifyOptions& o) {
  using verify_detail::count;
  using verify_detail::num;
  CriterionResult r;
  r.id = 9;
  r.name = "oracle-equivalence";
  const PhiSpec phi = make_phi("sin2pi");
  const ConstantsProfile desk = desk_profile();
  const double L = 1e4;
  const StructureSets st = build_structure(phi, L);
  SplitMix64 rng(derive_seed(o.seed, 901));

  double worst_J = 0.0, worst_D = 0.0;
  std::size_t orbits = 0, attempts = 0;
  while (orbits < 100 && attempts < 1000) {
    ++attempts;
    const MapParams p{rng.uniform(), L, phi};
    const OrbitRecord rec = iterate_orbit(p, st, rng.uniform(), 20);
    if (rec.halted() || rec.last() < 20) continue;
    ++orbits;
    long double prod = 1.0L;
    for (std::size_t k = 1; k <= 20; ++k) {
      prod *= std::fabs(static_cast<long double>(f_deriv_raw(p, rec.points[k - 1])));
      const double log_space = std::exp(rec.log_deriv_prefix[k]);
      const double naive = static_cast<double>(prod);
      worst_J = std::max(worst_J, std::fabs(log_space - naive) / naive);
    }
    // Window radii via the plain-arithmetic formula on a critical value
    // orbit of the same parameter.
    const FEval c0 = f_eval(p, st.C.points[0]);
    if (c0.status != EvalStatus::ok) continue;
    const OrbitRecord rc = iterate_orbit(p, st, c0.y, 20);
    if (rc.halted() || rc.last() < 20) continue;
    const WindowTable w = compute_window_table(rc, p.L, 20);
    long double sum = 0.0L, P = 1.0L;
    for (std::size_t i = 0; i < 20; ++i) {
      if (i > 0)
        P *= std::fabs(static_cast<long double>(f_deriv_raw(p, rc.points[i - 1])));
      sum += P / (static_cast<long double>(rc.dC[i]) *
                  static_cast<long double>(rc.dS[i]));
      const long double naive =
          1.0L / (std::sqrt(static_cast<long double>(p.L)) * sum);
      const double log_space = std::exp(w.at(i + 1));
      worst_D = std::max(
          worst_D, std::fabs(log_space - static_cast<double>(naive)) /
                       static_cast<double>(naive));
    }
  }

  // Deep flags against the definition, on itineraries gathered at two radii.
  SplitMix64 rng2(derive_seed(o.seed, 902));
  std::size_t itins = 0, flag_mismatch = 0, events_seen = 0;
  for (int t = 0; t < 50; ++t) {
    const MapParams p{rng2.uniform(), L, phi};
    BindingContext ctx(p, st, 400);
    for (std::size_t c = 0; c < st.C.points.size(); ++c) {
      const BindingContext::Entry* e = ctx.get(c);
      if (e == nullptr) continue;
      for (const double radius : {desk.delta(L), 0.02}) {
        Itinerary itin = build_itinerary(e->rec, radius, ctx, c);
        detect_deep_returns(itin, p.L);
        if (itin.events.empty() || itin.events.size() > 20) continue;
        ++itins;
        std::vector<double> lg;
        for (const auto& ev : itin.events)
          lg.push_back(std::log(ev.dist_c) / std::log(p.L));
        for (std::size_t k = 0; k < lg.size(); ++k) {
          ++events_seen;
          bool deep = true;
          for (std::size_t i = 0; i < k && deep; ++i) {
            double s = 0.0;
            for (std::size_t j = i + 1; j <= k; ++j) s += 2.0 * lg[j];
            if (s > lg[i]) deep = false;
          }
          if (deep != itin.events[k].deep) ++flag_mismatch;
        }
      }
    }
  }

  r.pass = orbits == 100 && worst_J < 1e-10 && worst_D < 1e-10 &&
           flag_mismatch == 0 && itins > 0;
  r.summary = "rel err: derivative products " + num(worst_J, 3) +
              ", window radii " + num(worst_D, 3) + " (tolerance 1e-10); " +
              count(flag_mismatch) + " deep-flag mismatches";
  r.info.push_back(count(orbits) + " orbits to depth 20; " + count(itins) +
                   " itineraries / " + count(events_seen) +
                   " returns against the quadratic detector");
  return r;
}

// ---------------------------------------------------------------------------
// Criterion 10: survival fraction trend across L with Lyapunov floor on the
// survivors.

inline CriterionResult criterion_10(const VerifyOptions& o) {
  using verify_detail::count;
  using verify_detail::num;
  CriterionResult r;
  r.id = 10;
  r.name = "measure-trend";
  const PhiSpec phi = make_phi("sin2pi");
  const ConstantsProfile desk = desk_profile();
  const TrendStudy t =
      trend_study(phi, {1e3, 1e4, 1e5}, desk, 100000, 200, o.threads);
  bool slopes_ok = true;
  for (const auto& row : t.rows) {
    const double need = desk.lambda * std::log(row.L);
    slopes_ok = slopes_ok && row.census.pass;
    r.info.push_back(
        "L=" + num(row.L) + ": good fraction " + num(row.good_fraction_n, 6) +
        ", survivors " + count(row.census.survivors) + ", min slope " +
        num(row.census.min_slope, 6) + " (needs " + num(need, 6) +
        "), fraction above (1/3)lnL: " + num(row.census.frac_third, 6));
  }
  r.pass = t.monotone_pass && slopes_ok;
  r.summary = std::string("fractions ") +
              (t.monotone_pass ? "non-decreasing" : "NOT monotone") +
              " within 2/sqrt(M) = " + num(t.tolerance, 3) +
              "; survivor slopes " + (slopes_ok ? "clear" : "MISS") +
              " the floor";
  return r;
}

// ---------------------------------------------------------------------------
// Criterion 11: the window-radius inequality chain and annulus bound periods.
// The chain needs d_C·d_S at the critical value to exceed L^{-1/3}, which no
// point on the circle attains at L = 10⁴ (the geometric maximum is 1/64), so
// this criterion runs faithfully and reports red.

inline CriterionResult criterion_11(const VerifyOptions& o) {
  using verify_detail::count;
  using verify_detail::num;
  CriterionResult r;
  r.id = 11;
  r.name = "annulus-chain";
  r.expected_pass = false;
  const PhiSpec phi = make_phi("sin2pi");
  const ConstantsProfile app = appendix_profile();
  const double L = 1e4;
  const StructureSets st = build_structure(phi, L);
  const auto N = static_cast<std::size_t>(app.N);
  const double delta = app.delta(L);
  const double delta0 = app.delta0(L);
  SplitMix64 rng(derive_seed(o.seed, 1101));
  const BracketFit fit =
      fit_derivative_constant(phi, {L}, 8192, 4096, derive_seed(o.seed, 1102));

  std::vector<double> params;
  std::size_t attempts = 0;
  while (params.size() < 50 && attempts < 1000) {
    ++attempts;
    const double a = rng.uniform();
    const MapParams p{a, L, phi};
    bool ok = true;
    for (double c : st.C.points) {
      const FEval c0 = f_eval(p, c);
      if (c0.status != EvalStatus::ok) {
        ok = false;
        break;
      }
      const OrbitRecord rec = iterate_orbit(p, st, c0.y, N);
      if (!check_deltaN_one(rec, app, L).ok) {
        ok = false;
        break;
      }
    }
    if (ok) params.push_back(a);
  }

  std::size_t chain_checks = 0, chain_fail = 0;
  double worst_gap = -std::numeric_limits<double>::infinity();
  for (double a : params) {
    const MapParams p{a, L, phi};
    for (std::size_t c = 0; c < st.C.points.size(); ++c) {
      const FEval c0 = f_eval(p, st.C.points[c]);
      if (c0.status != EvalStatus::ok) continue;
      const OrbitRecord rec = iterate_orbit(p, st, c0.y, N);
      if (rec.halted() || rec.last() < N) continue;
      const WindowTable w = compute_window_table(rec, p.L, N);
      const ChainReport cr = appendix_chain_check(w, app, L);
      ++chain_checks;
      if (!cr.ok) ++chain_fail;
      worst_gap = std::max(worst_gap, cr.log_LinvD1 - cr.log_delta02);
    }
  }

  std::size_t ann_total = 0, ann_outside = 0, ann_fail = 0, ann_pass = 0;
  for (std::size_t i = 0; i < std::min<std::size_t>(10, params.size()); ++i) {
    const MapParams p{params[i], L, phi};
    BindingContext ctx(p, st, N + 3);
    for (std::size_t c = 0; c < st.C.points.size(); ++c) {
      for (int side = -1; side <= 1; side += 2) {
        for (int s = 0; s < 5; ++s) {
          const double dist =
              delta + (s + 0.5) / 5.0 * (delta0 - delta);
          const double y = wrap_unit(st.C.points[c] + side * dist);
          const AnnulusPointReport ar =
              annulus_point_check(p, st, app, c, y, fit.K0, ctx);
          if (!ar.in_annulus) continue;
          ++ann_total;
          if (ar.outside_window) ++ann_outside;
          if (ar.pass())
            ++ann_pass;
          else
            ++ann_fail;
        }
      }
    }
  }

  r.pass = chain_fail == 0 && ann_fail == 0 && chain_checks > 0;
  r.summary = count(chain_fail) + " of " + count(chain_checks) +
              " chains fail; " + count(ann_fail) + " of " + count(ann_total) +
              " annulus points fail (" + count(ann_outside) +
              " land outside the first window)";
  r.info.push_back(
      "best log gap ln(L^{-1}D_1) - ln(δ₀²) = " + num(worst_gap, 6) +
      " (chain needs it positive: d_C·d_S at the critical value must exceed "
      "L^{-1/3} ≈ 0.046; the circle geometry caps it at 1/64 ≈ 0.016)");
  r.info.push_back("the chain becomes satisfiable only for L ≳ 64³ ≈ 2.6e5");
  r.info.push_back(count(ann_pass) + " annulus points pass both bounds");
  return r;
}

// ---------------------------------------------------------------------------
// Criterion 12: byte-identical artifacts across two runs at one seed.

inline CriterionResult criterion_12(const VerifyOptions& o) {
  namespace fs = std::filesystem;
  using verify_detail::count;
  CriterionResult r;
  r.id = 12;
  r.name = "determinism";
  const fs::path base = o.out_dir.empty()
                            ? fs::temp_directory_path() / "logmap-verify-det"
                            : fs::path(o.out_dir) / "determinism";
  const auto snapshot = [&](const fs::path& dir) {
    std::map<std::string, std::string> files;
    for (const auto& entry : fs::directory_iterator(dir)) {
      if (!entry.is_regular_file()) continue;
      std::ifstream in(entry.path(), std::ios::binary);
      std::string bytes((std::istreambuf_iterator<char>(in)),
                        std::istreambuf_iterator<char>());
      files[entry.path().filename().string()] = std::move(bytes);
    }
    return files;
  };
  std::map<std::string, std::string> runs[2];
  for (int i = 0; i < 2; ++i) {
    const fs::path dir = base / (i == 0 ? "run1" : "run2");
    fs::remove_all(dir);
    write_artifacts(o, dir.string());
    runs[i] = snapshot(dir);
  }
  std::size_t mismatched = 0;
  for (const auto& [name, bytes] : runs[0]) {
    const auto it = runs[1].find(name);
    if (it == runs[1].end() || it->second != bytes) {
      ++mismatched;
      r.info.push_back("differs: " + name);
    }
  }
  for (const auto& [name, bytes] : runs[1])
    if (!runs[0].count(name)) {
      ++mismatched;
      r.info.push_back("extra in second run: " + name);
    }
  r.pass = !runs[0].empty() && mismatched == 0;
  r.summary = count(runs[0].size()) + " artifacts, " + count(mismatched) +
              " byte mismatches between two seeded runs";
  return r;
}

// ---------------------------------------------------------------------------

inline CriterionResult run_criterion(int id, const VerifyOptions& o) {
  const auto t0 = std::chrono::steady_clock::now();
  CriterionResult r;
  try {
    switch (id) {
      case 1: r = criterion_01(o); break;
      case 2: r = criterion_02(o); break;
      case 3: r = criterion_03(o); break;
      case 4: r = criterion_04(o); break;
      case 5: r = criterion_05(o); break;
      case 6: r = criterion_06(o); break;
      case 7: r = criterion_07(o); break;
      case 8: r = criterion_08(o); break;
      case 9: r = criterion_09(o); break;
      case 10: r = criterion_10(o); break;
      case 11: r = criterion_11(o); break;
      case 12: r = criterion_12(o); break;
      default: throw std::invalid_argument("unknown criterion id");
    }
  } catch (const std::exception& e) {
    r.id = id;
    if (r.name.empty()) r.name = "criterion-" + std::to_string(id);
    r.pass = false;
    r.summary = std::string("exception: ") + e.what();
  }
  r.seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
          .count();
  return r;
}

inline VerifyReport run_verify(const VerifyOptions& o, std::ostream& out) {
  VerifyReport report;
  if (!o.out_dir.empty() || o.artifacts_only) {
    const std::string dir =
        o.out_dir.empty() ? std::string("verify-artifacts") : o.out_dir;
    write_artifacts(o, dir);
    out << "artifacts written to " << dir << "\n";
    if (o.artifacts_only) return report;
  }
  std::vector<int> ids = o.only;
  if (ids.empty())
    for (int i = 1; i <= 12; ++i) ids.push_back(i);
  std::size_t passed = 0;
  for (int id : ids) {
    CriterionResult r = run_criterion(id, o);
    char head[64];
    std::snprintf(head, sizeof(head), "[%s] %02d %-26s (%6.1f s)  ",
                  r.pass ? "PASS" : "FAIL", r.id, r.name.c_str(), r.seconds);
    out << head << r.summary;
    if (!r.expected_pass) out << "  [expected-fail]";
    out << "\n";
    for (const auto& line : r.info) out << "        - " << line << "\n";
    if (r.pass) ++passed;
    report.results.push_back(std::move(r));
  }
  out << passed << "/" << ids.size() << " criteria passed\n";
  return report;
}

}  // namespace logmap
