#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <limits>
#include <vector>

#include "logmap/binding.hpp"
#include "logmap/constants.hpp"
#include "logmap/itinerary.hpp"
#include "logmap/rng.hpp"
#include "logmap/structure_checks.hpp"
#include "oracles.hpp"

using namespace logmap;

namespace {

WindowTable synthetic_table(std::vector<double> log_Dn_from_1) {
  WindowTable w;
  w.log_Dn.push_back(std::numeric_limits<double>::quiet_NaN());
  for (double v : log_Dn_from_1) w.log_Dn.push_back(v);
  w.valid_to = w.log_Dn.size() - 1;
  return w;
}

}  // namespace

TEST_CASE("bound period reads the annulus structure", "[structure]") {
  const WindowTable w = synthetic_table(
      {std::log(1e-2), std::log(1e-3), std::log(1e-4)});

  // Outside the first window, including the boundary itself.
  REQUIRE(bound_period_from_dist(w, 0.5, 10).status ==
          BoundPeriodResult::Status::outside_window);
  REQUIRE(bound_period_from_dist(w, 1e-2, 10).status ==
          BoundPeriodResult::Status::outside_window);
  REQUIRE(bound_period_from_dist(w, 0.5, 10).p == 1);

  // D_p ≤ dist < D_{p-1} picks p.
  auto r = bound_period_from_dist(w, 5e-3, 10);
  REQUIRE(r.status == BoundPeriodResult::Status::ok);
  REQUIRE(r.p == 2);
  r = bound_period_from_dist(w, 1e-3, 10);  // closed lower endpoint
  REQUIRE(r.status == BoundPeriodResult::Status::ok);
  REQUIRE(r.p == 2);
  r = bound_period_from_dist(w, 5e-4, 10);
  REQUIRE(r.p == 3);

  // Deeper than the deepest computed window: saturated at the cap.
  r = bound_period_from_dist(w, 1e-5, 10);
  REQUIRE(r.status == BoundPeriodResult::Status::saturated);
  REQUIRE(r.p == 3);

  // A tighter horizon caps earlier.
  r = bound_period_from_dist(w, 5e-4, 2);
  REQUIRE(r.status == BoundPeriodResult::Status::saturated);
  REQUIRE(r.p == 2);
}

TEST_CASE("bound periods match a linear window scan on real orbits",
          "[structure]") {
  const PhiSpec phi = make_phi("sin2pi");
  const double L = 1e4;
  const StructureSets st = build_structure(phi, L);
  SplitMix64 rng(41);
  // In-window returns need the image within D₁ ~ 1e-4·dC·dS of the bound
  // critical value, i.e. a return distance ≲ 2e-5; they are rare enough that
  // a large parameter population is needed to collect a handful.
  std::size_t checked = 0;
  for (int t = 0; t < 2000 && checked < 10; ++t) {
    const MapParams p{rng.uniform(), L, phi};
    BindingContext ctx(p, st, 400);
    for (std::size_t c = 0; c < st.C.points.size(); ++c) {
      const BindingContext::Entry* e = ctx.get(c);
      if (e == nullptr) continue;
      const Itinerary itin = build_itinerary(e->rec, 0.02, ctx, c);
      for (const ReturnEvent& ev : itin.events) {
        if (ev.outside_window || ev.saturated) continue;
        if (ev.time + 1 > e->rec.last()) continue;
        const BindingContext::Entry* bind = ctx.get(ev.binding);
        REQUIRE(bind != nullptr);
        const double d_next =
            circle_dist(e->rec.points[ev.time + 1], bind->rec.points[0]);
        // Slow scan: the first depth whose window is at or below d_next.
        int p_scan = 0;
        for (std::size_t k = 1; k <= bind->windows.valid_to; ++k) {
          if (std::exp(bind->windows.at(k)) <= d_next) {
            p_scan = static_cast<int>(k < 2 ? 2 : k);
            break;
          }
        }
        REQUIRE(p_scan == ev.p);
        ++checked;
      }
    }
  }
  REQUIRE(checked >= 10);
}

TEST_CASE("itineraries interleave returns and bound stretches", "[structure]") {
  const PhiSpec phi = make_phi("sin2pi");
  const double L = 1e4;
  const StructureSets st = build_structure(phi, L);
  SplitMix64 rng(43);
  std::size_t events_seen = 0;
  for (int t = 0; t < 25; ++t) {
    const MapParams p{rng.uniform(), L, phi};
    BindingContext ctx(p, st, 300);
    const BindingContext::Entry* e = ctx.get(t % 2);
    if (e == nullptr) continue;
    for (const double radius : {desk_profile().delta(L), 0.05}) {
      const Itinerary itin = build_itinerary(e->rec, radius, ctx, t % 2);
      REQUIRE(itin.horizon == e->rec.last());
      std::size_t prev_end = 0;
      for (const ReturnEvent& ev : itin.events) {
        REQUIRE(ev.time >= prev_end);
        REQUIRE(ev.dist_c == Catch::Approx(e->rec.dC[ev.time]));
        REQUIRE(ev.dist_c < radius);
        REQUIRE(ev.binding == e->rec.nearest_C[ev.time]);
        REQUIRE(ev.depth_r == depth_index(ev.dist_c, L));
        REQUIRE(ev.p >= 1);
        prev_end = ev.time + static_cast<std::size_t>(ev.p);
        ++events_seen;
      }
      // Between prev_end of one event and the next return, no point is
      // within the radius.
      std::size_t j = 0;
      for (const ReturnEvent& ev : itin.events) {
        for (; j < ev.time; ++j) REQUIRE(e->rec.dC[j] >= radius);
        j = ev.time + static_cast<std::size_t>(ev.p);
      }
    }
  }
  REQUIRE(events_seen > 50);
}

TEST_CASE("annulus depth index", "[structure]") {
  const double L = 10.0;
  REQUIRE(depth_index(std::pow(L, -2.5), L) == 3);
  REQUIRE(depth_index(0.05, L) == 2);
  REQUIRE(depth_index(0.3, L) == 1);
  REQUIRE(depth_index(1e-6 * 3.0, L) == 6);
}

TEST_CASE("deep flags: two-return arithmetic", "[structure]") {
  // Depths in log_L units. Second return deep iff 2·lg[1] ≤ lg[0].
  REQUIRE(deep_flags_from_depths({-5.0, -2.0}) ==
          std::vector<bool>{true, false});
  REQUIRE(deep_flags_from_depths({-5.0, -3.0}) ==
          std::vector<bool>{true, true});
  REQUIRE(deep_flags_from_depths({-5.0, -2.5}) ==
          std::vector<bool>{true, true});  // boundary: ≤ keeps it deep
  REQUIRE(deep_flags_from_depths({-1.0}) == std::vector<bool>{true});
  REQUIRE(deep_flags_from_depths({}).empty());
}

TEST_CASE("deep flags match the quadratic definition", "[structure]") {
  SplitMix64 rng(47);
  for (int t = 0; t < 200; ++t) {
    const std::size_t len = 1 + rng.uniform_index(12);
    std::vector<double> lg;
    for (std::size_t i = 0; i < len; ++i) lg.push_back(rng.uniform(-6.0, -0.01));
    const std::vector<bool> fast = deep_flags_from_depths(lg);
    const std::vector<bool> brute = oracle::deep_flags_brute(lg);
    REQUIRE(fast == brute);
    REQUIRE(fast[0]);  // the first return is vacuously deep
  }
}

TEST_CASE("deep detection wires depths into events", "[structure]") {
  const PhiSpec phi = make_phi("sin2pi");
  const double L = 1e4;
  const StructureSets st = build_structure(phi, L);
  SplitMix64 rng(53);
  std::size_t checked = 0;
  for (int t = 0; t < 20 && checked < 5; ++t) {
    const MapParams p{rng.uniform(), L, phi};
    BindingContext ctx(p, st, 300);
    const BindingContext::Entry* e = ctx.get(0);
    if (e == nullptr) continue;
    Itinerary itin = build_itinerary(e->rec, 0.05, ctx, 0);
    if (itin.events.size() < 2) continue;
    detect_deep_returns(itin, L);
    std::vector<double> lg;
    for (const auto& ev : itin.events)
      lg.push_back(std::log(ev.dist_c) / std::log(L));
    const std::vector<bool> expect = oracle::deep_flags_brute(lg);
    for (std::size_t k = 0; k < itin.events.size(); ++k)
      REQUIRE(itin.events[k].deep == expect[k]);
    ++checked;
  }
  REQUIRE(checked >= 5);
}

TEST_CASE("recovery report recomputes from its inputs", "[structure]") {
  const PhiSpec phi = make_phi("sin2pi");
  const double L = 1e4;
  const ConstantsProfile desk = desk_profile();
  const StructureSets st = build_structure(phi, L);
  SplitMix64 rng(59);
  std::size_t applicable = 0;
  for (int t = 0; t < 2500 && applicable < 8; ++t) {
    const MapParams p{rng.uniform(), L, phi};
    BindingContext ctx(p, st, 400);
    const BindingContext::Entry* e = ctx.get(0);
    if (e == nullptr) continue;
    const Itinerary itin = build_itinerary(e->rec, desk.delta(L), ctx, 0);
    for (const ReturnEvent& ev : itin.events) {
      const RecoveryReport rep = recovery_check(desk, L, ev, e->rec);
      if (ev.outside_window || ev.saturated ||
          ev.time + static_cast<std::size_t>(ev.p) > e->rec.last()) {
        REQUIRE_FALSE(rep.applicable);
        REQUIRE_FALSE(rep.pass());
        continue;
      }
      REQUIRE(rep.applicable);
      ++applicable;
      const double cap =
          (-2.0 / desk.lambda) * std::log(ev.dist_c) / std::log(L);
      REQUIRE(rep.cap_rhs == Catch::Approx(cap).margin(1e-12));
      REQUIRE(rep.pass_cap == (static_cast<double>(ev.p) <= cap));
      const double jp =
          e->rec.log_deriv_prefix[ev.time + ev.p] -
          e->rec.log_deriv_prefix[ev.time];
      REQUIRE(rep.log_Jp == Catch::Approx(jp).margin(1e-12));
      const double need =
          std::max((-1.0 + 16.0 * desk.alpha / desk.lambda) *
                       std::log(ev.dist_c),
                   desk.lambda / 3.0 * ev.p * std::log(L));
      REQUIRE(rep.growth_margin == Catch::Approx(jp - need).margin(1e-10));
    }
  }
  REQUIRE(applicable >= 8);
}

TEST_CASE("distance floor constant is snug on its fitting set", "[structure]") {
  const PhiSpec phi = make_phi("sin2pi");
  const double L = 1e3;
  const ConstantsProfile desk = desk_profile();
  const StructureSets st = build_structure(phi, L);
  SplitMix64 rng(61);
  std::vector<OrbitRecord> records;
  while (records.size() < 8) {
    const MapParams p{rng.uniform(), L, phi};
    const FEval c0 = f_eval(p, st.C.points[0]);
    if (c0.status != EvalStatus::ok) continue;
    OrbitRecord rec = iterate_orbit(p, st, c0.y, 60);
    if (rec.halted()) continue;
    records.push_back(std::move(rec));
  }
  std::vector<const OrbitRecord*> ptrs;
  for (const auto& r : records) ptrs.push_back(&r);
  // The binding ratio over the fitting set, recomputed directly.
  double rmax = 0.0;
  for (const auto* r : ptrs)
    for (std::size_t i = 0; i <= std::min<std::size_t>(60, r->last()); ++i)
      rmax = std::max(rmax, desk.sigma(L) *
                                std::pow(L, -desk.alpha * static_cast<double>(i)) /
                                r->dC[i]);
  const double K = fit_floor_constant(ptrs, desk, L, 60);
  REQUIRE(K == Catch::Approx(1.05 * std::max(1.0, rmax)).epsilon(1e-9));
  for (const auto* r : ptrs)
    REQUIRE_FALSE(floor_violation(*r, desk, L, 60, K).has_value());
  // A constant below the binding ratio must expose the binding record.
  bool violated = false;
  for (const auto* r : ptrs)
    violated = violated ||
               floor_violation(*r, desk, L, 60, 0.9 * rmax).has_value();
  REQUIRE(violated);
}

TEST_CASE("window floor violations agree with a direct scan", "[structure]") {
  const PhiSpec phi = make_phi("sin2pi");
  const double L = 1e3;
  const ConstantsProfile desk = desk_profile();
  const StructureSets st = build_structure(phi, L);
  SplitMix64 rng(67);
  for (int t = 0; t < 10; ++t) {
    const MapParams p{rng.uniform(), L, phi};
    const FEval c0 = f_eval(p, st.C.points[0]);
    if (c0.status != EvalStatus::ok) continue;
    const OrbitRecord rec = iterate_orbit(p, st, c0.y, 50);
    if (rec.halted()) continue;
    const WindowTable w = compute_window_table(rec, L, 50);
    const auto got = window_floor_violation(rec, w, desk, L, 49);
    std::optional<std::size_t> expect;
    for (std::size_t i = 0; i + 1 <= w.valid_to && i <= 49; ++i) {
      const double lhs = rec.log_deriv_prefix[i] + w.at(i + 1);
      if (lhs <
          (-1.0 - 7.0 * desk.alpha * static_cast<double>(i)) * std::log(L)) {
        expect = i;
        break;
      }
    }
    REQUIRE(got == expect);
  }
}

TEST_CASE("deep-return expansion report recomputes from the record",
          "[structure]") {
  const PhiSpec phi = make_phi("sin2pi");
  const double L = 1e4;
  const StructureSets st = build_structure(phi, L);
  SplitMix64 rng(71);
  std::size_t deep_seen = 0;
  for (int t = 0; t < 60 && deep_seen < 8; ++t) {
    const MapParams p{rng.uniform(), L, phi};
    BindingContext ctx(p, st, 300);
    const BindingContext::Entry* e = ctx.get(0);
    if (e == nullptr) continue;
    Itinerary itin = build_itinerary(e->rec, 0.02, ctx, 0);
    detect_deep_returns(itin, L);
    for (const ReturnEvent& ev : itin.events) {
      const DeepExpansionReport rep =
          deep_return_expansion_check(e->rec, e->windows, ev);
      REQUIRE(rep.is_deep == ev.deep);
      if (!ev.deep) {
        REQUIRE_FALSE(rep.pass);
        continue;
      }
      if (ev.time < 1 || ev.time > e->windows.valid_to) continue;
      ++deep_seen;
      REQUIRE(rep.lhs == Catch::Approx(e->rec.log_deriv_prefix[ev.time] +
                                       e->windows.at(ev.time))
                             .margin(1e-12));
      REQUIRE(rep.rhs ==
              Catch::Approx(0.5 * std::log(e->rec.dC[ev.time])).margin(1e-12));
      REQUIRE(rep.pass == (rep.lhs >= rep.rhs));
    }
  }
  REQUIRE(deep_seen >= 8);
}

TEST_CASE("annulus points acquire coherent bound periods", "[structure]") {
  const PhiSpec phi = make_phi("sin2pi");
  const ConstantsProfile app = appendix_profile();

  SECTION("moderate L: the annulus image overshoots the first window") {
    // At L = 1e4 a point at distance d ∈ [δ, δ₀) maps ≈ 2π²L·d² ≳ 2e-3 from
    // the critical value, far beyond D₁ ≲ 1e-4; every annulus point resolves
    // as outside_window. This is the documented obstruction to the
    // scale-ordering chain at computational L.
    const double L = 1e4;
    const StructureSets st = build_structure(phi, L);
    const double delta = app.delta(L);
    const double delta0 = app.delta0(L);
    REQUIRE(delta < delta0);
    SplitMix64 rng(73);
    for (int t = 0; t < 10; ++t) {
      const MapParams p{rng.uniform(), L, phi};
      BindingContext ctx(p, st, 10);
      // Below the annulus: rejected outright.
      const AnnulusPointReport below = annulus_point_check(
          p, st, app, 0, wrap_unit(st.C.points[0] + 0.5 * delta), 40.0, ctx);
      REQUIRE_FALSE(below.in_annulus);
      REQUIRE_FALSE(below.pass());

      const double dist = delta + 0.4 * (delta0 - delta);
      const AnnulusPointReport rep = annulus_point_check(
          p, st, app, 0, wrap_unit(st.C.points[0] + dist), 40.0, ctx);
      REQUIRE(rep.in_annulus);
      REQUIRE((rep.outside_window || rep.saturated));
      REQUIRE_FALSE(rep.pass());
    }
  }

  SECTION("large L: inner annulus points land inside the window") {
    // 2π²L·δ² < D₁ needs √L ≳ 32π²·(dC·dS)⁻¹·...; L = 1e7 clears it for
    // parameters whose critical value sits away from C ∪ S.
    const double L = 1e7;
    REQUIRE(validate_profile(app, L).ok);
    const StructureSets st = build_structure(phi, L);
    const double delta = app.delta(L);
    SplitMix64 rng(79);
    std::size_t resolved = 0;
    for (int t = 0; t < 40 && resolved < 5; ++t) {
      const MapParams p{rng.uniform(), L, phi};
      BindingContext ctx(p, st, 10);
      const double dist = 1.1 * delta;
      const double x0 = wrap_unit(st.C.points[0] + dist);
      const AnnulusPointReport rep =
          annulus_point_check(p, st, app, 0, x0, 40.0, ctx);
      REQUIRE(rep.in_annulus);
      if (rep.outside_window || rep.saturated) continue;
      ++resolved;
      REQUIRE(rep.p >= 2);
      // Recompute J^p by direct iteration.
      double x = x0, acc = 0.0;
      bool ok = true;
      for (int i = 0; i < rep.p && ok; ++i) {
        const StepResult s = map_step(p, x);
        ok = s.status == EvalStatus::ok;
        acc += s.log_fp;
        x = s.y;
      }
      REQUIRE(ok);
      REQUIRE(rep.log_Jp == Catch::Approx(acc).margin(1e-10));
      REQUIRE(rep.pass_rate_bound ==
              (acc >= rep.p / 300.0 * std::log(L)));
    }
    REQUIRE(resolved >= 5);
  }
}

TEST_CASE("scale-ordering chain on synthetic windows", "[structure]") {
  const double L = 1e4;
  const ConstantsProfile app = appendix_profile();
  // δ² and δ₀² in logs: 2·ln(1e-4) ≈ -18.42, 2·(-11/12)·ln(1e4) ≈ -16.89.
  const WindowTable good =
      synthetic_table({-7.0, -8.0, -8.5, -9.0, -9.5});
  const ChainReport ok = appendix_chain_check(good, app, L);
  REQUIRE(ok.log_delta2 == Catch::Approx(2.0 * std::log(app.delta(L))));
  REQUIRE(ok.log_delta02 == Catch::Approx(2.0 * std::log(app.delta0(L))));
  REQUIRE(ok.log_LinvDN == Catch::Approx(-std::log(L) - 9.5));
  REQUIRE(ok.log_LinvD1 == Catch::Approx(-std::log(L) - 7.0));
  REQUIRE(ok.ok);

  // Shrinking the first window below δ₀²·L breaks the last link.
  const WindowTable bad = synthetic_table({-8.0, -8.5, -9.0, -9.5, -10.0});
  REQUIRE_FALSE(appendix_chain_check(bad, app, L).ok);
}
