#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <vector>

#include "logmap/map_family.hpp"
#include "logmap/point_set.hpp"
#include "logmap/rng.hpp"
#include "oracles.hpp"

using namespace logmap;

namespace {
const double kPi = std::acos(-1.0);
}

TEST_CASE("circle wrap and distance basics", "[core]") {
  REQUIRE(wrap_unit(-0.25) == Catch::Approx(0.75));
  REQUIRE(wrap_unit(1.25) == Catch::Approx(0.25));
  REQUIRE(wrap_unit(3.0) == Catch::Approx(0.0).margin(1e-15));
  REQUIRE(circle_dist(0.1, 0.9) == Catch::Approx(0.2));
  REQUIRE(circle_dist(0.0, 0.5) == Catch::Approx(0.5));
  // Signed difference returns the short arc with its direction.
  REQUIRE(signed_circle_diff(0.9, 0.1) == Catch::Approx(-0.2));
  REQUIRE(signed_circle_diff(0.1, 0.9) == Catch::Approx(0.2));
}

TEST_CASE("circle distance is a metric on random triples", "[core]") {
  SplitMix64 rng(7);
  for (int t = 0; t < 500; ++t) {
    const double x = rng.uniform(), y = rng.uniform(), z = rng.uniform();
    const double dxy = circle_dist(x, y);
    REQUIRE(dxy >= 0.0);
    REQUIRE(dxy <= 0.5);
    REQUIRE(dxy == Catch::Approx(circle_dist(y, x)));
    REQUIRE(dxy <= circle_dist(x, z) + circle_dist(z, y) + 1e-15);
    REQUIRE(std::fabs(signed_circle_diff(x, y)) == Catch::Approx(dxy));
  }
}

TEST_CASE("sin2pi family evaluates value and derivatives", "[core]") {
  const PhiSpec phi = make_phi("sin2pi");
  const PhiEval e = phi.eval(0.25);
  REQUIRE(e.value == Catch::Approx(1.0));
  REQUIRE(e.d1 == Catch::Approx(0.0).margin(1e-12));
  REQUIRE(e.d2 == Catch::Approx(-4.0 * kPi * kPi));
  REQUIRE(phi.name == "sin2pi");

  const PhiSpec shifted = make_phi("sin2pi+0.25");
  REQUIRE(shifted.eval(0.25).value == Catch::Approx(1.25));
  REQUIRE(shifted.name == "sin2pi+0.25");

  REQUIRE_THROWS_AS(make_phi("cos3pi"), std::invalid_argument);
}

TEST_CASE("admissibility probe accepts the default family", "[core]") {
  const PhiAdmissibility a = check_phi_admissible(make_phi("sin2pi"));
  REQUIRE(a.ok());
  REQUIRE(a.max_period_defect < 1e-9);
  const PhiAdmissibility b = check_phi_admissible(make_phi("sin4pi"));
  REQUIRE(b.ok());
}

TEST_CASE("map evaluation at an exact crest", "[core]") {
  // x = 1/4 has Φ = 1, so the log term vanishes: f(1/4) = 1/4 + a.
  const MapParams p{0.3, 10.0, make_phi("sin2pi")};
  const FEval r = f_eval(p, 0.25);
  REQUIRE(r.status == EvalStatus::ok);
  REQUIRE(r.y == Catch::Approx(0.55).epsilon(1e-14));
}

TEST_CASE("map step agrees with direct long-double arithmetic", "[core]") {
  const PhiSpec phi = make_phi("sin2pi");
  SplitMix64 rng(11);
  for (double L : {1e2, 1e4}) {
    const oracle::MapLD m{0.37L, static_cast<long double>(L), {1, 0.0L}};
    const MapParams p{0.37, L, phi};
    for (int t = 0; t < 200; ++t) {
      const double x = rng.uniform();
      const StepResult s = map_step(p, x);
      if (s.status != EvalStatus::ok) continue;
      const double y_ld = static_cast<double>(m.f(x));
      const double fp_ld = static_cast<double>(m.fprime(x));
      // The log term amplifies argument rounding by L/|Φ| near zeros of Φ.
      const double cond =
          std::fabs(L / static_cast<double>(m.phi.value(x)));
      REQUIRE(circle_dist(s.y, y_ld) < 1e-10 + cond * 1e-14);
      REQUIRE(s.fp ==
              Catch::Approx(fp_ld).epsilon(1e-10).margin(cond * 1e-13));
      REQUIRE(s.log_fp == Catch::Approx(std::log(std::fabs(fp_ld)))
                              .margin(1e-10 + cond * 1e-13));
      REQUIRE(s.sign_fp == (fp_ld > 0 ? 1 : -1));
      REQUIRE(s.fp == Catch::Approx(f_deriv_raw(p, x)));
    }
  }
}

TEST_CASE("second derivative matches a central difference", "[core]") {
  const MapParams p{0.0, 100.0, make_phi("sin2pi")};
  for (double x : {0.1, 0.3, 0.6, 0.85}) {
    const double h = 1e-6;
    const double fd =
        (f_deriv_raw(p, x + h) - f_deriv_raw(p, x - h)) / (2.0 * h);
    REQUIRE(f_second(p, x) == Catch::Approx(fd).epsilon(1e-5));
  }
}

TEST_CASE("singular and critical sets of sin2pi", "[core]") {
  const double L = 1e3;
  const StructureSets st = build_structure(make_phi("sin2pi"), L);
  REQUIRE(st.S.points.size() == 2);
  REQUIRE(st.S.points[0] == Catch::Approx(0.0).margin(1e-11));
  REQUIRE(st.S.points[1] == Catch::Approx(0.5).margin(1e-11));

  // f' = 0 solves tan(2πx) = -2πL: x = 1/4 + arctan(1/(2πL))/(2π) mod 1/2.
  const double off = std::atan(1.0 / (2.0 * kPi * L)) / (2.0 * kPi);
  REQUIRE(st.C.points.size() == 2);
  REQUIRE(st.C.points[0] == Catch::Approx(0.25 + off).margin(1e-9));
  REQUIRE(st.C.points[1] == Catch::Approx(0.75 + off).margin(1e-9));

  // Residuals honor the stated tolerances.
  const MapParams p{0.0, L, make_phi("sin2pi")};
  for (double c : st.C.points)
    REQUIRE(std::fabs(f_deriv_raw(p, c)) < st.C.tolerance);

  // Curvature at the critical points is ≈ 4π²L for this family.
  for (double c : st.C.points)
    REQUIRE(std::fabs(f_second(p, c)) ==
            Catch::Approx(4.0 * kPi * kPi * L).epsilon(1e-3));
}

TEST_CASE("sin4pi doubles the structure sets", "[core]") {
  const StructureSets st = build_structure(make_phi("sin4pi"), 1e3);
  REQUIRE(st.S.points.size() == 4);
  for (std::size_t k = 0; k < 4; ++k)
    REQUIRE(st.S.points[k] == Catch::Approx(0.25 * k).margin(1e-11));
  REQUIRE(st.C.points.size() == 4);
  for (std::size_t k = 0; k < 4; ++k)
    REQUIRE(st.C.points[k] ==
            Catch::Approx(0.125 + 0.25 * k).margin(1e-4));
}

TEST_CASE("shifted families change the zero structure", "[core]") {
  // Φ = sin + 2 never vanishes: no singular points, smooth map, two folds.
  const StructureSets st = build_structure(make_phi("sin2pi+2"), 1e3);
  REQUIRE(st.S.points.empty());
  REQUIRE(st.C.points.size() == 2);

  // Φ = sin + 1 touches zero tangentially: outside the admissible family.
  REQUIRE_THROWS_AS(build_structure(make_phi("sin2pi+1"), 1e3),
                    DegenerateZero);
}

TEST_CASE("critical roots agree with independent bisection", "[core]") {
  const PhiSpec phi = make_phi("sin2pi");
  for (double L : {1e2, 1e4}) {
    const StructureSets st = build_structure(phi, L);
    const MapParams p{0.0, L, phi};
    const auto fp = [&](double x) { return f_deriv_raw(p, x); };
    // Bracket each root by hand around 1/4 and 3/4.
    const double r0 = oracle::bisect(fp, 0.2, 0.3);
    const double r1 = oracle::bisect(fp, 0.7, 0.8);
    REQUIRE(st.C.points[0] == Catch::Approx(r0).margin(1e-10));
    REQUIRE(st.C.points[1] == Catch::Approx(r1).margin(1e-10));
  }
}

TEST_CASE("nearest point resolves ties to the lowest index", "[core]") {
  PointSet set;
  set.points = {0.2, 0.4};
  const Nearest n = nearest_in_set(0.3, set);
  REQUIRE(n.index == 0);
  REQUIRE(n.dist == Catch::Approx(0.1));
  REQUIRE(nearest_in_set(0.39, set).index == 1);
  // Wrap-around nearest.
  set.points = {0.05, 0.5};
  REQUIRE(nearest_in_set(0.98, set).index == 0);
  REQUIRE(nearest_in_set(0.98, set).dist == Catch::Approx(0.07));

  PointSet empty;
  REQUIRE(dist_to(empty, 0.3) == Catch::Approx(0.5));
  REQUIRE_THROWS_AS(nearest_in_set(0.3, empty), std::invalid_argument);
}

TEST_CASE("seeded generator is reproducible and stream-separated", "[core]") {
  SplitMix64 a(42), b(42);
  for (int i = 0; i < 100; ++i) {
    const double u = a.uniform();
    REQUIRE(u == b.uniform());
    REQUIRE(u >= 0.0);
    REQUIRE(u < 1.0);
  }
  REQUIRE(derive_seed(0, 1) != derive_seed(0, 2));
  REQUIRE(derive_seed(0, 1, 0) != derive_seed(0, 1, 1));
  REQUIRE(derive_seed(5, 1) == derive_seed(5, 1));
  // Different root seeds must decouple every stream.
  REQUIRE(derive_seed(0, 1) != derive_seed(1, 1));
}

TEST_CASE("critical tolerance scales with the singularity strength", "[core]") {
  REQUIRE(critical_tol(1.0) == Catch::Approx(1e-13));
  REQUIRE(critical_tol(1e4) == Catch::Approx(1e-9));
  REQUIRE(critical_tol(0.5) == Catch::Approx(1e-13));
}
