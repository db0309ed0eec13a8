#include <doctest.h>

#include <cmath>
#include <random>

#include "hcf/catalog.hpp"
#include "hcf/integrator.hpp"

using namespace hcf;
using doctest::Approx;

namespace {

using Vec = StructureConstants::Vec;

void check_bracket(const StructureConstants& mu, int a, int b, const Vec& want) {
  for (int c = 0; c < 4; ++c) {
    CAPTURE(a);
    CAPTURE(b);
    CAPTURE(c);
    CHECK(std::abs(mu(a, b, c) - want[c]) <= 1e-15);
  }
}

}  // namespace

TEST_CASE("catalog listing") {
  const auto& all = list_geometries();
  REQUIRE(all.size() == 9);
  for (std::size_t i = 0; i < all.size(); ++i) CHECK(static_cast<int>(all[i].geometry) == static_cast<int>(i));
  CHECK(descriptor(Geometry::Hopf).expected_outcome == ExpectedOutcome::FiniteTimeExtinction);
  CHECK(descriptor(Geometry::Hopf).expected_gh_limit == LimitClass::FiniteTimeCollapse);
  for (const auto& d : all)
    if (d.geometry != Geometry::Hopf) CHECK(d.expected_outcome == ExpectedOutcome::Immortal);
  CHECK(descriptor(Geometry::KodairaPrimary).expected_gh_limit == LimitClass::Point);
  CHECK(descriptor(Geometry::ProperlyElliptic).expected_gh_limit ==
        LimitClass::KaehlerEinsteinCurve);
  CHECK(descriptor(Geometry::InoueSpJ2).expected_gh_limit == LimitClass::Circle);
  CHECK_FALSE(descriptor(Geometry::Torus).has_appendix);
  CHECK(descriptor(Geometry::Hyperelliptic).kaehler_locus({1.0, 2.0, {}}));
  CHECK_FALSE(descriptor(Geometry::Hyperelliptic).kaehler_locus({1.0, 2.0, {0.1, 0.0}}));
}

TEST_CASE("reference limits") {
  CHECK(*expected_circle_length(GeometryParams::inoue_s0(-1.5, 0.3)) ==
        Approx(2.0 * std::sqrt(2.0) * 1.5));
  CHECK(*expected_circle_length(GeometryParams::of(Geometry::InoueSpmJ1)) == Approx(std::sqrt(3.0)));
  CHECK_FALSE(expected_circle_length(GeometryParams::of(Geometry::KodairaPrimary)));
  const auto ke = expected_normalized_limit(GeometryParams::properly_elliptic(0.5));
  REQUIRE(ke);
  CHECK(ke->m11 == 2.0);
  CHECK(ke->m22 == 0.0);
}

TEST_CASE("structure constants") {
  SUBCASE("torus is abelian") {
    const auto mu = structure_constants(GeometryParams::of(Geometry::Torus));
    for (int a = 0; a < 4; ++a)
      for (int b = 0; b < 4; ++b) check_bracket(mu, a, b, {});
  }
  SUBCASE("Hopf, lambda = 0") {
    const auto mu = structure_constants(GeometryParams::hopf(0.0));
    check_bracket(mu, Z2, Zb2, {-1.0, 0.0, 1.0, 0.0});
    check_bracket(mu, Z1, Z2, {0.0, 1.0, 0.0, 0.0});
    check_bracket(mu, Z1, Zb2, {0.0, 0.0, 0.0, -1.0});
  }
  SUBCASE("Hopf, lambda = 0.5") {
    const auto mu = structure_constants(GeometryParams::hopf(0.5));
    check_bracket(mu, Z2, Zb2, {cplx(-1, 0.5), 0.0, cplx(1, 0.5), 0.0});
  }
  SUBCASE("Inoue S0, a = b = 1") {
    const auto mu = structure_constants(GeometryParams::inoue_s0(1.0, 1.0));
    check_bracket(mu, Z1, Z2, {cplx(-1, -1), 0.0, 0.0, 0.0});
    check_bracket(mu, Z1, Zb2, {cplx(1, 1), 0.0, 0.0, 0.0});
    check_bracket(mu, Z2, Zb2, {0.0, cplx(0, -2), 0.0, cplx(0, -2)});
  }
  SUBCASE("inadmissible parameters") {
    CHECK_THROWS_AS(structure_constants(GeometryParams::inoue_s0(0.0, 1.0)), InadmissibleParams);
    CHECK_THROWS_AS(structure_constants(GeometryParams::kodaira_secondary(0)),
                    InadmissibleParams);
  }
  SUBCASE("hygiene over random parameters") {
    std::mt19937_64 rng(21);
    for (const auto& d : list_geometries())
      for (int i = 0; i < 20; ++i) {
        const auto mu = structure_constants(random_params(d.geometry, rng));
        CHECK(mu.jacobi_violation() <= 1e-14);
        CHECK(mu.integrability_violation() == 0.0);
        CHECK(mu.antisymmetry_violation() == 0.0);
        CHECK(mu.reality_violation() == 0.0);
      }
  }
}

TEST_CASE("closed-form K examples") {
  SUBCASE("hyperelliptic (1, 1, 1/2)") {
    const Herm2 k = closed_form_K(GeometryParams::of(Geometry::Hyperelliptic), {1.0, 1.0, {0.5, 0.0}});
    CHECK(k.m11 == Approx(4.0 / 9.0));
    CHECK(k.m22 == Approx(1.0 / 9.0));
    CHECK(k.m12.real() == Approx(8.0 / 9.0));
    CHECK(k.m12.imag() == Approx(0.0));
  }
  SUBCASE("Hopf on the invariant ray") {
    const Herm2 k = closed_form_K(GeometryParams::hopf(0.0), {1.0, 1.5, {}});
    CHECK(k.m11 == Approx(4.0 / 9.0));
    CHECK(k.m22 == Approx(2.0 / 3.0));
    CHECK(k.m12 == cplx{});
  }
  SUBCASE("Sol J1 at the identity") {
    const Herm2 k = closed_form_K(GeometryParams::of(Geometry::InoueSpmJ1), {1.0, 1.0, {}});
    CHECK(k.m11 == Approx(-3.0));
    CHECK(k.m22 == Approx(0.0));
    CHECK(k.m12 == cplx{});
  }
  SUBCASE("torus") {
    CHECK(closed_form_K(GeometryParams::of(Geometry::Torus), {2.0, 3.0, {1.0, 1.0}}) == Herm2{});
  }
  SUBCASE("degenerate input") {
    CHECK_THROWS_AS(closed_form_K(GeometryParams::hopf(0.0), {1.0, 1.0, {1.0, 0.0}}),
                    DegenerateMetric);
  }
}

TEST_CASE("printed tables") {
  SUBCASE("hyperelliptic (1, 1, 1/2): Q2_22 = 2/3") {
    const AppendixTables t =
        appendix_tables(GeometryParams::of(Geometry::Hyperelliptic), {1.0, 1.0, {0.5, 0.0}});
    CHECK(t.q2.m22 == Approx(2.0 / 3.0));
  }
  SUBCASE("primary Kodaira at the identity") {
    const AppendixTables t =
        appendix_tables(GeometryParams::of(Geometry::KodairaPrimary), {1.0, 1.0, {}});
    CHECK(t.s.m11 == Approx(-1.0));
    CHECK(t.s.m22 == Approx(1.0));
    CHECK(t.q2.m11 == Approx(2.0));
    CHECK(t.q2.m22 == Approx(0.0));
    CHECK(t.q4.m11 == Approx(1.0));
    CHECK(t.q4.m22 == Approx(0.0));
  }
  SUBCASE("no tables for the torus") {
    CHECK_THROWS_AS(appendix_tables(GeometryParams::of(Geometry::Torus), {1.0, 1.0, {}}),
                    std::invalid_argument);
  }
  SUBCASE("assembly") {
    const AppendixTables t{{1.0, 2.0, {0.5, 0.0}}, {2.0, 0.0, {}}, {4.0, 4.0, {}},
                           {2.0, 2.0, {0.0, 1.0}}, {1.0, 1.0, {1.0, 0.0}}};
    const Herm2 q = assemble_q(t);
    CHECK(q.m11 == 1.0 - 1.0 - 1.0 + 1.0);
    CHECK(q.m22 == 0.0 - 1.0 - 1.0 + 1.0);
    CHECK(q.m12 == cplx(1.0, -0.5));
    CHECK(assemble_k(t) == t.s - q);
  }
}

// The reduced (x, y, u) systems are transcribed separately from the K
// tables; they must describe the same flow.
TEST_CASE("reduced systems agree with -K") {
  std::mt19937_64 rng(22);
  for (const auto& d : list_geometries()) {
    CAPTURE(d.id);
    const GeometryParams p = random_params(d.geometry, rng);
    for (int i = 0; i < 100; ++i) {
      const HermitianMetric g = random_metric(rng);
      const Rates r = rhs(p, g);
      const ReducedRates red = reduced_rates(p, g);
      const double udot = 2.0 * std::real(std::conj(g.z) * r.zdot);
      const double scale = 1.0 + std::abs(r.xdot) + std::abs(r.ydot) + std::abs(udot);
      CHECK(std::abs(red.xdot - r.xdot) <= 1e-12 * scale);
      CHECK(std::abs(red.ydot - r.ydot) <= 1e-12 * scale);
      CHECK(std::abs(red.udot - udot) <= 1e-12 * scale);
    }
  }
}

TEST_CASE("flow rates at reference points") {
  auto check = [](const Rates& r, double xd, double yd) {
    CHECK(r.xdot == Approx(xd));
    CHECK(r.ydot == Approx(yd));
    CHECK(std::abs(r.zdot) <= 1e-15);
  };
  check(rhs(GeometryParams::hopf(0.0), {1.0, 1.5, {}}), -4.0 / 9.0, -2.0 / 3.0);
  check(rhs(GeometryParams::of(Geometry::KodairaPrimary), {1.0, 1.0, {}}), 2.0, -1.0);
  check(rhs(GeometryParams::inoue_s0(1.0, 1.0), {1.0, 1.0, {}}), 0.0, 8.0);
}

TEST_CASE("random sampling stays admissible and positive") {
  std::mt19937_64 rng(23);
  for (int i = 0; i < 5000; ++i) {
    const HermitianMetric g = random_metric(rng);
    CHECK(g.x >= 0.1);
    CHECK(g.x <= 10.0);
    CHECK(g.det() >= 0.05 * g.x * g.y * (1.0 - 1e-12));
  }
  for (const auto& d : list_geometries())
    for (int i = 0; i < 50; ++i) CHECK_NOTHROW(validate_params(random_params(d.geometry, rng)));
}
