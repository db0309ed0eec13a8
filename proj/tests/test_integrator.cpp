#include <doctest.h>

#include <cmath>
#include <random>

#include "hcf/analysis.hpp"
#include "hcf/integrator.hpp"

using namespace hcf;
using doctest::Approx;

namespace {

FlowConfig make(const GeometryParams& p, const HermitianMetric& g0, double t_max) {
  FlowConfig c;
  c.params = p;
  c.g0 = g0;
  c.t_max = t_max;
  return c;
}

}  // namespace

TEST_CASE("Hopf invariant ray, lambda = 0") {
  const FlowResult r = integrate(make(GeometryParams::hopf(0.0), {1.0, 1.5, {}}, 10.0));
  REQUIRE(r.outcome.cls == OutcomeClass::ExtinctAt);
  REQUIRE(r.outcome.t_est);
  CHECK(std::abs(*r.outcome.t_est - 2.25) <= 1e-6);
  CHECK(*r.outcome.t_est <= 10.0);
  CHECK(detect_extinction(r.trajectory) == r.outcome.t_est);
  double dev = 0.0;
  for (const Sample& s : r.trajectory.samples) {
    if (s.t > 2.2) break;
    dev = std::max(dev, std::abs(s.x - (1.0 - 4.0 * s.t / 9.0)));
    CHECK(std::abs(s.y - 1.5 * s.x) <= 1e-9);
  }
  CHECK(dev <= 1e-6);
}

// T = (9/4) c x0 on y = (3/2) c x
TEST_CASE("Hopf invariant ray, general lambda") {
  for (auto [lambda, x0] : {std::pair{1.0, 1.0}, {0.5, 2.0}, {-1.2, 0.4}}) {
    const double c = 1.0 + lambda * lambda;
    const FlowResult r =
        integrate(make(GeometryParams::hopf(lambda), {x0, 1.5 * c * x0, {}}, 100.0));
    REQUIRE(r.outcome.cls == OutcomeClass::ExtinctAt);
    CHECK(std::abs(*r.outcome.t_est - 2.25 * c * x0) <= 2e-3);
    for (const Sample& s : r.trajectory.samples)
      // transverse round-off grows as t approaches T
      if (s.x > 1e-3 * x0) CHECK(s.y / s.x == Approx(1.5 * c).epsilon(1e-8));
  }
}

TEST_CASE("Hopf off the ray still collapses") {
  std::mt19937_64 rng(31);
  for (int i = 0; i < 10; ++i) {
    const FlowResult r = integrate(make(GeometryParams::hopf(0.7), random_metric(rng), 1000.0));
    CHECK(r.outcome.cls == OutcomeClass::ExtinctAt);
    CHECK(r.outcome.t_est.has_value());
  }
}

TEST_CASE("torus is stationary") {
  const HermitianMetric g0{2.0, 3.0, {1.0, -0.5}};
  const FlowResult r = integrate(make(GeometryParams::of(Geometry::Torus), g0, 100.0));
  CHECK(r.outcome.cls == OutcomeClass::ImmortalReachedTmax);
  CHECK_FALSE(r.outcome.t_est);
  CHECK(r.trajectory.samples.back().t == 100.0);
  for (const Sample& s : r.trajectory.samples) CHECK(s.metric() == g0);
  CHECK_FALSE(detect_extinction(r.trajectory));
}

TEST_CASE("hyperelliptic decay bound at t = 50") {
  FlowConfig c = make(GeometryParams::of(Geometry::Hyperelliptic), {1.0, 1.0, {0.5, 0.0}}, 50.0);
  c.abs_tol = 1e-30;
  const FlowResult r = integrate(c);
  CHECK(r.outcome.cls == OutcomeClass::ImmortalReachedTmax);
  const Sample& f = r.trajectory.samples.back();
  CHECK(f.u <= 0.25 * std::exp(-100.0) * (1.0 + 1e-6));
}

TEST_CASE("default absolute tolerance cannot resolve the hyperelliptic tail") {
  // z falls under abs_tol long before t = 50; the report counts those samples
  const FlowResult r =
      integrate(make(GeometryParams::of(Geometry::Hyperelliptic), {1.0, 1.0, {0.5, 0.0}}, 50.0));
  const DecayReport d = verify_decay_bound(r.trajectory, 1e-12);
  CHECK(d.below_resolution > 0);
}

TEST_CASE("sampling") {
  const FlowConfig c = make(GeometryParams::inoue_s0(1.0, 0.5), {1.0, 2.0, {0.3, 0.4}}, 20.0);
  const FlowResult r = integrate(c);
  const auto& s = r.trajectory.samples;
  REQUIRE(s.size() == 401);
  CHECK(s.front().t == 0.0);
  CHECK(s.front().metric() == c.g0);
  for (std::size_t i = 1; i < s.size(); ++i) {
    CHECK(s[i].t > s[i - 1].t);
    CHECK(s[i].t == Approx(0.05 * static_cast<double>(i)).epsilon(1e-12));
    CHECK(s[i].D / (s[i].x * s[i].y) >= c.degeneracy_threshold);
    CHECK(s[i].D == Approx(s[i].x * s[i].y - s[i].u));
  }
  CHECK(s.back().t == 20.0);
}

TEST_CASE("extinct runs end at the last accepted state") {
  const FlowResult r = integrate(make(GeometryParams::hopf(0.0), {1.0, 1.0, {0.2, 0.1}}, 10.0));
  REQUIRE(r.outcome.cls == OutcomeClass::ExtinctAt);
  const auto& s = r.trajectory.samples;
  for (std::size_t i = 1; i < s.size(); ++i) CHECK(s[i].t > s[i - 1].t);
  CHECK(r.outcome.final_state.t == s.back().t);
  CHECK(*r.outcome.t_est >= s.back().t);
}

TEST_CASE("diagonal metrics stay diagonal") {
  for (const auto& d : list_geometries()) {
    CAPTURE(d.id);
    std::mt19937_64 rng(32);
    FlowConfig c = make(random_params(d.geometry, rng), {1.3, 0.7, {}}, 50.0);
    const FlowResult r = integrate(c);
    CHECK(diagonal_invariance(r.trajectory, c.abs_tol).pass);
  }
}

TEST_CASE("engines agree") {
  std::mt19937_64 rng(33);
  for (const auto& d : list_geometries()) {
    CAPTURE(d.id);
    FlowConfig c = make(random_params(d.geometry, rng), random_metric(rng, 0.5, 2.0), 5.0);
    const FlowResult a = integrate(c);
    c.engine = Engine::GeneralContraction;
    const FlowResult b = integrate(c);
    REQUIRE(a.outcome.cls == b.outcome.cls);
    const std::size_t n = std::min(a.trajectory.samples.size(), b.trajectory.samples.size());
    const Sample& s0 = a.trajectory.samples.front();
    const double scale0 = std::max({std::abs(s0.x), std::abs(s0.y), std::abs(s0.z)});
    for (std::size_t i = 0; i < n; ++i) {
      const Sample &p = a.trajectory.samples[i], &q = b.trajectory.samples[i];
      // near collapse both are ill-conditioned; relative error goes like dT / (T - t)
      const double scale = std::max({std::abs(p.x), std::abs(p.y), std::abs(p.z)});
      if (p.D / (p.x * p.y) < 1e-3 || scale < 1e-2 * scale0) break;
      CHECK(std::abs(p.x - q.x) <= 100 * c.rel_tol * scale);
      CHECK(std::abs(p.y - q.y) <= 100 * c.rel_tol * scale);
      CHECK(std::abs(p.z - q.z) <= 100 * c.rel_tol * scale);
    }
  }
}

// Global error accumulates over the run, so allow a modest multiple of rel_tol.
TEST_CASE("halving rel_tol moves samples by a small multiple of the coarse tolerance") {
  std::mt19937_64 rng(34);
  for (Geometry g : {Geometry::Hyperelliptic, Geometry::ProperlyElliptic, Geometry::KodairaPrimary,
                     Geometry::InoueS0, Geometry::InoueSpJ2}) {
    CAPTURE(geometry_id(g));
    FlowConfig c = make(random_params(g, rng), random_metric(rng, 0.5, 2.0), 20.0);
    c.rel_tol = 1e-8;
    const FlowResult a = integrate(c);
    c.rel_tol = 5e-9;
    const FlowResult b = integrate(c);
    REQUIRE(a.trajectory.samples.size() == b.trajectory.samples.size());
    double worst = 0.0;
    for (std::size_t i = 0; i < a.trajectory.samples.size(); ++i) {
      const Sample &p = a.trajectory.samples[i], &q = b.trajectory.samples[i];
      const double scale = std::max({std::abs(p.x), std::abs(p.y)});
      worst = std::max({worst, std::abs(p.x - q.x) / scale, std::abs(p.y - q.y) / scale,
                        std::abs(p.z - q.z) / scale});
    }
    CHECK(worst <= 1e-7);
  }
}

TEST_CASE("invalid input") {
  SUBCASE("non-positive g0 is DegenerateInput") {
    const FlowResult r = integrate(make(GeometryParams::hopf(0.0), {1.0, 1.0, {2.0, 0.0}}, 1.0));
    CHECK(r.outcome.cls == OutcomeClass::DegenerateInput);
    CHECK(r.outcome.reason == StopReason::InvalidInput);
    CHECK_FALSE(r.outcome.diagnostics.empty());
  }
  SUBCASE("settings out of range") {
    const FlowConfig ok = make(GeometryParams::hopf(0.0), {1.0, 1.0, {}}, 1.0);
    auto bad = [&](auto mutate) {
      FlowConfig c = ok;
      mutate(c);
      CHECK_THROWS_AS(integrate(c), std::invalid_argument);
    };
    bad([](FlowConfig& c) { c.rel_tol = 0.0; });
    bad([](FlowConfig& c) { c.rel_tol = 1.0; });
    bad([](FlowConfig& c) { c.abs_tol = -1e-3; });
    bad([](FlowConfig& c) { c.t_max = -1.0; });
    bad([](FlowConfig& c) { c.sample_stride = 0.0; });
    bad([](FlowConfig& c) { c.max_steps = 0; });
    bad([](FlowConfig& c) { c.params = GeometryParams::inoue_s0(0.0, 0.0); });
  }
  SUBCASE("t_max = 0") {
    const FlowResult r = integrate(make(GeometryParams::hopf(0.0), {1.0, 1.0, {}}, 0.0));
    CHECK(r.outcome.cls == OutcomeClass::ImmortalReachedTmax);
    CHECK(r.trajectory.samples.size() == 1);
  }
}

TEST_CASE("step budget exhaustion is an integrator failure") {
  FlowConfig c = make(GeometryParams::of(Geometry::KodairaSecondary), {1.0, 1.0, {0.5, 0.0}}, 100.0);
  c.max_steps = 3;
  const FlowResult r = integrate(c);
  CHECK(r.outcome.cls == OutcomeClass::IntegratorFailure);
  CHECK(r.outcome.reason == StopReason::MaxSteps);
  CHECK_FALSE(r.outcome.t_est);
}

TEST_CASE("sample derivatives") {
  const Sample s = make_sample(1.0, {2.0, 3.0, {1.0, 1.0}}, {0.5, -0.25, {0.1, -0.2}});
  CHECK(s.u == 2.0);
  CHECK(s.D == 4.0);
  CHECK(s.udot() == Approx(2.0 * (1.0 * 0.1 + 1.0 * -0.2)));
  CHECK(s.ddot() == Approx(0.5 * 3.0 + 2.0 * -0.25 - s.udot()));
}

TEST_CASE("engine names") {
  CHECK(engine_from_string("closed-form") == Engine::ClosedForm);
  CHECK(engine_from_string("general") == Engine::GeneralContraction);
  CHECK(to_string(Engine::GeneralContraction) == "general");
  CHECK_THROWS_AS(engine_from_string("rk4"), std::invalid_argument);
}
