#include <doctest.h>

#include <random>

#include "hcf/parallel.hpp"

using namespace hcf;

TEST_CASE("relative error helper") {
  CHECK(oracle_rel_error(1.0, 1.0, 1.0) == 0.0);
  CHECK(oracle_rel_error(1e-17, 0.0, 0.0) == 0.0);  // below the absolute floor
  CHECK(oracle_rel_error(2.0, 1.0, 2.0) == doctest::Approx(0.5));
  CHECK(oracle_rel_error(cplx(0, 1), cplx(0, -1), 1.0) == doctest::Approx(2.0));
}

TEST_CASE("general contraction matches the closed forms on 200 metrics per geometry") {
  std::mt19937_64 rng(51);
  for (const auto& d : list_geometries()) {
    CAPTURE(d.id);
    const GeometryParams p = random_params(d.geometry, rng);
    std::vector<HermitianMetric> gs(200);
    for (auto& g : gs) g = random_metric(rng);
    const OracleStats st = parallel::oracle_agreement(p, gs);
    CHECK(st.n == 200);
    CHECK(st.max_rel <= 1e-9);
    CHECK(st.max_hermiticity <= 1e-12);
  }
}

TEST_CASE("parallel kernels reproduce the serial ones exactly") {
  std::mt19937_64 rng(52);
  for (const auto& d : list_geometries()) {
    CAPTURE(d.id);
    const GeometryParams p = random_params(d.geometry, rng);
    std::vector<HermitianMetric> gs(1000);
    for (auto& g : gs) g = random_metric(rng);
    for (Engine e : {Engine::ClosedForm, Engine::GeneralContraction})
      CHECK(serial::hcf_batch(p, gs, e) == parallel::hcf_batch(p, gs, e));
    const OracleStats a = serial::oracle_agreement(p, gs), b = parallel::oracle_agreement(p, gs);
    CHECK(a.max_rel == b.max_rel);
    CHECK(a.max_hermiticity == b.max_hermiticity);
    CHECK(a.worst_index == b.worst_index);
    CHECK(a.worst_component == b.worst_component);
  }
}

TEST_CASE("ensemble integration is deterministic across threads") {
  std::mt19937_64 rng(53);
  std::vector<FlowConfig> cs;
  for (const auto& d : list_geometries())
    for (int i = 0; i < 2; ++i) {
      FlowConfig c;
      c.params = random_params(d.geometry, rng);
      c.g0 = random_metric(rng);
      c.t_max = 30.0;
      cs.push_back(c);
    }
  const auto a = serial::integrate_ensemble(cs), b = parallel::integrate_ensemble(cs);
  REQUIRE(a.size() == b.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    CHECK(a[i].outcome.cls == b[i].outcome.cls);
    CHECK(a[i].outcome.t_est == b[i].outcome.t_est);
    REQUIRE(a[i].trajectory.samples.size() == b[i].trajectory.samples.size());
    for (std::size_t k = 0; k < a[i].trajectory.samples.size(); ++k) {
      const Sample &p = a[i].trajectory.samples[k], &q = b[i].trajectory.samples[k];
      CHECK(p.t == q.t);
      CHECK(p.metric() == q.metric());
    }
  }
}

TEST_CASE("errors propagate out of the parallel loops") {
  std::vector<FlowConfig> cs(4);
  cs[2].rel_tol = 5.0;
  CHECK_THROWS_AS(serial::integrate_ensemble(cs), std::invalid_argument);
  CHECK_THROWS_AS(parallel::integrate_ensemble(cs), std::invalid_argument);
  const std::vector<HermitianMetric> gs = {{1.0, 1.0, {}}, {1.0, 1.0, {2.0, 0.0}}};
  CHECK_THROWS_AS(parallel::hcf_batch(GeometryParams::hopf(0.0), gs, Engine::ClosedForm),
                  DegenerateMetric);
  CHECK(parallel::max_threads() >= 1);
}
