#include "hcf/parallel.hpp"

#include <algorithm>
#include <array>
#include <exception>

#include <omp.h>

namespace hcf {

namespace {

struct OracleRow {
  std::array<double, 3> rel{};
  double herm = 0.0;
};

OracleRow oracle_row(const GeometryParams& p, const StructureConstants& mu,
                     const HermitianMetric& g) {
  const Mat2 k = hcf_tensor(mu, g);
  const Herm2 gen = to_herm(k);
  const Herm2 ref = closed_form_K(p, g);
  const double scale = ref.max_abs();
  OracleRow r;
  r.rel = {oracle_rel_error(gen.m11, ref.m11, scale), oracle_rel_error(gen.m22, ref.m22, scale),
           oracle_rel_error(gen.m12, ref.m12, scale)};
  r.herm = hermiticity_defect(k) / (1.0 + scale);
  return r;
}

OracleStats reduce(const std::vector<OracleRow>& rows) {
  OracleStats s;
  s.n = rows.size();
  for (std::size_t i = 0; i < rows.size(); ++i) {
    for (int c = 0; c < 3; ++c)
      if (rows[i].rel[c] > s.max_rel) {
        s.max_rel = rows[i].rel[c];
        s.worst_index = i;
        s.worst_component = c;
      }
    s.max_hermiticity = std::max(s.max_hermiticity, rows[i].herm);
  }
  return s;
}

Herm2 eval_k(const GeometryParams& p, const StructureConstants& mu, const HermitianMetric& g,
             Engine engine) {
  return engine == Engine::ClosedForm ? closed_form_K(p, g) : to_herm(hcf_tensor(mu, g));
}

}  // namespace

double oracle_rel_error(cplx a, cplx b, double scale) noexcept {
  const double diff = std::abs(a - b);
  if (diff <= 1e-15 * (1.0 + scale)) return 0.0;
  return diff / std::max(std::abs(a), std::abs(b));
}

namespace serial {

std::vector<Herm2> hcf_batch(const GeometryParams& p, const std::vector<HermitianMetric>& gs,
                             Engine engine) {
  const StructureConstants mu = structure_constants(p);
  std::vector<Herm2> out(gs.size());
  for (std::size_t i = 0; i < gs.size(); ++i) out[i] = eval_k(p, mu, gs[i], engine);
  return out;
}

OracleStats oracle_agreement(const GeometryParams& p, const std::vector<HermitianMetric>& gs) {
  const StructureConstants mu = structure_constants(p);
  std::vector<OracleRow> rows(gs.size());
  for (std::size_t i = 0; i < gs.size(); ++i) rows[i] = oracle_row(p, mu, gs[i]);
  return reduce(rows);
}

std::vector<FlowResult> integrate_ensemble(const std::vector<FlowConfig>& configs) {
  std::vector<FlowResult> out;
  out.reserve(configs.size());
  for (const FlowConfig& c : configs) out.push_back(integrate(c));
  return out;
}

}  // namespace serial

namespace parallel {

int max_threads() noexcept { return omp_get_max_threads(); }

std::vector<Herm2> hcf_batch(const GeometryParams& p, const std::vector<HermitianMetric>& gs,
                             Engine engine) {
  const StructureConstants mu = structure_constants(p);
  std::vector<Herm2> out(gs.size());
  const auto n = static_cast<long>(gs.size());
  std::exception_ptr err;
#pragma omp parallel for schedule(static)
  for (long i = 0; i < n; ++i) {
    try {
      out[i] = eval_k(p, mu, gs[i], engine);
    } catch (...) {
#pragma omp critical
      if (!err) err = std::current_exception();
    }
  }
  if (err) std::rethrow_exception(err);
  return out;
}

OracleStats oracle_agreement(const GeometryParams& p, const std::vector<HermitianMetric>& gs) {
  const StructureConstants mu = structure_constants(p);
  std::vector<OracleRow> rows(gs.size());
  const auto n = static_cast<long>(gs.size());
  std::exception_ptr err;
#pragma omp parallel for schedule(static)
  for (long i = 0; i < n; ++i) {
    try {
      rows[i] = oracle_row(p, mu, gs[i]);
    } catch (...) {
#pragma omp critical
      if (!err) err = std::current_exception();
    }
  }
  if (err) std::rethrow_exception(err);
  return reduce(rows);
}

std::vector<FlowResult> integrate_ensemble(const std::vector<FlowConfig>& configs) {
  std::vector<FlowResult> out(configs.size());
  const auto n = static_cast<long>(configs.size());
  std::exception_ptr err;
  // run lengths differ a lot between geometries
#pragma omp parallel for schedule(dynamic, 1)
  for (long i = 0; i < n; ++i) {
    try {
      out[i] = integrate(configs[i]);
    } catch (...) {
#pragma omp critical
      if (!err) err = std::current_exception();
    }
  }
  if (err) std::rethrow_exception(err);
  return out;
}

}  // namespace parallel

}  // namespace hcf
