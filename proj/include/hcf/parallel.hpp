#pragma once

// Batch kernels. Every kernel exists twice with the same signature: a plain
// loop in hcf::serial (the reference) and an OpenMP version in hcf::parallel.
// Results are identical element for element; reductions are done in index
// order after the parallel loop so they are deterministic.

#include <cstddef>
#include <vector>

#include "hcf/integrator.hpp"

namespace hcf {

/// |a - b| / max(|a|, |b|), or 0 when |a - b| <= 1e-15 (1 + scale).
double oracle_rel_error(cplx a, cplx b, double scale) noexcept;

struct OracleStats {
  std::size_t n = 0;
  double max_rel = 0.0;
  double max_hermiticity = 0.0;  // of the general-contraction K
  std::size_t worst_index = 0;
  int worst_component = 0;  // 0: K_11, 1: K_22, 2: K_12
};

namespace serial {

std::vector<Herm2> hcf_batch(const GeometryParams& p, const std::vector<HermitianMetric>& gs,
                             Engine engine);
/// General-contraction K against closed_form_K on every metric.
OracleStats oracle_agreement(const GeometryParams& p, const std::vector<HermitianMetric>& gs);
std::vector<FlowResult> integrate_ensemble(const std::vector<FlowConfig>& configs);

}  // namespace serial

namespace parallel {

std::vector<Herm2> hcf_batch(const GeometryParams& p, const std::vector<HermitianMetric>& gs,
                             Engine engine);
OracleStats oracle_agreement(const GeometryParams& p, const std::vector<HermitianMetric>& gs);
/// Configs that throw (invalid settings) propagate the first exception after
/// the loop finishes.
std::vector<FlowResult> integrate_ensemble(const std::vector<FlowConfig>& configs);

int max_threads() noexcept;

}  // namespace parallel

}  // namespace hcf
