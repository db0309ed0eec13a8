// Serial reference against OpenMP kernels on the same inputs.

#include <random>
#include <vector>

#include <benchmark/benchmark.h>

#include "hcf/catalog.hpp"
#include "hcf/parallel.hpp"

namespace {

using namespace hcf;

std::vector<HermitianMetric> metrics(std::size_t n) {
  std::mt19937_64 rng(20240611);
  std::vector<HermitianMetric> out;
  out.reserve(n);
  for (std::size_t i = 0; i < n; ++i) out.push_back(random_metric(rng));
  return out;
}

std::vector<FlowConfig> ensemble(std::size_t n) {
  std::mt19937_64 rng(20240611);
  std::vector<FlowConfig> out;
  const auto& all = list_geometries();
  for (std::size_t i = 0; i < n; ++i) {
    FlowConfig c;
    c.params = random_params(all[i % all.size()].geometry, rng);
    c.g0 = random_metric(rng, 0.5, 2.0);
    c.t_max = 20.0;
    out.push_back(c);
  }
  return out;
}

const GeometryParams kInoue = GeometryParams::of(Geometry::InoueSpJ2);

template <auto Kernel>
void batch(benchmark::State& st) {
  const auto gs = metrics(static_cast<std::size_t>(st.range(0)));
  for (auto _ : st) benchmark::DoNotOptimize(Kernel(kInoue, gs, Engine::GeneralContraction));
  st.SetItemsProcessed(st.iterations() * st.range(0));
}

template <auto Kernel>
void oracle(benchmark::State& st) {
  const auto gs = metrics(static_cast<std::size_t>(st.range(0)));
  for (auto _ : st) benchmark::DoNotOptimize(Kernel(kInoue, gs));
  st.SetItemsProcessed(st.iterations() * st.range(0));
}

template <auto Kernel>
void flows(benchmark::State& st) {
  const auto cs = ensemble(static_cast<std::size_t>(st.range(0)));
  for (auto _ : st) benchmark::DoNotOptimize(Kernel(cs));
  st.SetItemsProcessed(st.iterations() * st.range(0));
}

}  // namespace

BENCHMARK(batch<serial::hcf_batch>)->Name("hcf_batch/serial")->RangeMultiplier(8)->Range(64, 32768)->UseRealTime();
BENCHMARK(batch<parallel::hcf_batch>)->Name("hcf_batch/parallel")->RangeMultiplier(8)->Range(64, 32768)->UseRealTime();
BENCHMARK(oracle<serial::oracle_agreement>)->Name("oracle/serial")->Arg(4096)->UseRealTime();
BENCHMARK(oracle<parallel::oracle_agreement>)->Name("oracle/parallel")->Arg(4096)->UseRealTime();
BENCHMARK(flows<serial::integrate_ensemble>)->Name("ensemble/serial")->Arg(36)->UseRealTime()->Unit(benchmark::kMillisecond);
BENCHMARK(flows<parallel::integrate_ensemble>)->Name("ensemble/parallel")->Arg(36)->UseRealTime()->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
