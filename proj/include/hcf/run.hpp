#pragma once

// One flow run with its post-processing, and parameter sweeps over runs.

#include <filesystem>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include <json.hpp>

#include "hcf/analysis.hpp"
#include "hcf/io.hpp"

namespace hcf {

struct RunReport {
  FlowConfig config;
  FlowResult result;
  std::optional<LinearFit> slope_x, slope_y;
  std::optional<LimitDescriptor> limit;
  std::string limit_note;  // why no classification was possible
  std::vector<InvariantCheck> invariants;
  std::optional<DecayReport> decay;  // hyperelliptic only
};

/// Integrates and analyses. Throws std::invalid_argument for bad settings.
RunReport execute(const FlowConfig& config);
/// Analyses an existing result.
RunReport analyse(const FlowConfig& config, FlowResult result);

LimitClass classification(const RunReport& r) noexcept;
/// 0 clean, 1 degenerate input, 2 unclassified, 3 integrator failure.
int exit_code(const RunReport& r) noexcept;

nlohmann::json analysis_json(const RunReport& r);
/// Writes the requested files into dir (created if needed), each atomically.
void write_run_outputs(const RunReport& r, const std::filesystem::path& dir,
                       const std::set<Emit>& emit);

struct GridAxis {
  std::string name;  // lambda, a, b, epsilon, x0, y0, z0_re, z0_im, t_max, rel_tol, abs_tol
  std::vector<double> values;
};

/// "name=v1,v2,..." (an empty value list is allowed and yields an empty grid).
GridAxis parse_axis(const std::string& spec);
/// {"lambda": [0, 0.5], ...}; keys in document order.
std::vector<GridAxis> grid_from_json(const nlohmann::json& j);
/// Cartesian product applied to base, first axis varying slowest. Zero axes
/// give the base config alone; an axis with no values gives nothing.
std::vector<FlowConfig> expand_grid(const FlowConfig& base, const std::vector<GridAxis>& axes);
/// Axes varied together: the i-th config takes the i-th value of every axis.
/// All axes must have the same length (std::invalid_argument otherwise).
std::vector<FlowConfig> expand_zip(const FlowConfig& base, const std::vector<GridAxis>& axes);

struct SweepRow {
  std::size_t index = 0;
  FlowConfig config;
  bool completed = false;
  std::string error;
  std::optional<RunReport> report;
};

/// Runs every config on up to `jobs` threads, writing per-run outputs under
/// out_dir/run_NNNN and the summary to out_dir/summary.csv. A failing run
/// is recorded in its row and does not stop the others.
std::vector<SweepRow> run_sweep(const std::vector<FlowConfig>& configs,
                                const std::filesystem::path& out_dir,
                                const std::set<Emit>& emit, int jobs);

std::string sweep_summary_csv(const std::vector<SweepRow>& rows);

}  // namespace hcf
