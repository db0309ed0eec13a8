// hcf: list geometries, run single flows, verify K against the closed forms,
// sweep parameter grids.

#include <cstdlib>
#include <iostream>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <fmt/format.h>
#include <spdlog/sinks/stdout_color_sinks.h>
#include <spdlog/spdlog.h>

#include "hcf/catalog.hpp"
#include "hcf/curvature.hpp"
#include "hcf/io.hpp"
#include "hcf/parallel.hpp"
#include "hcf/run.hpp"

using nlohmann::json;

namespace {

constexpr int kExitConfig = 1;
constexpr double kOracleTolerance = 1e-9;

void setup_logging() {
  auto logger = spdlog::stderr_color_mt("hcf");
  spdlog::set_default_logger(logger);
  spdlog::set_level(spdlog::level::warn);
  if (const char* lvl = std::getenv("HCF_LOG"))
    spdlog::set_level(spdlog::level::from_str(lvl));
}

// Flags describing one FlowConfig. Only flags that were given end up in the
// JSON document, which then goes through the same fail-closed parser as
// config files.
struct ConfigFlags {
  std::string geometry;
  double lambda = 0, a = 0, b = 0;
  int epsilon = 1;
  double x0 = 1, y0 = 1, z0_re = 0, z0_im = 0;
  double t_max = 0, rel_tol = 0, abs_tol = 0;
  std::string engine;
  std::string manifest, config;

  std::vector<CLI::Option*> flow_opts;
  CLI::Option* opt_manifest = nullptr;
  CLI::Option* opt_config = nullptr;

  void add(CLI::App& app) {
    opt_manifest = app.add_option("--manifest", manifest, "RunManifest JSON file")
                       ->check(CLI::ExistingFile);
    opt_config =
        app.add_option("--config", config, "FlowConfig JSON file")->check(CLI::ExistingFile);
    opt_manifest->excludes(opt_config);
    auto flow = [&](CLI::Option* o) {
      o->excludes(opt_manifest)->excludes(opt_config);
      flow_opts.push_back(o);
    };
    flow(app.add_option("--geometry", geometry, "geometry id (see `list`)"));
    flow(app.add_option("--lambda", lambda, "Hopf / properly elliptic parameter"));
    flow(app.add_option("--a", a, "Inoue S0 parameter a (nonzero)"));
    flow(app.add_option("--b", b, "Inoue S0 parameter b"));
    flow(app.add_option("--epsilon", epsilon, "secondary Kodaira sign, +1 or -1"));
    flow(app.add_option("--x0", x0, "initial x"));
    flow(app.add_option("--y0", y0, "initial y"));
    flow(app.add_option("--z0-re", z0_re, "initial Re z"));
    flow(app.add_option("--z0-im", z0_im, "initial Im z"));
    flow(app.add_option("--t-max", t_max, "final time"));
    flow(app.add_option("--rel-tol", rel_tol, "relative tolerance"));
    flow(app.add_option("--abs-tol", abs_tol, "absolute tolerance"));
    flow(app.add_option("--engine", engine, "closed-form or general"));
  }

  bool given(std::string_view name) const {
    for (auto* o : flow_opts)
      if (o->get_name() == name) return o->count() > 0;
    return false;
  }

  json config_json() const {
    if (!given("--geometry")) throw hcf::ConfigError("/geometry", "--geometry is required");
    json j = {{"schema_version", hcf::kSchemaVersion}, {"geometry", geometry}};
    json params = json::object();
    if (given("--lambda")) params["lambda"] = lambda;
    if (given("--a")) params["a"] = a;
    if (given("--b")) params["b"] = b;
    if (given("--epsilon")) params["epsilon"] = epsilon;
    if (!params.empty()) j["params"] = params;
    j["g0"] = {{"x", x0}, {"y", y0}, {"z_re", z0_re}, {"z_im", z0_im}};
    if (given("--t-max")) j["t_max"] = t_max;
    if (given("--rel-tol")) j["rel_tol"] = rel_tol;
    if (given("--abs-tol")) j["abs_tol"] = abs_tol;
    if (given("--engine")) j["engine"] = engine;
    return j;
  }

  // Manifest when one was given, otherwise a manifest around the config.
  hcf::RunManifest resolve() const {
    if (opt_manifest->count()) return hcf::run_manifest_from_json(hcf::read_json_file(manifest));
    hcf::RunManifest m;
    m.config = hcf::flow_config_from_json(opt_config->count() ? hcf::read_json_file(config)
                                                              : config_json());
    return m;
  }
};

std::set<hcf::Emit> parse_emit(const std::vector<std::string>& items) {
  std::set<hcf::Emit> out;
  for (const std::string& s : items) {
    try {
      out.insert(hcf::emit_from_string(s));
    } catch (const std::invalid_argument& e) {
      throw hcf::ConfigError("/emit", e.what());
    }
  }
  return out;
}

// list

int cmd_list(bool as_json, const std::string& geometry) {
  std::vector<const hcf::GeometryDescriptor*> rows;
  if (geometry.empty()) {
    for (const auto& d : hcf::list_geometries()) rows.push_back(&d);
  } else {
    rows.push_back(&hcf::descriptor(hcf::geometry_from_id(geometry)));
  }
  if (as_json) {
    json j = geometry.empty() ? hcf::catalog_json() : hcf::to_json(*rows.front());
    std::cout << j.dump(2) << '\n';
    return 0;
  }
  fmt::print("{:<20} {:<38} {:<17} {:<22} {}\n", "id", "name", "expected_outcome",
             "expected_gh_limit", "parameters");
  for (const auto* d : rows) {
    std::string params;
    for (const auto& p : d->params)
      params += fmt::format("{}{} ({}: {})", params.empty() ? "" : "; ", p.name, p.kind,
                            p.constraint);
    fmt::print("{:<20} {:<38} {:<17} {:<22} {}\n", d->id, d->name,
               hcf::to_string(d->expected_outcome), hcf::to_string(d->expected_gh_limit),
               params.empty() ? "-" : params);
  }
  return 0;
}

// run

int cmd_run(const ConfigFlags& flags, const std::string& out, const std::vector<std::string>& emit,
            bool emit_given) {
  hcf::RunManifest m = flags.resolve();
  if (!out.empty()) m.output_dir = out;
  if (m.output_dir.empty()) throw hcf::ConfigError("/output_dir", "no output directory (--out)");
  if (emit_given) {
    m.emit = parse_emit(emit);
    if (m.emit.empty()) throw hcf::ConfigError("/emit", "expected at least one output kind");
  }

  const hcf::RunReport r = hcf::execute(m.config);
  const hcf::FlowOutcome& o = r.result.outcome;
  if (o.cls == hcf::OutcomeClass::DegenerateInput) {
    fmt::print(stderr, "/g0: {}\n", o.diagnostics);
    return hcf::exit_code(r);
  }
  hcf::write_run_outputs(r, m.output_dir, m.emit);

  fmt::print("geometry        {}\n", hcf::geometry_id(m.config.params.geometry));
  fmt::print("outcome         {} ({})\n", hcf::to_string(o.cls), hcf::to_string(o.reason));
  if (o.t_est) fmt::print("T_est           {:.10g}\n", *o.t_est);
  if (r.slope_x) fmt::print("slope x         {:.6g}\n", r.slope_x->slope);
  if (r.slope_y) fmt::print("slope y         {:.6g}\n", r.slope_y->slope);
  fmt::print("classification  {}\n", hcf::to_string(hcf::classification(r)));
  if (r.limit && r.limit->circle_length)
    fmt::print("circle length   {:.6g}\n", *r.limit->circle_length);
  if (!r.limit && !r.limit_note.empty()) fmt::print("note            {}\n", r.limit_note);
  fmt::print("steps           {} accepted, {} rejected\n", r.result.trajectory.accepted_steps,
             r.result.trajectory.rejected_steps);
  fmt::print("output          {}\n", m.output_dir.string());
  return hcf::exit_code(r);
}

// verify

struct AppendixDiff {
  std::string entry;
  double diff = 0.0;  // worst relative difference over the metrics
};

// Printed tables against the general route, entry by entry.
std::vector<AppendixDiff> appendix_diff(const hcf::GeometryParams& p,
                                        const std::vector<hcf::HermitianMetric>& gs) {
  const hcf::StructureConstants mu = hcf::structure_constants(p);
  const char* names[] = {"S", "Q1", "Q2", "Q3", "Q4", "S-Q"};
  const char* comps[] = {"11", "22", "12"};
  std::vector<AppendixDiff> out;
  for (const char* n : names)
    for (const char* c : comps) out.push_back({fmt::format("{}_{}", n, c), 0.0});
  for (const hcf::HermitianMetric& g : gs) {
    const hcf::CurvatureBundle cb = hcf::curvature_bundle(mu, g);
    const hcf::AppendixTables t = hcf::appendix_tables(p, g);
    const hcf::Herm2 mine[] = {hcf::to_herm(cb.s),     hcf::to_herm(cb.q.q1),
                               hcf::to_herm(cb.q.q2),  hcf::to_herm(cb.q.q3),
                               hcf::to_herm(cb.q.q4),  hcf::to_herm(cb.k)};
    const hcf::Herm2 printed[] = {t.s, t.q1, t.q2, t.q3, t.q4, hcf::assemble_k(t)};
    for (int i = 0; i < 6; ++i) {
      const double scale = std::max(mine[i].max_abs(), printed[i].max_abs());
      for (int c = 0; c < 3; ++c) {
        const int r = c == 2 ? 0 : c, s = c == 2 ? 1 : c;
        const double d = hcf::oracle_rel_error(mine[i].entry(r, s), printed[i].entry(r, s), scale);
        auto& slot = out[static_cast<std::size_t>(3 * i + c)].diff;
        slot = std::max(slot, d);
      }
    }
  }
  return out;
}

int cmd_verify(const std::string& geometry, int samples, std::uint64_t seed, bool appendix,
               bool as_json) {
  std::vector<hcf::Geometry> todo;
  if (geometry.empty()) {
    for (const auto& d : hcf::list_geometries()) todo.push_back(d.geometry);
  } else {
    todo.push_back(hcf::geometry_from_id(geometry));
  }

  std::mt19937_64 rng(seed);
  bool all_pass = true;
  json report = {{"schema_version", hcf::kSchemaVersion},
                 {"seed", seed},
                 {"samples", samples},
                 {"tolerance", kOracleTolerance},
                 {"geometries", json::array()}};
  if (!as_json)
    fmt::print("{:<20} {:>8} {:>14} {:>14}  {}\n", "geometry", "samples", "max_rel_err",
               "hermiticity", "status");
  for (hcf::Geometry g : todo) {
    const hcf::GeometryParams p = hcf::random_params(g, rng);
    std::vector<hcf::HermitianMetric> gs(static_cast<std::size_t>(samples));
    for (auto& m : gs) m = hcf::random_metric(rng);
    const hcf::OracleStats st = hcf::parallel::oracle_agreement(p, gs);
    const bool pass = st.max_rel <= kOracleTolerance;
    all_pass = all_pass && pass;

    hcf::FlowConfig shown;
    shown.params = p;
    json row = {{"geometry", hcf::geometry_id(g)},
                {"params", hcf::to_json(shown)["params"]},
                {"max_rel_error", st.max_rel},
                {"max_hermiticity_defect", st.max_hermiticity},
                {"pass", pass}};
    if (!as_json)
      fmt::print("{:<20} {:>8} {:>14.3e} {:>14.3e}  {}\n", hcf::geometry_id(g), st.n, st.max_rel,
                 st.max_hermiticity, pass ? "PASS" : "FAIL");

    if (appendix) {
      if (!hcf::descriptor(g).has_appendix) {
        row["appendix"] = nullptr;
        if (!as_json) fmt::print("  appendix: no tables for this geometry\n");
      } else {
        json diffs = json::object();
        int flagged = 0;
        for (const AppendixDiff& d : appendix_diff(p, gs)) {
          diffs[d.entry] = d.diff;
          if (d.diff > kOracleTolerance) {
            ++flagged;
            if (!as_json)
              fmt::print("  appendix differs: {:<8} max rel diff {:.3e}\n", d.entry, d.diff);
          }
        }
        if (!as_json && flagged == 0) fmt::print("  appendix: all entries agree\n");
        row["appendix"] = diffs;
      }
    }
    report["geometries"].push_back(row);
  }
  report["pass"] = all_pass;
  if (as_json) std::cout << report.dump(2) << '\n';
  return all_pass ? 0 : 2;
}

// sweep

int cmd_sweep(const ConfigFlags& flags, const std::vector<std::string>& grid,
              const std::string& grid_file, bool zip, int jobs, const std::string& out,
              const std::vector<std::string>& emit, bool emit_given) {
  hcf::RunManifest base = flags.resolve();
  if (!out.empty()) base.output_dir = out;
  if (base.output_dir.empty()) throw hcf::ConfigError("/output_dir", "no output directory (--out)");
  if (emit_given) base.emit = parse_emit(emit);

  std::vector<hcf::GridAxis> axes;
  if (!grid_file.empty()) axes = hcf::grid_from_json(hcf::read_json_file(grid_file));
  for (const std::string& g : grid) {
    try {
      axes.push_back(hcf::parse_axis(g));
    } catch (const std::invalid_argument& e) {
      throw hcf::ConfigError("/grid", e.what());
    }
  }
  std::vector<hcf::FlowConfig> configs;
  try {
    configs = zip ? hcf::expand_zip(base.config, axes) : hcf::expand_grid(base.config, axes);
  } catch (const std::invalid_argument& e) {
    throw hcf::ConfigError("/grid", e.what());
  }

  const auto rows = hcf::run_sweep(configs, base.output_dir, base.emit,
                                   jobs > 0 ? jobs : hcf::parallel::max_threads());
  std::size_t failed = 0;
  for (const auto& r : rows) {
    if (!r.completed) {
      ++failed;
      fmt::print(stderr, "run {:04d} failed: {}\n", r.index, r.error);
    }
  }
  fmt::print("{} runs, {} failed, summary {}\n", rows.size(), failed,
             (base.output_dir / "summary.csv").string());
  return failed == 0 ? 0 : kExitConfig;
}

}  // namespace

int main(int argc, char** argv) {
  setup_logging();
  CLI::App app{"Hermitian curvature flow on left-invariant metrics of complex surfaces", "hcf"};
  app.require_subcommand(1);

  bool list_json = false;
  std::string list_geometry;
  auto* list = app.add_subcommand("list", "print the geometry catalog");
  list->add_flag("--json", list_json, "machine-readable output");
  list->add_option("--geometry", list_geometry, "only this entry");

  ConfigFlags run_flags;
  std::string run_out;
  std::vector<std::string> run_emit;
  auto* run = app.add_subcommand("run", "integrate one flow and analyse it");
  run_flags.add(*run);
  run->add_option("--out", run_out, "output directory (overrides the manifest)");
  auto* run_emit_opt = run->add_option(
      "--emit", run_emit, "trajectory_csv, outcome_json, analysis_json, plot_data")->delimiter(',');

  std::string verify_geometry;
  bool verify_all = false, verify_appendix = false, verify_json = false;
  int verify_samples = 200;
  std::uint64_t verify_seed = 7;
  auto* verify = app.add_subcommand("verify", "general contraction against the closed-form K");
  auto* vall = verify->add_flag("--all", verify_all, "every geometry (default)");
  verify->add_option("--geometry", verify_geometry, "one geometry")->excludes(vall);
  verify->add_option("--samples", verify_samples, "random metrics per geometry")
      ->check(CLI::Range(1, 10'000'000));
  verify->add_option("--seed", verify_seed, "RNG seed");
  verify->add_flag("--appendix", verify_appendix, "also diff the printed tables (report only)");
  verify->add_flag("--json", verify_json, "machine-readable output");

  ConfigFlags sweep_flags;
  std::vector<std::string> sweep_grid, sweep_emit;
  std::string sweep_grid_file, sweep_out;
  bool sweep_zip = false;
  int sweep_jobs = 0;
  auto* sweep = app.add_subcommand("sweep", "run a parameter grid");
  sweep_flags.add(*sweep);
  sweep->add_option("--grid", sweep_grid, "axis as name=v1,v2,... (repeatable)");
  sweep->add_option("--grid-file", sweep_grid_file, "JSON object of axis arrays")
      ->check(CLI::ExistingFile);
  sweep->add_flag("--zip", sweep_zip, "vary the axes together instead of as a product");
  sweep->add_option("--jobs", sweep_jobs, "worker threads (default: all)");
  sweep->add_option("--out", sweep_out, "output directory");
  auto* sweep_emit_opt = sweep->add_option("--emit", sweep_emit, "per-run outputs")->delimiter(',');

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : 1;  // usage errors are configuration errors
  }

  try {
    if (*list) return cmd_list(list_json, list_geometry);
    if (*run) return cmd_run(run_flags, run_out, run_emit, run_emit_opt->count() > 0);
    if (*verify)
      return cmd_verify(verify_geometry, verify_samples, verify_seed, verify_appendix,
                        verify_json);
    if (*sweep)
      return cmd_sweep(sweep_flags, sweep_grid, sweep_grid_file, sweep_zip, sweep_jobs, sweep_out,
                       sweep_emit, sweep_emit_opt->count() > 0);
  } catch (const hcf::ConfigError& e) {
    fmt::print(stderr, "config error at {}\n", e.what());
    return kExitConfig;
  } catch (const std::invalid_argument& e) {
    fmt::print(stderr, "error: {}\n", e.what());
    return kExitConfig;
  } catch (const std::exception& e) {
    fmt::print(stderr, "error: {}\n", e.what());
    return 3;
  }
  return 0;
}
