#include "hcf/run.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

#include <fmt/format.h>

namespace hcf {

using nlohmann::json;

namespace {

void set_axis(FlowConfig& c, const std::string& name, double v) {
  if (name == "lambda") c.params.lambda = v;
  else if (name == "a") c.params.a = v;
  else if (name == "b") c.params.b = v;
  else if (name == "epsilon") c.params.epsilon = static_cast<int>(v);
  else if (name == "x0") c.g0.x = v;
  else if (name == "y0") c.g0.y = v;
  else if (name == "z0_re") c.g0.z.real(v);
  else if (name == "z0_im") c.g0.z.imag(v);
  else if (name == "t_max") c.t_max = v;
  else if (name == "rel_tol") c.rel_tol = v;
  else if (name == "abs_tol") c.abs_tol = v;
  else throw std::invalid_argument(fmt::format("unknown grid axis '{}'", name));
}

json fit_json(const std::optional<LinearFit>& f) {
  if (!f) return nullptr;
  return {{"slope", f->slope},   {"intercept", f->intercept}, {"residual", f->residual},
          {"t_from", f->t_from}, {"t_to", f->t_to},           {"samples", f->n}};
}

json check_json(const InvariantCheck& c) {
  return {{"name", c.name}, {"pass", c.pass}, {"worst", c.worst}, {"t_worst", c.t_worst}};
}

json metric_json(const HermitianMetric& g) {
  return {{"x", g.x}, {"y", g.y}, {"z_re", g.z.real()}, {"z_im", g.z.imag()}};
}

json limit_json(const RunReport& r) {
  json j = {{"class", to_string(classification(r))}};
  if (!r.limit) {
    j["note"] = r.limit_note;
    return j;
  }
  const LimitDescriptor& d = *r.limit;
  if (d.circle_length) {
    j["circle_length"] = *d.circle_length;
    // same circle written as S^1 of radius length / (2 pi)
    j["circle_radius"] = *d.circle_length / (2.0 * std::numbers::pi);
  }
  if (d.normalized_limit)
    j["normalized_limit"] = {{"x", d.normalized_limit->m11}, {"y", d.normalized_limit->m22}};
  if (d.flat_limit) j["flat_limit"] = metric_json(*d.flat_limit);
  if (d.collapse_time) j["collapse_time"] = *d.collapse_time;
  j["evidence"] = {{"n_x", d.n_x},
                   {"n_y", d.n_y},
                   {"n_z_abs", d.n_z},
                   {"theta", d.theta},
                   {"window", {d.window_from, d.window_to}},
                   {"window_samples", d.window_samples}};
  j["matches_expected"] = matches_expected(r.config.params, d);
  return j;
}

json reference_json(const FlowConfig& c) {
  const GeometryParams& p = c.params;
  const GeometryDescriptor& d = descriptor(p.geometry);
  json j = {{"expected_outcome", to_string(d.expected_outcome)},
            {"expected_gh_limit", to_string(d.expected_gh_limit)}};
  if (auto len = expected_circle_length(p)) j["circle_length"] = *len;
  if (auto lim = expected_normalized_limit(p)) j["normalized_limit"] = {{"x", lim->m11}, {"y", 0.0}};
  switch (p.geometry) {
    case Geometry::ProperlyElliptic: j["slope_x"] = 2.0; break;
    case Geometry::InoueS0: j["slope_y"] = 8.0 * p.a * p.a; break;
    case Geometry::InoueSpmJ1:
    case Geometry::InoueSpJ2: j["slope_x"] = 3.0; break;
    case Geometry::Hyperelliptic: j["u_decay_exponent_bound"] = -2.0 / c.g0.y; break;
    case Geometry::Hopf: {
      const double cc = p.c();
      const bool on_ray = c.g0.z == cplx{} && std::abs(c.g0.y - 1.5 * cc * c.g0.x) <=
                                                  1e-12 * c.g0.y;
      if (on_ray) j["extinction_time"] = 2.25 * cc * c.g0.x;
      break;
    }
    default: break;
  }
  return j;
}

std::string opt_num(const std::optional<double>& v) { return v ? format_double(*v) : ""; }

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char ch : s) {
    if (ch == '"') out += '"';
    out += ch;
  }
  return out + "\"";
}

}  // namespace

RunReport execute(const FlowConfig& config) { return analyse(config, integrate(config)); }

RunReport analyse(const FlowConfig& config, FlowResult result) {
  RunReport r;
  r.config = config;
  r.result = std::move(result);
  const Trajectory& tr = r.result.trajectory;
  const FlowOutcome& out = r.result.outcome;
  if (out.cls == OutcomeClass::DegenerateInput) {
    r.limit_note = out.diagnostics;
    return r;
  }
  if (out.cls == OutcomeClass::ImmortalReachedTmax && tr.samples.back().t >= 100.0) {
    r.slope_x = linear_growth_rate(tr, Component::X);
    r.slope_y = linear_growth_rate(tr, Component::Y);
  }
  if (out.cls != OutcomeClass::IntegratorFailure) {
    try {
      r.limit = classify_gh_limit(config.params, tr, out);
    } catch (const InsufficientData& e) {
      r.limit_note = e.what();
    }
  } else {
    r.limit_note = out.diagnostics;
  }
  r.invariants = monotonicity_checks(config.params, tr, config.rel_tol);
  r.invariants.push_back(udot_consistency(config.params, tr, 10.0 * config.rel_tol));
  if (config.g0.z == cplx{}) r.invariants.push_back(diagonal_invariance(tr, config.abs_tol));
  if (config.params.geometry == Geometry::Hyperelliptic)
    r.decay = verify_decay_bound(tr, config.abs_tol);
  return r;
}

LimitClass classification(const RunReport& r) noexcept {
  return r.limit ? r.limit->cls : LimitClass::Unclassified;
}

int exit_code(const RunReport& r) noexcept {
  switch (r.result.outcome.cls) {
    case OutcomeClass::DegenerateInput: return 1;
    case OutcomeClass::IntegratorFailure: return 3;
    default: break;
  }
  return classification(r) == LimitClass::Unclassified ? 2 : 0;
}

json analysis_json(const RunReport& r) {
  json inv = json::array();
  bool all_pass = true;
  for (const InvariantCheck& c : r.invariants) {
    inv.push_back(check_json(c));
    all_pass = all_pass && c.pass;
  }
  json j = {{"schema_version", kSchemaVersion},
            {"geometry", geometry_id(r.config.params.geometry)},
            {"outcome", to_string(r.result.outcome.cls)},
            {"slopes", {{"x", fit_json(r.slope_x)}, {"y", fit_json(r.slope_y)}}},
            {"classification", limit_json(r)},
            {"reference", reference_json(r.config)},
            {"invariants", inv},
            {"invariants_pass", all_pass},
            {"steps", {{"accepted", r.result.trajectory.accepted_steps},
                       {"rejected", r.result.trajectory.rejected_steps}}}};
  j["T_est"] = r.result.outcome.t_est ? json(*r.result.outcome.t_est) : json(nullptr);
  if (r.decay) {
    const DecayReport& d = *r.decay;
    j["decay_bound"] = {{"pass", d.pass},
                        {"worst_ratio", d.worst_ratio},
                        {"t_worst", d.t_worst},
                        {"samples", d.checked},
                        {"below_resolution", d.below_resolution},
                        {"reference_exponent", d.reference_exponent},
                        {"tail_exponent", d.tail_exponent ? json(*d.tail_exponent) : json(nullptr)},
                        {"limit", metric_json(d.limit)},
                        {"limit_diagonal", d.limit_diagonal},
                        {"violation", d.violation}};
  }
  return j;
}

void write_run_outputs(const RunReport& r, const std::filesystem::path& dir,
                       const std::set<Emit>& emit) {
  std::filesystem::create_directories(dir);
  for (Emit e : emit) {
    switch (e) {
      case Emit::TrajectoryCsv:
        write_file_atomic(dir / "trajectory.csv", trajectory_csv(r.result.trajectory));
        break;
      case Emit::OutcomeJson: {
        json j = to_json(r.result.outcome);
        j["schema_version"] = kSchemaVersion;
        j["config"] = to_json(r.config);
        write_file_atomic(dir / "outcome.json", j.dump(2) + "\n");
        break;
      }
      case Emit::AnalysisJson:
        write_file_atomic(dir / "analysis.json", analysis_json(r).dump(2) + "\n");
        break;
      case Emit::PlotData:
        write_file_atomic(dir / "plot_data.csv", plot_data_csv(r.result.trajectory));
        break;
    }
  }
}

GridAxis parse_axis(const std::string& spec) {
  const auto eq = spec.find('=');
  if (eq == std::string::npos || eq == 0)
    throw std::invalid_argument(fmt::format("grid axis '{}' is not name=v1,v2,...", spec));
  GridAxis axis{spec.substr(0, eq), {}};
  FlowConfig probe;
  set_axis(probe, axis.name, 0.0);  // rejects unknown names
  std::stringstream ss(spec.substr(eq + 1));
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (item.empty()) continue;
    std::size_t used = 0;
    double v = 0.0;
    try {
      v = std::stod(item, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used != item.size())
      throw std::invalid_argument(fmt::format("grid value '{}' is not a number", item));
    axis.values.push_back(v);
  }
  return axis;
}

std::vector<GridAxis> grid_from_json(const json& j) {
  if (!j.is_object()) throw ConfigError("/", "grid must be an object of arrays");
  std::vector<GridAxis> axes;
  for (const auto& [key, val] : j.items()) {
    if (!val.is_array()) throw ConfigError("/" + key, "expected an array of numbers");
    GridAxis a{key, {}};
    FlowConfig probe;
    try {
      set_axis(probe, key, 0.0);
    } catch (const std::invalid_argument& e) {
      throw ConfigError("/" + key, e.what());
    }
    for (std::size_t i = 0; i < val.size(); ++i) {
      if (!val[i].is_number())
        throw ConfigError(fmt::format("/{}/{}", key, i), "expected a number");
      a.values.push_back(val[i].get<double>());
    }
    axes.push_back(std::move(a));
  }
  return axes;
}

std::vector<FlowConfig> expand_grid(const FlowConfig& base, const std::vector<GridAxis>& axes) {
  std::vector<FlowConfig> out{base};
  for (const GridAxis& axis : axes) {
    std::vector<FlowConfig> next;
    for (const FlowConfig& c : out)
      for (double v : axis.values) {
        FlowConfig d = c;
        set_axis(d, axis.name, v);
        next.push_back(d);
      }
    out = std::move(next);
  }
  return out;
}

std::vector<FlowConfig> expand_zip(const FlowConfig& base, const std::vector<GridAxis>& axes) {
  if (axes.empty()) return {base};
  const std::size_t n = axes.front().values.size();
  for (const GridAxis& a : axes)
    if (a.values.size() != n)
      throw std::invalid_argument(
          fmt::format("zipped axis '{}' has {} values, expected {}", a.name, a.values.size(), n));
  std::vector<FlowConfig> out(n, base);
  for (std::size_t i = 0; i < n; ++i)
    for (const GridAxis& a : axes) set_axis(out[i], a.name, a.values[i]);
  return out;
}

std::vector<SweepRow> run_sweep(const std::vector<FlowConfig>& configs,
                                const std::filesystem::path& out_dir,
                                const std::set<Emit>& emit, int jobs) {
  std::filesystem::create_directories(out_dir);
  std::vector<SweepRow> rows(configs.size());
  const auto n = static_cast<long>(configs.size());
#pragma omp parallel for schedule(dynamic, 1) num_threads(std::max(1, jobs))
  for (long i = 0; i < n; ++i) {
    SweepRow& row = rows[i];
    row.index = static_cast<std::size_t>(i);
    row.config = configs[i];
    try {
      row.report = execute(configs[i]);
      if (!emit.empty())
        write_run_outputs(*row.report, out_dir / fmt::format("run_{:04d}", i), emit);
      row.completed = true;
    } catch (const std::exception& e) {
      row.error = e.what();
    }
  }
  write_file_atomic(out_dir / "summary.csv", sweep_summary_csv(rows));
  return rows;
}

std::string sweep_summary_csv(const std::vector<SweepRow>& rows) {
  std::string out =
      "run,geometry,lambda,a,b,epsilon,x0,y0,z0_re,z0_im,t_max,outcome,T_est,slope_x,slope_y,"
      "classification,circle_length,status,error\n";
  for (const SweepRow& r : rows) {
    const FlowConfig& c = r.config;
    const GeometryParams& p = c.params;
    const bool has_lambda = p.geometry == Geometry::Hopf || p.geometry == Geometry::ProperlyElliptic;
    const bool has_ab = p.geometry == Geometry::InoueS0;
    const bool has_eps = p.geometry == Geometry::KodairaSecondary;
    std::string outcome, t_est, sx, sy, cls, len;
    if (r.report) {
      const RunReport& rep = *r.report;
      outcome = to_string(rep.result.outcome.cls);
      t_est = opt_num(rep.result.outcome.t_est);
      if (rep.slope_x) sx = format_double(rep.slope_x->slope);
      if (rep.slope_y) sy = format_double(rep.slope_y->slope);
      cls = to_string(classification(rep));
      if (rep.limit) len = opt_num(rep.limit->circle_length);
    }
    out += fmt::format(
        "{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{}\n", r.index,
        geometry_id(p.geometry), has_lambda ? format_double(p.lambda) : "",
        has_ab ? format_double(p.a) : "", has_ab ? format_double(p.b) : "",
        has_eps ? std::to_string(p.epsilon) : "", format_double(c.g0.x), format_double(c.g0.y),
        format_double(c.g0.z.real()), format_double(c.g0.z.imag()), format_double(c.t_max),
        outcome, t_est, sx, sy, cls, len, r.completed ? "ok" : "failed", csv_field(r.error));
  }
  return out;
}

}  // namespace hcf
