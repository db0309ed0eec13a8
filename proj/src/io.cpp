#include "hcf/io.hpp"

#include <fstream>
#include <sstream>
#include <vector>

#include <fmt/format.h>

namespace hcf {

using nlohmann::json;

namespace {

void reject_unknown(const json& j, const std::vector<std::string_view>& allowed,
                    const std::string& at) {
  for (const auto& [key, _] : j.items()) {
    bool ok = false;
    for (auto a : allowed) ok = ok || key == a;
    if (!ok) throw ConfigError(at + "/" + key, "unknown field");
  }
}

const json& require_object(const json& j, const std::string& at) {
  if (!j.is_object()) throw ConfigError(at.empty() ? "/" : at, "expected an object");
  return j;
}

double get_number(const json& j, std::string_view key, const std::string& at) {
  const json& v = j.at(std::string(key));
  if (!v.is_number()) throw ConfigError(at + "/" + std::string(key), "expected a number");
  return v.get<double>();
}

double number_or(const json& j, std::string_view key, double dflt, const std::string& at) {
  return j.contains(std::string(key)) ? get_number(j, key, at) : dflt;
}

std::string get_string(const json& j, std::string_view key, const std::string& at) {
  const json& v = j.at(std::string(key));
  if (!v.is_string()) throw ConfigError(at + "/" + std::string(key), "expected a string");
  return v.get<std::string>();
}

void require_key(const json& j, std::string_view key, const std::string& at) {
  if (!j.contains(std::string(key)))
    throw ConfigError(at + "/" + std::string(key), "missing required field");
}

void check_schema_version(const json& j, const std::string& at) {
  require_key(j, "schema_version", at);
  const json& v = j.at("schema_version");
  if (!v.is_number_integer() || v.get<int>() != kSchemaVersion)
    throw ConfigError(at + "/schema_version",
                      fmt::format("unsupported schema_version (expected {})", kSchemaVersion));
}

json params_json(const GeometryParams& p) {
  json j = json::object();
  switch (p.geometry) {
    case Geometry::Hopf:
    case Geometry::ProperlyElliptic:
      j["lambda"] = p.lambda;
      break;
    case Geometry::InoueS0:
      j["a"] = p.a;
      j["b"] = p.b;
      break;
    case Geometry::KodairaSecondary:
      j["epsilon"] = p.epsilon;
      break;
    default:
      break;
  }
  return j;
}

GeometryParams params_from_json(Geometry g, const json* j, const std::string& at) {
  GeometryParams p = GeometryParams::of(g);
  std::vector<std::string_view> allowed;
  for (const ParamSpec& s : descriptor(g).params) allowed.push_back(s.name);
  if (!j) {
    if (g == Geometry::InoueS0) throw ConfigError(at + "/a", "missing required field");
    return p;
  }
  require_object(*j, at);
  reject_unknown(*j, allowed, at);
  switch (g) {
    case Geometry::Hopf:
    case Geometry::ProperlyElliptic:
      p.lambda = number_or(*j, "lambda", 0.0, at);
      break;
    case Geometry::InoueS0:
      require_key(*j, "a", at);
      p.a = get_number(*j, "a", at);
      p.b = number_or(*j, "b", 0.0, at);
      break;
    case Geometry::KodairaSecondary:
      if (j->contains("epsilon")) {
        const json& e = j->at("epsilon");
        if (!e.is_number_integer())
          throw ConfigError(at + "/epsilon", "expected the integer +1 or -1");
        p.epsilon = e.get<int>();
      }
      break;
    default:
      break;
  }
  try {
    validate_params(p);
  } catch (const InadmissibleParams& e) {
    throw ConfigError(at, e.what());
  }
  return p;
}

}  // namespace

ConfigError::ConfigError(std::string pointer, const std::string& message)
    : std::runtime_error(fmt::format("{}: {}", pointer.empty() ? "document root" : pointer, message)),
      pointer_(std::move(pointer)) {}

std::string format_double(double v) { return fmt::format("{:.17g}", v); }

json to_json(const FlowConfig& c) {
  return {
      {"schema_version", kSchemaVersion},
      {"geometry", geometry_id(c.params.geometry)},
      {"params", params_json(c.params)},
      {"g0", {{"x", c.g0.x}, {"y", c.g0.y}, {"z_re", c.g0.z.real()}, {"z_im", c.g0.z.imag()}}},
      {"t_max", c.t_max},
      {"rel_tol", c.rel_tol},
      {"abs_tol", c.abs_tol},
      {"engine", to_string(c.engine)},
      {"sample_stride", c.sample_stride},
      {"degeneracy_threshold", c.degeneracy_threshold},
      {"collapse_threshold", c.collapse_threshold},
      {"max_steps", c.max_steps},
  };
}

FlowConfig flow_config_from_json(const json& j, const std::string& at) {
  require_object(j, at);
  reject_unknown(j,
                 {"schema_version", "geometry", "params", "g0", "t_max", "rel_tol", "abs_tol",
                  "engine", "sample_stride", "degeneracy_threshold", "collapse_threshold",
                  "max_steps"},
                 at);
  check_schema_version(j, at);
  require_key(j, "geometry", at);
  FlowConfig c;
  Geometry g{};
  try {
    g = geometry_from_id(get_string(j, "geometry", at));
  } catch (const std::invalid_argument& e) {
    throw ConfigError(at + "/geometry", e.what());
  }
  c.params = params_from_json(g, j.contains("params") ? &j.at("params") : nullptr, at + "/params");

  require_key(j, "g0", at);
  const json& g0 = require_object(j.at("g0"), at + "/g0");
  reject_unknown(g0, {"x", "y", "z_re", "z_im"}, at + "/g0");
  require_key(g0, "x", at + "/g0");
  require_key(g0, "y", at + "/g0");
  c.g0.x = get_number(g0, "x", at + "/g0");
  c.g0.y = get_number(g0, "y", at + "/g0");
  c.g0.z = {number_or(g0, "z_re", 0.0, at + "/g0"), number_or(g0, "z_im", 0.0, at + "/g0")};

  c.t_max = number_or(j, "t_max", c.t_max, at);
  c.rel_tol = number_or(j, "rel_tol", c.rel_tol, at);
  c.abs_tol = number_or(j, "abs_tol", c.abs_tol, at);
  c.sample_stride = number_or(j, "sample_stride", c.sample_stride, at);
  c.degeneracy_threshold = number_or(j, "degeneracy_threshold", c.degeneracy_threshold, at);
  c.collapse_threshold = number_or(j, "collapse_threshold", c.collapse_threshold, at);
  if (j.contains("engine")) {
    try {
      c.engine = engine_from_string(get_string(j, "engine", at));
    } catch (const std::invalid_argument& e) {
      throw ConfigError(at + "/engine", e.what());
    }
  }
  if (j.contains("max_steps")) {
    const json& m = j.at("max_steps");
    if (!m.is_number_integer()) throw ConfigError(at + "/max_steps", "expected an integer");
    c.max_steps = m.get<long>();
  }
  try {
    validate(c);
  } catch (const std::invalid_argument& e) {
    throw ConfigError(at.empty() ? "/" : at, e.what());
  }
  return c;
}

json read_json_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("", fmt::format("cannot open {}", path.string()));
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw ConfigError("", fmt::format("{}: {}", path.string(), e.what()));
  }
}

std::string_view to_string(Emit e) noexcept {
  switch (e) {
    case Emit::TrajectoryCsv: return "trajectory_csv";
    case Emit::OutcomeJson: return "outcome_json";
    case Emit::AnalysisJson: return "analysis_json";
    case Emit::PlotData: return "plot_data";
  }
  return "";
}

Emit emit_from_string(std::string_view s) {
  for (Emit e : {Emit::TrajectoryCsv, Emit::OutcomeJson, Emit::AnalysisJson, Emit::PlotData})
    if (to_string(e) == s) return e;
  throw std::invalid_argument(fmt::format("unknown emit kind '{}'", s));
}

json to_json(const RunManifest& m) {
  json emit = json::array();
  for (Emit e : m.emit) emit.push_back(to_string(e));
  return {{"schema_version", kSchemaVersion},
          {"config", to_json(m.config)},
          {"output_dir", m.output_dir.string()},
          {"emit", emit}};
}

RunManifest run_manifest_from_json(const json& j) {
  require_object(j, "");
  reject_unknown(j, {"schema_version", "config", "output_dir", "emit"}, "");
  check_schema_version(j, "");
  require_key(j, "config", "");
  require_key(j, "output_dir", "");
  RunManifest m;
  m.config = flow_config_from_json(j.at("config"), "/config");
  m.output_dir = get_string(j, "output_dir", "");
  if (j.contains("emit")) {
    const json& e = j.at("emit");
    if (!e.is_array() || e.empty()) throw ConfigError("/emit", "expected a nonempty array");
    m.emit.clear();
    for (std::size_t i = 0; i < e.size(); ++i) {
      const std::string at = fmt::format("/emit/{}", i);
      if (!e[i].is_string()) throw ConfigError(at, "expected a string");
      try {
        m.emit.insert(emit_from_string(e[i].get<std::string>()));
      } catch (const std::invalid_argument& ex) {
        throw ConfigError(at, ex.what());
      }
    }
  }
  return m;
}

json to_json(const Sample& s) {
  return {{"t", s.t},   {"x", s.x}, {"y", s.y}, {"z_re", s.z.real()}, {"z_im", s.z.imag()},
          {"D", s.D},   {"u", s.u}, {"xdot", s.xdot}, {"ydot", s.ydot}};
}

json to_json(const FlowOutcome& o) {
  json j = {{"class", to_string(o.cls)},
            {"stop_reason", to_string(o.reason)},
            {"final_state", to_json(o.final_state)},
            {"diagnostics", o.diagnostics}};
  j["T_est"] = o.t_est ? json(*o.t_est) : json(nullptr);
  return j;
}

json to_json(const GeometryDescriptor& d) {
  json params = json::array();
  for (const ParamSpec& s : d.params)
    params.push_back({{"name", s.name}, {"type", s.kind}, {"constraint", s.constraint}});
  json j = {{"id", d.id},
            {"name", d.name},
            {"parameters", params},
            {"expected_outcome", to_string(d.expected_outcome)},
            {"expected_gh_limit", to_string(d.expected_gh_limit)},
            {"has_appendix_tables", d.has_appendix}};
  switch (d.geometry) {
    case Geometry::InoueS0:
      j["expected_circle_length"] = "2*sqrt(2)*|a|";
      break;
    case Geometry::InoueSpmJ1:
    case Geometry::InoueSpJ2:
      j["expected_circle_length"] = std::sqrt(3.0);
      break;
    case Geometry::ProperlyElliptic:
      j["expected_normalized_limit"] = {{"x", 2.0}, {"y", 0.0}, {"z_re", 0.0}, {"z_im", 0.0}};
      break;
    default:
      break;
  }
  return j;
}

json catalog_json() {
  json list = json::array();
  for (const GeometryDescriptor& d : list_geometries()) list.push_back(to_json(d));
  return {{"schema_version", kSchemaVersion}, {"geometries", list}};
}

void write_trajectory_csv(std::ostream& os, const Trajectory& tr) {
  os << kTrajectoryHeader << '\n';
  for (const Sample& s : tr.samples)
    os << fmt::format("{:.17g},{:.17g},{:.17g},{:.17g},{:.17g},{:.17g},{:.17g},{:.17g},{:.17g}\n",
                      s.t, s.x, s.y, s.z.real(), s.z.imag(), s.D, s.u, s.xdot, s.ydot);
}

std::string trajectory_csv(const Trajectory& tr) {
  std::ostringstream os;
  write_trajectory_csv(os, tr);
  return os.str();
}

std::string plot_data_csv(const Trajectory& tr) {
  std::string out = "t,n_x,n_y,n_z_re,n_z_im\n";
  for (const Sample& s : tr.samples) {
    const double w = 1.0 / (1.0 + s.t);
    out += fmt::format("{:.17g},{:.17g},{:.17g},{:.17g},{:.17g}\n", s.t, s.x * w, s.y * w,
                       s.z.real() * w, s.z.imag() * w);
  }
  return out;
}

void write_file_atomic(const std::filesystem::path& path, std::string_view contents) {
  std::filesystem::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error(fmt::format("cannot write {}", tmp.string()));
    out.write(contents.data(), static_cast<std::streamsize>(contents.size()));
    out.flush();
    if (!out) throw std::runtime_error(fmt::format("short write to {}", tmp.string()));
  }
  std::filesystem::rename(tmp, path);
}

}  // namespace hcf
