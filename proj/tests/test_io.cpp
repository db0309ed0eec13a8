#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "hcf/io.hpp"

using namespace hcf;
using nlohmann::json;
namespace fs = std::filesystem;

namespace {

json base_config() {
  return json::parse(R"({"schema_version": 1, "geometry": "hopf", "params": {"lambda": 0.5},
                         "g0": {"x": 1, "y": 1.5}})");
}

std::string pointer_of(const json& j) {
  try {
    flow_config_from_json(j);
  } catch (const ConfigError& e) {
    return e.pointer();
  }
  return "<accepted>";
}

fs::path scratch_dir(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("hcf_test_io_" + name);
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

TEST_CASE("17 significant digits") {
  CHECK(format_double(0.1) == "0.10000000000000001");
  CHECK(format_double(2.25) == "2.25");
  CHECK(std::stod(format_double(1.0 / 3.0)) == 1.0 / 3.0);
}

TEST_CASE("config round trip") {
  const FlowConfig c = flow_config_from_json(base_config());
  CHECK(c.params.geometry == Geometry::Hopf);
  CHECK(c.params.lambda == 0.5);
  CHECK(c.g0 == HermitianMetric{1.0, 1.5, {}});
  CHECK(c.t_max == 10.0);
  CHECK(c.rel_tol == 1e-9);
  for (const auto& d : list_geometries()) {
    FlowConfig x;
    x.params.geometry = d.geometry;
    if (d.geometry == Geometry::InoueS0) x.params.a = -0.7, x.params.b = 0.25;
    if (d.geometry == Geometry::KodairaSecondary) x.params.epsilon = -1;
    if (d.geometry == Geometry::Hopf) x.params.lambda = 1.25;
    x.g0 = {2.0, 3.0, {0.1, -0.3}};
    x.t_max = 123.5;
    x.engine = Engine::GeneralContraction;
    x.max_steps = 1234;
    const FlowConfig y = flow_config_from_json(to_json(x));
    CHECK(to_json(y) == to_json(x));
    CHECK(y.params.a == x.params.a);
    CHECK(y.params.epsilon == x.params.epsilon);
  }
}

TEST_CASE("fail-closed parsing points at the offending field") {
  json j = base_config();
  j["colour"] = "red";
  CHECK(pointer_of(j) == "/colour");

  j = base_config();
  j["params"]["a"] = 1.0;  // not a Hopf parameter
  CHECK(pointer_of(j) == "/params/a");

  j = base_config();
  j.erase("schema_version");
  CHECK(pointer_of(j) == "/schema_version");

  j = base_config();
  j["schema_version"] = 2;
  CHECK(pointer_of(j) == "/schema_version");

  j = base_config();
  j["g0"]["x"] = "1";
  CHECK(pointer_of(j) == "/g0/x");

  j = base_config();
  j["g0"].erase("y");
  CHECK(pointer_of(j) == "/g0/y");

  j = base_config();
  j["g0"]["w"] = 0;
  CHECK(pointer_of(j) == "/g0/w");

  j = base_config();
  j["geometry"] = "sphere";
  CHECK(pointer_of(j) == "/geometry");

  j = base_config();
  j["engine"] = "rk4";
  CHECK(pointer_of(j) == "/engine");

  j = base_config();
  j["max_steps"] = 10.5;
  CHECK(pointer_of(j) == "/max_steps");

  j = base_config();
  j["rel_tol"] = 2.0;
  CHECK(pointer_of(j) == "/");

  j = json::parse(R"({"schema_version": 1, "geometry": "inoue-s0", "g0": {"x": 1, "y": 1}})");
  CHECK(pointer_of(j) == "/params/a");
  j["params"] = {{"a", 0.0}};
  CHECK(pointer_of(j) == "/params");

  j = json::parse(R"({"schema_version": 1, "geometry": "kodaira-secondary",
                      "params": {"epsilon": 0.5}, "g0": {"x": 1, "y": 1}})");
  CHECK(pointer_of(j) == "/params/epsilon");

  CHECK(pointer_of(json::array()) == "/");
}

TEST_CASE("unparseable file") {
  const fs::path dir = scratch_dir("parse");
  std::ofstream(dir / "bad.json") << "{\"schema_version\": 1,";
  CHECK_THROWS_AS(read_json_file(dir / "bad.json"), ConfigError);
  CHECK_THROWS_AS(read_json_file(dir / "missing.json"), ConfigError);
}

TEST_CASE("run manifest") {
  RunManifest m;
  m.config = flow_config_from_json(base_config());
  m.output_dir = "out/run";
  m.emit = {Emit::PlotData, Emit::OutcomeJson};
  const RunManifest n = run_manifest_from_json(to_json(m));
  CHECK(n.output_dir == m.output_dir);
  CHECK(n.emit == m.emit);
  CHECK(to_json(n.config) == to_json(m.config));

  json j = to_json(m);
  j["emit"] = json::array();
  CHECK_THROWS_WITH_AS(run_manifest_from_json(j), doctest::Contains("/emit"), ConfigError);
  j["emit"] = {"trajectory_csv", "movie"};
  try {
    run_manifest_from_json(j);
    FAIL("accepted an unknown emit kind");
  } catch (const ConfigError& e) {
    CHECK(e.pointer() == "/emit/1");
  }
  j = to_json(m);
  j["config"]["g0"]["x"] = nullptr;
  try {
    run_manifest_from_json(j);
    FAIL("accepted a null coordinate");
  } catch (const ConfigError& e) {
    CHECK(e.pointer() == "/config/g0/x");
  }
  j = to_json(m);
  j.erase("output_dir");
  CHECK_THROWS_AS(run_manifest_from_json(j), ConfigError);
  CHECK_THROWS_AS(emit_from_string("movie"), std::invalid_argument);
}

TEST_CASE("trajectory CSV") {
  Trajectory tr;
  tr.samples.push_back(make_sample(0.0, {1.0, 1.5, {0.1, 0.0}}, {-0.5, -0.25, {}}));
  tr.samples.push_back(make_sample(0.05, {0.1, 2.0 / 3.0, {0.0, -0.2}}, {}));
  const std::string csv = trajectory_csv(tr);
  std::istringstream in(csv);
  std::string line;
  std::getline(in, line);
  CHECK(line == "t,x,y,z_re,z_im,D,u,xdot,ydot");
  std::getline(in, line);
  CHECK(line == "0,1,1.5,0.10000000000000001,0,1.49,0.010000000000000002,-0.5,-0.25");
  std::getline(in, line);
  CHECK(line.rfind("0.050000000000000003,0.10000000000000001,0.66666666666666663,0,-0.2", 0) == 0);
  CHECK_FALSE(std::getline(in, line));

  const std::string plot = plot_data_csv(tr);
  CHECK(plot.rfind("t,n_x,n_y,n_z_re,n_z_im\n0,1,1.5,0.10000000000000001,0\n", 0) == 0);
}

TEST_CASE("outcome and catalog JSON") {
  FlowOutcome o;
  o.cls = OutcomeClass::ImmortalReachedTmax;
  json j = to_json(o);
  CHECK(j["class"] == "immortal");
  CHECK(j["T_est"].is_null());
  o.cls = OutcomeClass::ExtinctAt;
  o.t_est = 2.25;
  j = to_json(o);
  CHECK(j["class"] == "extinct");
  CHECK(j["T_est"] == 2.25);

  const json cat = catalog_json();
  CHECK(cat["schema_version"] == kSchemaVersion);
  REQUIRE(cat["geometries"].size() == 9);
  CHECK(cat["geometries"][2]["id"] == "hopf");
  CHECK(cat["geometries"][2]["expected_outcome"] == "extinction");
}

TEST_CASE("atomic writes") {
  const fs::path dir = scratch_dir("atomic");
  write_file_atomic(dir / "a.txt", "first");
  write_file_atomic(dir / "a.txt", "second");
  CHECK(slurp(dir / "a.txt") == "second");
  std::size_t n = 0;
  for ([[maybe_unused]] const auto& e : fs::directory_iterator(dir)) ++n;
  CHECK(n == 1);
  CHECK_THROWS(write_file_atomic(dir / "no" / "such" / "dir.txt", "x"));
}
