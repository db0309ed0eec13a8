#pragma once

// JSON and CSV formats. FlowConfig JSON is versioned and parsed fail-closed:
// unknown fields, parameters the geometry does not use, and wrong types are
// all rejected with a JSON pointer to the offending field.

#include <filesystem>
#include <iosfwd>
#include <set>
#include <stdexcept>
#include <string>
#include <string_view>

#include <json.hpp>

#include "hcf/catalog.hpp"
#include "hcf/integrator.hpp"

namespace hcf {

inline constexpr int kSchemaVersion = 1;

class ConfigError : public std::runtime_error {
public:
  ConfigError(std::string pointer, const std::string& message);
  [[nodiscard]] const std::string& pointer() const noexcept { return pointer_; }

private:
  std::string pointer_;
};

/// 17 significant digits, "%.17g".
std::string format_double(double v);

nlohmann::json to_json(const FlowConfig& c);
/// `at` is the JSON pointer prefix used in error messages.
FlowConfig flow_config_from_json(const nlohmann::json& j, const std::string& at = "");
/// Reads and parses a file; syntax errors are reported as ConfigError too.
nlohmann::json read_json_file(const std::filesystem::path& path);

enum class Emit { TrajectoryCsv, OutcomeJson, AnalysisJson, PlotData };
std::string_view to_string(Emit e) noexcept;
Emit emit_from_string(std::string_view s);

struct RunManifest {
  FlowConfig config;
  std::filesystem::path output_dir;
  std::set<Emit> emit{Emit::TrajectoryCsv, Emit::OutcomeJson, Emit::AnalysisJson};
};

nlohmann::json to_json(const RunManifest& m);
RunManifest run_manifest_from_json(const nlohmann::json& j);

nlohmann::json to_json(const Sample& s);
nlohmann::json to_json(const FlowOutcome& o);
nlohmann::json to_json(const GeometryDescriptor& d);
/// {"schema_version", "geometries": [...]}
nlohmann::json catalog_json();

inline constexpr std::string_view kTrajectoryHeader = "t,x,y,z_re,z_im,D,u,xdot,ydot";

void write_trajectory_csv(std::ostream& os, const Trajectory& tr);
std::string trajectory_csv(const Trajectory& tr);
/// t,n_x,n_y,n_z_re,n_z_im with n = g / (1 + t).
std::string plot_data_csv(const Trajectory& tr);

/// Writes to a sibling temporary file and renames it over `path`.
void write_file_atomic(const std::filesystem::path& path, std::string_view contents);

}  // namespace hcf
