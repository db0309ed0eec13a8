#pragma once

// The nine left-invariant model geometries: brackets, closed-form K tables,
// the reduced (x, y, u) systems and expected long-time labels.

#include <optional>
#include <random>
#include <string_view>
#include <vector>

#include "hcf/curvature.hpp"
#include "hcf/metric.hpp"

namespace hcf {

enum class ExpectedOutcome { Immortal, FiniteTimeExtinction };

enum class LimitClass {
  Point,
  Circle,
  KaehlerEinsteinCurve,
  FlatKaehlerMetric,
  FiniteTimeCollapse,
  Unclassified,
};

std::string_view to_string(ExpectedOutcome o) noexcept;
std::string_view to_string(LimitClass c) noexcept;

struct ParamSpec {
  std::string_view name;
  std::string_view kind;        // "real" or "sign"
  std::string_view constraint;  // human readable
};

struct GeometryDescriptor {
  Geometry geometry;
  std::string_view id;
  std::string_view name;
  std::vector<ParamSpec> params;
  ExpectedOutcome expected_outcome;
  LimitClass expected_gh_limit;
  bool has_appendix = true;
  /// Metrics on which the structure is Kaehler; nullptr when there are none.
  bool (*kaehler_locus)(const HermitianMetric&) = nullptr;
};

/// All nine entries in enum order.
const std::vector<GeometryDescriptor>& list_geometries();
const GeometryDescriptor& descriptor(Geometry g);

/// Circle length of the normalized limit (Inoue geometries only).
std::optional<double> expected_circle_length(const GeometryParams& p);
/// Normalized limit diag(2, 0) for properly elliptic, nothing otherwise.
std::optional<Herm2> expected_normalized_limit(const GeometryParams& p);

/// Throws InadmissibleParams for parameters the geometry does not admit.
StructureConstants structure_constants(const GeometryParams& p);

/// Closed-form HCF tensor. Throws DegenerateMetric when D is below the margin.
Herm2 closed_form_K(const GeometryParams& p, const HermitianMetric& g);

struct AppendixTables {
  Herm2 s, q1, q2, q3, q4;
};

/// Diagnostic S and Q^i tables as printed, typos included. Not available for
/// the torus (throws std::invalid_argument).
AppendixTables appendix_tables(const GeometryParams& p, const HermitianMetric& g);

/// Q^1/2 - Q^2/4 - Q^3/2 + Q^4 and S - Q from a set of tables.
Herm2 assemble_q(const AppendixTables& t) noexcept;
Herm2 assemble_k(const AppendixTables& t) noexcept;

/// Flow written in (x, y, u), with |z - zb|^2 where the Inoue S+- systems
/// need it. Independent transcription of the per-geometry reductions.
struct ReducedRates {
  double xdot = 0.0;
  double ydot = 0.0;
  double udot = 0.0;
};
ReducedRates reduced_rates(const GeometryParams& p, const HermitianMetric& g);

// Random sampling used by verify, the tests and the acceptance harness.

/// lambda ~ U[-2, 2], |a| ~ U[0.2, 2] with random sign, b ~ U[-2, 2], eps = +-1.
GeometryParams random_params(Geometry g, std::mt19937_64& rng);

/// x, y log-uniform on [lo, hi]; z = r e^{i phi} with r^2 ~ U[0, 0.95 xy].
HermitianMetric random_metric(std::mt19937_64& rng, double lo = 0.1, double hi = 10.0);

}  // namespace hcf
