#pragma once

// dg/dt = -K(g) on the real state (x, y, Re z, Im z), Dormand-Prince 5(4)
// with PI step control, dense output and collapse detection.

#include <array>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "hcf/catalog.hpp"
#include "hcf/metric.hpp"

namespace hcf {

enum class Engine { ClosedForm, GeneralContraction };

std::string_view to_string(Engine e) noexcept;
/// "closed-form" or "general"; throws std::invalid_argument otherwise.
Engine engine_from_string(std::string_view s);

/// (xdot, ydot, zdot) = -(K_11, K_22, K_12).
struct Rates {
  double xdot = 0.0;
  double ydot = 0.0;
  cplx zdot{};
};

Rates rhs(const GeometryParams& p, const HermitianMetric& g,
          Engine engine = Engine::ClosedForm);

/// Right-hand side bound to one geometry; caches the structure constants.
class FlowField {
public:
  FlowField(const GeometryParams& p, Engine engine);
  [[nodiscard]] Rates operator()(const HermitianMetric& g) const;
  [[nodiscard]] const GeometryParams& params() const noexcept { return params_; }
  [[nodiscard]] Engine engine() const noexcept { return engine_; }

private:
  GeometryParams params_;
  Engine engine_;
  StructureConstants mu_;
};

struct FlowConfig {
  GeometryParams params;
  HermitianMetric g0;
  double t_max = 10.0;
  double rel_tol = 1e-9;
  double abs_tol = 1e-12;
  Engine engine = Engine::ClosedForm;
  double sample_stride = 0.05;
  /// stop when D / (x y) falls below this
  double degeneracy_threshold = 1e-10;
  /// stop when D / D0 falls below this (volume collapse with D/(xy) bounded)
  double collapse_threshold = 1e-14;
  long max_steps = 5'000'000;
};

/// Throws std::invalid_argument for out-of-range numeric settings. Does not
/// look at g0 (an invalid g0 is reported as DegenerateInput by integrate).
void validate(const FlowConfig& c);

struct Sample {
  double t = 0.0;
  double x = 0.0, y = 0.0;
  cplx z{};
  double D = 0.0, u = 0.0;
  double xdot = 0.0, ydot = 0.0;
  cplx zdot{};

  [[nodiscard]] HermitianMetric metric() const noexcept { return {x, y, z}; }
  /// D' = x' y + x y' - 2 Re(conj(z) z')
  [[nodiscard]] double ddot() const noexcept;
  /// u' = 2 Re(conj(z) z')
  [[nodiscard]] double udot() const noexcept;
};

Sample make_sample(double t, const HermitianMetric& g, const Rates& r) noexcept;

using State = std::array<double, 4>;

/// Dense-output polynomial of one accepted step.
struct DenseStep {
  double t0 = 0.0;
  double h = 0.0;
  std::array<State, 5> rcont{};

  [[nodiscard]] State state_at(double t) const noexcept;
  [[nodiscard]] State derivative_at(double t) const noexcept;
};

enum class StopReason {
  ReachedTmax,
  DegeneracyThreshold,
  VolumeCollapse,
  StepUnderflowCollapse,  // underflow with a collapse indicator < 1e-6, D falling
  StepUnderflow,
  MaxSteps,
  InvalidInput,
};

std::string_view to_string(StopReason r) noexcept;

struct Trajectory {
  std::vector<Sample> samples;
  StopReason stop = StopReason::ReachedTmax;
  long accepted_steps = 0;
  long rejected_steps = 0;
  double d0 = 0.0;
  double degeneracy_threshold = 1e-10;
  double collapse_threshold = 1e-14;
  double t_max = 0.0;
  std::optional<DenseStep> last_step;
};

enum class OutcomeClass { ImmortalReachedTmax, ExtinctAt, DegenerateInput, IntegratorFailure };

std::string_view to_string(OutcomeClass c) noexcept;

struct FlowOutcome {
  OutcomeClass cls = OutcomeClass::ImmortalReachedTmax;
  std::optional<double> t_est;
  Sample final_state;
  StopReason reason = StopReason::ReachedTmax;
  std::string diagnostics;
};

struct FlowResult {
  Trajectory trajectory;
  FlowOutcome outcome;
};

/// Throws std::invalid_argument if validate(config) fails.
FlowResult integrate(const FlowConfig& config);

/// Extinction time for runs stopped by a collapse criterion: the crossing
/// time of the firing indicator, found by bisection on the last step's dense
/// output, plus the remaining time 2 D / (-D') from that point, capped at
/// t_max. Nothing for any other stop reason.
std::optional<double> detect_extinction(const Trajectory& trajectory);

}  // namespace hcf
