#pragma once

// Post-processing of flow trajectories: normalized metrics, growth rates,
// the hyperelliptic decay bound, monotonicity invariants and the GH-limit
// decision rule.

#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "hcf/catalog.hpp"
#include "hcf/integrator.hpp"

namespace hcf {

/// Raised when a trajectory is too short for the requested analysis.
class InsufficientData : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// (x, y, z) / (1 + t). The result need not be positive.
HermitianMetric normalized_metric(const HermitianMetric& g, double t) noexcept;

enum class Component { X, Y };

struct LinearFit {
  double slope = 0.0;
  double intercept = 0.0;
  double residual = 0.0;  // max |v - fit| / |v| over the window
  double t_from = 0.0, t_to = 0.0;
  std::size_t n = 0;
};

/// Ordinary least squares of the raw component over the final half of the
/// samples. Throws InsufficientData unless the run reaches t = 100.
LinearFit linear_growth_rate(const Trajectory& tr, Component c);

struct DecayReport {
  bool pass = true;
  double worst_ratio = 0.0;  // max u / (u0 e^{-2t/y0})
  double t_worst = 0.0;
  std::size_t checked = 0;
  std::size_t below_resolution = 0;  // samples with |z| under 10 abs_tol
  double reference_exponent = 0.0;   // -2 / y0
  std::optional<double> tail_exponent;  // log-linear fit of u on the last half
  HermitianMetric limit;                // final metric with z set to 0
  bool limit_diagonal = false;          // |z_final| tiny relative to sqrt(xy)
  std::string violation;
};

/// u(t) <= u0 e^{-2t/y0} (1 + 1e-6) at every sample. abs_tol is that of the
/// run and is used only to count samples whose z is below resolution.
DecayReport verify_decay_bound(const Trajectory& tr, double abs_tol);

struct LimitDescriptor {
  LimitClass cls = LimitClass::Unclassified;
  std::optional<double> circle_length;
  std::optional<Herm2> normalized_limit;  // KE curve: diag(L, 0)
  std::optional<HermitianMetric> flat_limit;  // hyperelliptic un-normalized limit
  std::optional<double> collapse_time;
  // evidence
  double n_x = 0.0, n_y = 0.0, n_z = 0.0;  // tail averages, n_z = |z| / (1 + t)
  double window_from = 0.0, window_to = 0.0;
  std::size_t window_samples = 0;
  double theta = 0.05;
};

struct ClassifierOptions {
  double theta = 0.05;
  double window = 0.1;        // final fraction of [0, t_end]
  double min_t_max = 500.0;
  double flat_tolerance = 1e-6;  // relative drift of x, y over the tail
};

/// Decision rule on the tail-averaged normalized components. Throws
/// InsufficientData unless the run is extinct or immortal with t >= min_t_max.
LimitDescriptor classify_gh_limit(const GeometryParams& p, const Trajectory& tr,
                                  const FlowOutcome& outcome,
                                  const ClassifierOptions& opt = {});

/// True when the label agrees with the expected one for the geometry,
/// including the circle length / KE limit within rel_tol.
bool matches_expected(const GeometryParams& p, const LimitDescriptor& d,
                      double rel_tol = 0.02);

struct InvariantCheck {
  std::string name;
  bool pass = true;
  double worst = 0.0;  // largest violation margin seen (<= 0 when passing)
  double t_worst = 0.0;
};

/// Per-geometry sign conditions and explicit bounds, each with slack
/// 10 rel_tol (relative to the magnitude of the terms involved).
std::vector<InvariantCheck> monotonicity_checks(const GeometryParams& p,
                                                const Trajectory& tr, double rel_tol);

/// |z(t)| <= 10 abs_tol at every sample; meaningful when z0 = 0.
InvariantCheck diagonal_invariance(const Trajectory& tr, double abs_tol);

/// Compares 2 Re(conj z zdot) from the integrated field against the reduced
/// (x, y, u) expression for udot at every sample. Here `worst` is the largest
/// relative error and `pass` means worst <= tolerance.
InvariantCheck udot_consistency(const GeometryParams& p, const Trajectory& tr,
                                double tolerance);

}  // namespace hcf
