#include "hcf/integrator.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>
#include <stdexcept>

#include <fmt/format.h>
#include <spdlog/spdlog.h>

namespace hcf {

namespace {

// Dormand-Prince 5(4), coefficients as in Hairer, Norsett & Wanner. The field
// is autonomous so the nodes c_i are not needed.
constexpr double a21 = 0.2;
constexpr double a31 = 3.0 / 40.0, a32 = 9.0 / 40.0;
constexpr double a41 = 44.0 / 45.0, a42 = -56.0 / 15.0, a43 = 32.0 / 9.0;
constexpr double a51 = 19372.0 / 6561.0, a52 = -25360.0 / 2187.0,
                 a53 = 64448.0 / 6561.0, a54 = -212.0 / 729.0;
constexpr double a61 = 9017.0 / 3168.0, a62 = -355.0 / 33.0, a63 = 46732.0 / 5247.0,
                 a64 = 49.0 / 176.0, a65 = -5103.0 / 18656.0;
constexpr double a71 = 35.0 / 384.0, a73 = 500.0 / 1113.0, a74 = 125.0 / 192.0,
                 a75 = -2187.0 / 6784.0, a76 = 11.0 / 84.0;
constexpr double e1 = 71.0 / 57600.0, e3 = -71.0 / 16695.0, e4 = 71.0 / 1920.0,
                 e5 = -17253.0 / 339200.0, e6 = 22.0 / 525.0, e7 = -1.0 / 40.0;
constexpr double d1 = -12715105075.0 / 11282082432.0, d3 = 87487479700.0 / 32700410799.0,
                 d4 = -10690763975.0 / 1880347072.0, d5 = 701980252875.0 / 199316789632.0,
                 d6 = -1453857185.0 / 822651844.0, d7 = 69997945.0 / 29380423.0;

// PI controller
constexpr double kBeta = 0.04;
constexpr double kExpo = 0.2 - kBeta * 0.75;
constexpr double kSafe = 0.9;
constexpr double kFacMin = 0.2;   // smallest step ratio
constexpr double kFacMax = 10.0;  // largest step ratio
constexpr double kStageRejectShrink = 0.25;

constexpr double kUround = std::numeric_limits<double>::epsilon();
constexpr double kUnderflowIndicator = 1e-6;
constexpr int kUnderflowWindow = 10;

HermitianMetric to_metric(const State& s) noexcept { return {s[0], s[1], {s[2], s[3]}}; }

State to_state(const HermitianMetric& g) noexcept {
  return {g.x, g.y, g.z.real(), g.z.imag()};
}

State to_state(const Rates& r) noexcept {
  return {r.xdot, r.ydot, r.zdot.real(), r.zdot.imag()};
}

Rates to_rates(const State& f) noexcept { return {f[0], f[1], {f[2], f[3]}}; }

double det_of(const State& s) noexcept { return s[0] * s[1] - (s[2] * s[2] + s[3] * s[3]); }

// Evaluates the field; nullopt if the state is not a usable metric.
std::optional<State> eval(const FlowField& field, const State& s) {
  const HermitianMetric g = to_metric(s);
  if (!is_positive(g) || !(g.y > 0.0)) return std::nullopt;
  try {
    const State f = to_state(field(g));
    for (double v : f)
      if (!std::isfinite(v)) return std::nullopt;
    return f;
  } catch (const DegenerateMetric&) {
    return std::nullopt;
  }
}

// y + h * sum(w_j k_j)
template <std::size_t N>
State combine(const State& y, double h, const std::array<double, N>& w,
              const std::array<const State*, N>& k) noexcept {
  State out = y;
  for (int i = 0; i < 4; ++i) {
    double acc = 0.0;
    for (std::size_t j = 0; j < N; ++j) acc += w[j] * (*k[j])[i];
    out[i] += h * acc;
  }
  return out;
}

double rms_norm(const State& v, const State& sk) noexcept {
  double s = 0.0;
  for (int i = 0; i < 4; ++i) s += (v[i] / sk[i]) * (v[i] / sk[i]);
  return std::sqrt(s / 4.0);
}

double initial_step(const FlowField& field, const State& y0, const State& f0,
                    const FlowConfig& cfg) {
  State sk{};
  for (int i = 0; i < 4; ++i) sk[i] = cfg.abs_tol + cfg.rel_tol * std::abs(y0[i]);
  const double dn0 = rms_norm(y0, sk);
  const double dn1 = rms_norm(f0, sk);
  double h0 = (dn0 <= 1e-5 || dn1 <= 1e-5) ? 1e-6 : 0.01 * dn0 / dn1;
  h0 = std::min(h0, cfg.t_max);
  State y1 = y0;
  for (int i = 0; i < 4; ++i) y1[i] += h0 * f0[i];
  const auto f1 = eval(field, y1);
  if (!f1) return h0 * 1e-3;
  State diff{};
  for (int i = 0; i < 4; ++i) diff[i] = (*f1)[i] - f0[i];
  const double dn2 = rms_norm(diff, sk) / h0;
  const double der = std::max(dn1, dn2);
  const double h1 = der <= 1e-15 ? std::max(1e-6, h0 * 1e-3) : std::pow(0.01 / der, 0.2);
  return std::min({100.0 * h0, h1, cfg.t_max});
}

// Time at which ind(state) drops through zero inside the step.
template <typename F>
double bisect_crossing(const DenseStep& step, F ind) {
  double lo = step.t0, hi = step.t0 + step.h;
  if (ind(step.state_at(lo)) <= 0.0) return lo;
  for (int it = 0; it < 200 && hi - lo > 4.0 * kUround * std::max(1.0, std::abs(hi)); ++it) {
    const double mid = 0.5 * (lo + hi);
    if (ind(step.state_at(mid)) > 0.0)
      lo = mid;
    else
      hi = mid;
  }
  return hi;
}

}  // namespace

std::string_view to_string(Engine e) noexcept {
  return e == Engine::ClosedForm ? "closed-form" : "general";
}

Engine engine_from_string(std::string_view s) {
  if (s == "closed-form") return Engine::ClosedForm;
  if (s == "general") return Engine::GeneralContraction;
  throw std::invalid_argument(fmt::format("unknown engine '{}'", s));
}

std::string_view to_string(StopReason r) noexcept {
  switch (r) {
    case StopReason::ReachedTmax: return "reached-t-max";
    case StopReason::DegeneracyThreshold: return "degeneracy-threshold";
    case StopReason::VolumeCollapse: return "volume-collapse";
    case StopReason::StepUnderflowCollapse: return "step-underflow-collapse";
    case StopReason::StepUnderflow: return "step-underflow";
    case StopReason::MaxSteps: return "max-steps";
    case StopReason::InvalidInput: return "invalid-input";
  }
  return "unknown";
}

std::string_view to_string(OutcomeClass c) noexcept {
  switch (c) {
    case OutcomeClass::ImmortalReachedTmax: return "immortal";
    case OutcomeClass::ExtinctAt: return "extinct";
    case OutcomeClass::DegenerateInput: return "degenerate-input";
    case OutcomeClass::IntegratorFailure: return "integrator-failure";
  }
  return "unknown";
}

Rates rhs(const GeometryParams& p, const HermitianMetric& g, Engine engine) {
  return FlowField(p, engine)(g);
}

FlowField::FlowField(const GeometryParams& p, Engine engine)
    : params_(p), engine_(engine), mu_(structure_constants(p)) {}

Rates FlowField::operator()(const HermitianMetric& g) const {
  const Herm2 k = engine_ == Engine::ClosedForm ? closed_form_K(params_, g)
                                                 : to_herm(hcf_tensor(mu_, g));
  return {-k.m11, -k.m22, -k.m12};
}

void validate(const FlowConfig& c) {
  auto in_unit = [](double v) { return v > 0.0 && v < 1.0; };
  if (!(c.t_max >= 0.0) || !std::isfinite(c.t_max))
    throw std::invalid_argument("t_max must be finite and >= 0");
  if (!in_unit(c.rel_tol)) throw std::invalid_argument("rel_tol must lie in (0, 1)");
  if (!in_unit(c.abs_tol)) throw std::invalid_argument("abs_tol must lie in (0, 1)");
  if (!(c.sample_stride > 0.0) || !std::isfinite(c.sample_stride))
    throw std::invalid_argument("sample_stride must be > 0");
  if (!in_unit(c.degeneracy_threshold))
    throw std::invalid_argument("degeneracy_threshold must lie in (0, 1)");
  if (!in_unit(c.collapse_threshold))
    throw std::invalid_argument("collapse_threshold must lie in (0, 1)");
  if (c.max_steps <= 0) throw std::invalid_argument("max_steps must be positive");
  validate_params(c.params);
}

double Sample::ddot() const noexcept {
  return xdot * y + x * ydot - 2.0 * (std::conj(z) * zdot).real();
}

double Sample::udot() const noexcept { return 2.0 * (std::conj(z) * zdot).real(); }

Sample make_sample(double t, const HermitianMetric& g, const Rates& r) noexcept {
  return {t, g.x, g.y, g.z, g.det(), g.u(), r.xdot, r.ydot, r.zdot};
}

State DenseStep::state_at(double t) const noexcept {
  const double th = (t - t0) / h;
  const double th1 = 1.0 - th;
  State s{};
  for (int i = 0; i < 4; ++i)
    s[i] = rcont[0][i] +
           th * (rcont[1][i] +
                 th1 * (rcont[2][i] + th * (rcont[3][i] + th1 * rcont[4][i])));
  return s;
}

State DenseStep::derivative_at(double t) const noexcept {
  const double th = (t - t0) / h;
  const double th1 = 1.0 - th;
  State s{};
  for (int i = 0; i < 4; ++i) {
    const double a = rcont[3][i] + th1 * rcont[4][i];
    const double da = -rcont[4][i];
    const double b = rcont[2][i] + th * a;
    const double db = a + th * da;
    const double c = rcont[1][i] + th1 * b;
    const double dc = -b + th1 * db;
    s[i] = (c + th * dc) / h;
  }
  return s;
}

std::optional<double> detect_extinction(const Trajectory& tr) {
  if (!tr.last_step) return std::nullopt;
  const DenseStep& step = *tr.last_step;
  double tc = 0.0;
  switch (tr.stop) {
    case StopReason::DegeneracyThreshold:
      tc = bisect_crossing(step, [&](const State& s) {
        return det_of(s) / (s[0] * s[1]) - tr.degeneracy_threshold;
      });
      break;
    case StopReason::VolumeCollapse:
      tc = bisect_crossing(step, [&](const State& s) {
        return det_of(s) / tr.d0 - tr.collapse_threshold;
      });
      break;
    case StopReason::StepUnderflowCollapse:
      tc = step.t0 + step.h;
      break;
    default:
      return std::nullopt;
  }
  const State s = step.state_at(tc);
  const State f = step.derivative_at(tc);
  const double d = det_of(s);
  const double ddot = f[0] * s[1] + s[0] * f[1] - 2.0 * (s[2] * f[2] + s[3] * f[3]);
  // D ~ (T - t)^2 on the collapsing branch
  const double remaining = (ddot < 0.0 && d > 0.0) ? 2.0 * d / -ddot : 0.0;
  return std::min(tc + remaining, tr.t_max);
}

FlowResult integrate(const FlowConfig& cfg) {
  validate(cfg);
  const FlowField field(cfg.params, cfg.engine);

  FlowResult res;
  Trajectory& tr = res.trajectory;
  FlowOutcome& out = res.outcome;
  tr.degeneracy_threshold = cfg.degeneracy_threshold;
  tr.collapse_threshold = cfg.collapse_threshold;
  tr.t_max = cfg.t_max;
  tr.d0 = cfg.g0.det();

  State y = to_state(cfg.g0);
  std::optional<State> k1;
  std::string why;
  try {
    require_positive(cfg.g0);
    k1 = eval(field, y);
    if (!k1) why = "right-hand side not finite at g0";
  } catch (const DegenerateMetric& e) {
    why = e.what();
  }
  if (!k1) {
    tr.stop = StopReason::InvalidInput;
    out.cls = OutcomeClass::DegenerateInput;
    out.reason = tr.stop;
    out.final_state = make_sample(0.0, cfg.g0, {});
    out.diagnostics = why;
    return res;
  }

  tr.samples.push_back(make_sample(0.0, cfg.g0, to_rates(*k1)));
  long next_sample = 1;

  double t = 0.0;
  double h = cfg.t_max > 0.0 ? initial_step(field, y, *k1, cfg) : 0.0;
  double facold = 1e-4;
  bool last_rejected = false;
  std::deque<double> recent_d{tr.d0};
  tr.stop = StopReason::ReachedTmax;

  while (t < cfg.t_max) {
    if (tr.accepted_steps >= cfg.max_steps) {
      tr.stop = StopReason::MaxSteps;
      break;
    }
    if (0.1 * h <= std::abs(t) * kUround || h <= std::numeric_limits<double>::min()) {
      const double dd = det_of(y);
      const double indicator = std::min(dd / (y[0] * y[1]), dd / tr.d0);
      bool falling = static_cast<int>(recent_d.size()) > kUnderflowWindow;
      for (std::size_t i = 1; falling && i < recent_d.size(); ++i)
        falling = recent_d[i] < recent_d[i - 1];
      tr.stop = (indicator < kUnderflowIndicator && falling) ? StopReason::StepUnderflowCollapse
                                                             : StopReason::StepUnderflow;
      break;
    }
    bool last = false;
    if (t + 1.01 * h >= cfg.t_max) {
      h = cfg.t_max - t;
      last = true;
    }

    const State& f1 = *k1;
    const auto k2 = eval(field, combine<1>(y, h, {a21}, {&f1}));
    std::optional<State> k3, k4, k5, k6, k7;
    State y1{};
    if (k2) k3 = eval(field, combine<2>(y, h, {a31, a32}, {&f1, &*k2}));
    if (k3) k4 = eval(field, combine<3>(y, h, {a41, a42, a43}, {&f1, &*k2, &*k3}));
    if (k4)
      k5 = eval(field, combine<4>(y, h, {a51, a52, a53, a54}, {&f1, &*k2, &*k3, &*k4}));
    if (k5)
      k6 = eval(field, combine<5>(y, h, {a61, a62, a63, a64, a65},
                                  {&f1, &*k2, &*k3, &*k4, &*k5}));
    if (k6) {
      y1 = combine<5>(y, h, {a71, a73, a74, a75, a76}, {&f1, &*k3, &*k4, &*k5, &*k6});
      k7 = eval(field, y1);
    }
    if (!k7) {
      // a stage left the cone of positive metrics
      h *= kStageRejectShrink;
      ++tr.rejected_steps;
      last_rejected = true;
      continue;
    }

    State err_v{}, sk{};
    for (int i = 0; i < 4; ++i) {
      err_v[i] = h * (e1 * f1[i] + e3 * (*k3)[i] + e4 * (*k4)[i] + e5 * (*k5)[i] +
                      e6 * (*k6)[i] + e7 * (*k7)[i]);
      sk[i] = cfg.abs_tol + cfg.rel_tol * std::max(std::abs(y[i]), std::abs(y1[i]));
    }
    const double err = rms_norm(err_v, sk);
    const double fac11 = std::pow(err, kExpo);

    if (err <= 1.0) {
      facold = std::max(err, 1e-4);
      ++tr.accepted_steps;

      DenseStep step;
      step.t0 = t;
      step.h = h;
      for (int i = 0; i < 4; ++i) {
        const double ydiff = y1[i] - y[i];
        const double bspl = h * f1[i] - ydiff;
        step.rcont[0][i] = y[i];
        step.rcont[1][i] = ydiff;
        step.rcont[2][i] = bspl;
        step.rcont[3][i] = ydiff - h * (*k7)[i] - bspl;
        step.rcont[4][i] = h * (d1 * f1[i] + d3 * (*k3)[i] + d4 * (*k4)[i] + d5 * (*k5)[i] +
                                d6 * (*k6)[i] + d7 * (*k7)[i]);
      }

      const double t_end = last ? cfg.t_max : t + h;
      for (;; ++next_sample) {
        const double ts = static_cast<double>(next_sample) * cfg.sample_stride;
        if (ts > t_end || ts > cfg.t_max) break;
        const State s = ts == t_end ? y1 : step.state_at(ts);
        const auto f = ts == t_end ? k7 : eval(field, s);
        if (f) tr.samples.push_back(make_sample(ts, to_metric(s), to_rates(*f)));
      }

      t = t_end;
      y = y1;
      k1 = k7;
      tr.last_step = step;
      recent_d.push_back(det_of(y));
      if (static_cast<int>(recent_d.size()) > kUnderflowWindow + 1) recent_d.pop_front();

      const double dd = det_of(y);
      if (dd / (y[0] * y[1]) < cfg.degeneracy_threshold) {
        tr.stop = StopReason::DegeneracyThreshold;
        break;
      }
      if (dd / tr.d0 < cfg.collapse_threshold) {
        tr.stop = StopReason::VolumeCollapse;
        break;
      }
      if (last) break;

      double fac = fac11 / std::pow(facold, kBeta);
      fac = std::clamp(fac / kSafe, 1.0 / kFacMax, 1.0 / kFacMin);
      double hnew = std::min(h / fac, cfg.t_max);
      if (last_rejected) hnew = std::min(hnew, h);
      last_rejected = false;
      h = hnew;
    } else {
      h /= std::min(1.0 / kFacMin, fac11 / kSafe);
      ++tr.rejected_steps;
      last_rejected = true;
    }
  }

  if (tr.samples.back().t < t)
    tr.samples.push_back(make_sample(t, to_metric(y), to_rates(*k1)));

  out.reason = tr.stop;
  out.final_state = tr.samples.back();
  switch (tr.stop) {
    case StopReason::ReachedTmax:
      out.cls = OutcomeClass::ImmortalReachedTmax;
      break;
    case StopReason::DegeneracyThreshold:
    case StopReason::VolumeCollapse:
    case StopReason::StepUnderflowCollapse:
      out.cls = OutcomeClass::ExtinctAt;
      out.t_est = detect_extinction(tr);
      break;
    default:
      out.cls = OutcomeClass::IntegratorFailure;
      break;
  }
  const auto& fs = out.final_state;
  out.diagnostics = fmt::format(
      "stop={} t={:.17g} D={:.6g} D/(xy)={:.6g} D/D0={:.6g} accepted={} rejected={}",
      to_string(tr.stop), fs.t, fs.D, fs.D / (fs.x * fs.y), fs.D / tr.d0, tr.accepted_steps,
      tr.rejected_steps);
  spdlog::debug("integrate {}: {}", geometry_id(cfg.params.geometry), out.diagnostics);
  return res;
}

}  // namespace hcf
