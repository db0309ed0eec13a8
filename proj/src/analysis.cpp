#include "hcf/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <numeric>

#include <fmt/format.h>

namespace hcf {

namespace {

struct Ols {
  double slope = 0.0, intercept = 0.0;
};

Ols ols(const std::vector<double>& t, const std::vector<double>& v) {
  const double n = static_cast<double>(t.size());
  const double tm = std::accumulate(t.begin(), t.end(), 0.0) / n;
  const double vm = std::accumulate(v.begin(), v.end(), 0.0) / n;
  double stt = 0.0, stv = 0.0;
  for (std::size_t i = 0; i < t.size(); ++i) {
    stt += (t[i] - tm) * (t[i] - tm);
    stv += (t[i] - tm) * (v[i] - vm);
  }
  const double slope = stt > 0.0 ? stv / stt : 0.0;
  return {slope, vm - slope * tm};
}

// Accumulates "value <= bound" checks with a relative slack.
class Checker {
public:
  Checker(std::string name, double slack) : slack_(slack) { c_.name = std::move(name); }

  void le(double value, double bound, double scale, double t) {
    const double margin = value - bound - slack_ * std::abs(scale);
    if (margin > c_.worst || c_.t_worst < 0.0) {
      c_.worst = margin;
      c_.t_worst = t;
    }
    if (margin > 0.0) c_.pass = false;
  }

  InvariantCheck done() {
    if (c_.t_worst < 0.0) c_.t_worst = 0.0;
    return c_;
  }

private:
  double slack_;
  InvariantCheck c_{"", true, -INFINITY, -1.0};
};

}  // namespace

HermitianMetric normalized_metric(const HermitianMetric& g, double t) noexcept {
  const double s = 1.0 / (1.0 + t);
  return {g.x * s, g.y * s, g.z * s};
}

LinearFit linear_growth_rate(const Trajectory& tr, Component c) {
  if (tr.samples.size() < 4 || tr.samples.back().t < 100.0)
    throw InsufficientData("growth rate needs a trajectory reaching t = 100");
  const std::size_t from = tr.samples.size() / 2;
  std::vector<double> t, v;
  for (std::size_t i = from; i < tr.samples.size(); ++i) {
    t.push_back(tr.samples[i].t);
    v.push_back(c == Component::X ? tr.samples[i].x : tr.samples[i].y);
  }
  const Ols fit = ols(t, v);
  LinearFit out{fit.slope, fit.intercept, 0.0, t.front(), t.back(), t.size()};
  for (std::size_t i = 0; i < t.size(); ++i) {
    const double model = fit.intercept + fit.slope * t[i];
    if (v[i] != 0.0) out.residual = std::max(out.residual, std::abs(v[i] - model) / std::abs(v[i]));
  }
  return out;
}

DecayReport verify_decay_bound(const Trajectory& tr, double abs_tol) {
  if (tr.samples.empty()) throw InsufficientData("empty trajectory");
  DecayReport rep;
  const Sample& s0 = tr.samples.front();
  const double u0 = s0.u, y0 = s0.y;
  rep.reference_exponent = -2.0 / y0;
  const double log_slack = std::log1p(1e-6);
  for (const Sample& s : tr.samples) {
    ++rep.checked;
    if (std::sqrt(s.u) < 10.0 * abs_tol && s.u > 0.0) ++rep.below_resolution;
    double excess = -INFINITY;  // log(u / bound)
    if (s.u > 0.0) excess = u0 > 0.0 ? std::log(s.u / u0) + 2.0 * s.t / y0 : INFINITY;
    const double ratio = std::exp(excess);
    if (ratio > rep.worst_ratio) {
      rep.worst_ratio = ratio;
      rep.t_worst = s.t;
    }
    if (excess > log_slack && rep.pass) {
      rep.pass = false;
      rep.violation = fmt::format("u({:.6g}) = {:.6g} exceeds u0 e^(-2t/y0) = {:.6g}", s.t,
                                  s.u, u0 * std::exp(-2.0 * s.t / y0));
    }
  }
  std::vector<double> t, lu;
  for (std::size_t i = tr.samples.size() / 2; i < tr.samples.size(); ++i)
    if (tr.samples[i].u > 0.0) {
      t.push_back(tr.samples[i].t);
      lu.push_back(std::log(tr.samples[i].u));
    }
  if (t.size() >= 3) rep.tail_exponent = ols(t, lu).slope;
  const Sample& f = tr.samples.back();
  rep.limit = {f.x, f.y, {}};
  rep.limit_diagonal = std::abs(f.z) <= 1e-6 * std::sqrt(f.x * f.y);
  return rep;
}

LimitDescriptor classify_gh_limit(const GeometryParams& p, const Trajectory& tr,
                                  const FlowOutcome& outcome, const ClassifierOptions& opt) {
  LimitDescriptor d;
  d.theta = opt.theta;
  if (tr.samples.empty()) throw InsufficientData("empty trajectory");
  const Sample& last = tr.samples.back();

  if (outcome.cls == OutcomeClass::ExtinctAt) {
    d.cls = LimitClass::FiniteTimeCollapse;
    d.collapse_time = outcome.t_est;
    d.window_from = d.window_to = last.t;
    return d;
  }
  if (outcome.cls != OutcomeClass::ImmortalReachedTmax || last.t < opt.min_t_max)
    throw InsufficientData(fmt::format(
        "classification needs an extinct run or an immortal run to t >= {} (got {} at t = {})",
        opt.min_t_max, to_string(outcome.cls), last.t));

  const double t_from = last.t * (1.0 - opt.window);
  double sx = 0.0, sy = 0.0, sz = 0.0;
  std::size_t n = 0;
  double xmin = INFINITY, xmax = -INFINITY, ymin = INFINITY, ymax = -INFINITY;
  for (const Sample& s : tr.samples) {
    if (s.t < t_from) continue;
    const double w = 1.0 / (1.0 + s.t);
    sx += s.x * w;
    sy += s.y * w;
    sz += std::abs(s.z) * w;
    ++n;
    xmin = std::min(xmin, s.x), xmax = std::max(xmax, s.x);
    ymin = std::min(ymin, s.y), ymax = std::max(ymax, s.y);
  }
  if (n == 0) throw InsufficientData("no samples in the tail window");
  d.n_x = sx / n, d.n_y = sy / n, d.n_z = sz / n;
  d.window_from = t_from, d.window_to = last.t, d.window_samples = n;

  const double th = opt.theta;
  const bool is_inoue = p.geometry == Geometry::InoueS0 || p.geometry == Geometry::InoueSpmJ1 ||
                        p.geometry == Geometry::InoueSpJ2;

  if (p.geometry == Geometry::Hyperelliptic &&
      (xmax - xmin) <= opt.flat_tolerance * xmax && (ymax - ymin) <= opt.flat_tolerance * ymax &&
      std::abs(last.z) <= opt.flat_tolerance * std::sqrt(last.x * last.y))
    d.flat_limit = HermitianMetric{last.x, last.y, {}};

  if (d.n_x < th && d.n_y < th && d.n_z < th) {
    d.cls = LimitClass::Point;
  } else if (is_inoue && d.n_z < th && ((d.n_x > th) != (d.n_y > th))) {
    d.cls = LimitClass::Circle;
    d.circle_length = std::sqrt(std::max(d.n_x, d.n_y));
  } else if (p.geometry == Geometry::ProperlyElliptic && d.n_x > th && d.n_y < th &&
             d.n_z < th) {
    d.cls = LimitClass::KaehlerEinsteinCurve;
    d.normalized_limit = Herm2{d.n_x, 0.0, {}};
  } else if (p.geometry == Geometry::Hyperelliptic && d.flat_limit) {
    d.cls = LimitClass::FlatKaehlerMetric;
  }
  return d;
}

bool matches_expected(const GeometryParams& p, const LimitDescriptor& d, double rel_tol) {
  const GeometryDescriptor& desc = descriptor(p.geometry);
  if (d.cls != desc.expected_gh_limit) return false;
  if (d.cls == LimitClass::Circle) {
    const auto want = expected_circle_length(p);
    return want && d.circle_length && std::abs(*d.circle_length - *want) <= rel_tol * *want;
  }
  if (d.cls == LimitClass::KaehlerEinsteinCurve) {
    const auto want = expected_normalized_limit(p);
    return want && d.normalized_limit &&
           std::abs(d.normalized_limit->m11 - want->m11) <= rel_tol * want->m11;
  }
  return true;
}

std::vector<InvariantCheck> monotonicity_checks(const GeometryParams& p, const Trajectory& tr,
                                                double rel_tol) {
  std::vector<InvariantCheck> out;
  if (tr.samples.empty()) return out;
  const double slack = 10.0 * rel_tol;
  const Sample& s0 = tr.samples.front();
  const double x0 = s0.x, y0 = s0.y, u0 = s0.u, d0 = s0.D;

  using Fn = std::function<void(Checker&, const Sample&)>;
  std::vector<std::pair<std::string, Fn>> checks;
  auto add = [&](std::string name, Fn f) { checks.emplace_back(std::move(name), std::move(f)); };

  auto ddot_scale = [](const Sample& s) {
    return std::abs(s.xdot * s.y) + std::abs(s.x * s.ydot) + std::abs(s.udot());
  };
  auto xdot_le0 = [](Checker& c, const Sample& s) { c.le(s.xdot, 0.0, s.xdot, s.t); };
  auto ydot_le0 = [](Checker& c, const Sample& s) { c.le(s.ydot, 0.0, s.ydot, s.t); };
  auto udot_le0 = [](Checker& c, const Sample& s) { c.le(s.udot(), 0.0, s.udot(), s.t); };
  auto ddot_ge0 = [&](Checker& c, const Sample& s) { c.le(-s.ddot(), 0.0, ddot_scale(s), s.t); };
  auto x_le_x0 = [&](Checker& c, const Sample& s) { c.le(s.x, x0, x0, s.t); };
  auto y_le_y0 = [&](Checker& c, const Sample& s) { c.le(s.y, y0, y0, s.t); };
  auto u_le_u0 = [&](Checker& c, const Sample& s) { c.le(s.u, u0, u0, s.t); };
  auto d_ge_d0 = [&](Checker& c, const Sample& s) { c.le(d0, s.D, d0, s.t); };
  auto x_linear = [&](double rate) {
    return [=](Checker& c, const Sample& s) {
      const double b = rate * s.t + x0;
      c.le(s.x, b, b, s.t);
    };
  };

  switch (p.geometry) {
    case Geometry::Torus:
      add("stationary", [&](Checker& c, const Sample& s) {
        const double drift = std::max({std::abs(s.x - x0), std::abs(s.y - y0),
                                       std::abs(s.z - s0.z)});
        c.le(drift, 0.0, std::max(x0, y0), s.t);
      });
      break;
    case Geometry::Hyperelliptic:
      add("xdot <= 0", xdot_le0);
      add("ydot <= 0", ydot_le0);
      add("udot <= 0", udot_le0);
      add("Ddot >= 0", ddot_ge0);
      add("Ddot = xu/D", [&](Checker& c, const Sample& s) {
        const double ref = s.x * s.u / s.D;
        c.le(std::abs(s.ddot() - ref), 0.0, ddot_scale(s) + ref, s.t);
      });
      add("x <= x0", x_le_x0);
      add("y <= y0", y_le_y0);
      add("u <= u0", u_le_u0);
      break;
    case Geometry::Hopf:
      add("xdot < 0", xdot_le0);
      add("udot <= 0", udot_le0);
      add("x <= x0", x_le_x0);
      add("u <= u0", u_le_u0);
      break;
    case Geometry::ProperlyElliptic:
      add("ydot < 0", ydot_le0);
      add("udot <= 0", udot_le0);
      add("Ddot > 0", ddot_ge0);
      add("D >= D0", d_ge_d0);
      add("y <= y0", y_le_y0);
      break;
    case Geometry::KodairaPrimary:
      add("Ddot > 0", ddot_ge0);
      add("D <= sqrt(2 t y0^3 + D0^2)", [&](Checker& c, const Sample& s) {
        const double b = std::sqrt(2.0 * s.t * y0 * y0 * y0 + d0 * d0);
        c.le(s.D, b, b, s.t);
      });
      add("x <= (2 y0^2 / D0) t + x0", x_linear(2.0 * y0 * y0 / d0));
      add("ydot < 0", ydot_le0);
      add("udot <= 0", udot_le0);
      break;
    case Geometry::KodairaSecondary:
      add("ydot < 0", ydot_le0);
      add("udot <= 0", udot_le0);
      add("Ddot > 0", ddot_ge0);
      add("x <= (2 y0^2 / D0) t + x0", x_linear(2.0 * y0 * y0 / d0));
      break;
    case Geometry::InoueS0:
      add("xdot <= 0", xdot_le0);
      add("udot <= 0", udot_le0);
      add("Ddot > 0", ddot_ge0);
      add("x <= x0", x_le_x0);
      break;
    case Geometry::InoueSpmJ1:
      add("ydot <= 0", ydot_le0);
      add("udot <= 0", udot_le0);
      add("Ddot >= 0", ddot_ge0);
      add("xdot <= 3", [](Checker& c, const Sample& s) { c.le(s.xdot, 3.0, 3.0, s.t); });
      add("x <= 3t + x0", x_linear(3.0));
      break;
    case Geometry::InoueSpJ2: {
      const double cap = 3.0 + 2.0 * y0 * y0 / d0;
      add("ydot <= 0", ydot_le0);
      add("udot <= 0", udot_le0);
      add("xdot <= 3 + 2 y0^2 / D0",
          [cap](Checker& c, const Sample& s) { c.le(s.xdot, cap, cap, s.t); });
      add("x <= (3 + 2 y0^2 / D0) t + x0", x_linear(cap));
      break;
    }
  }

  for (auto& [name, fn] : checks) {
    Checker c(name, slack);
    for (const Sample& s : tr.samples) fn(c, s);
    out.push_back(c.done());
  }
  return out;
}

InvariantCheck diagonal_invariance(const Trajectory& tr, double abs_tol) {
  InvariantCheck c{"|z| <= 10 abs_tol", true, -INFINITY, 0.0};
  for (const Sample& s : tr.samples) {
    const double m = std::abs(s.z) - 10.0 * abs_tol;
    if (m > c.worst) c.worst = m, c.t_worst = s.t;
    if (m > 0.0) c.pass = false;
  }
  return c;
}

InvariantCheck udot_consistency(const GeometryParams& p, const Trajectory& tr,
                                double tolerance) {
  InvariantCheck c{"udot matches reduced system", true, 0.0, 0.0};
  for (const Sample& s : tr.samples) {
    double ref = 0.0;
    try {
      ref = reduced_rates(p, s.metric()).udot;
    } catch (const DegenerateMetric&) {
      continue;
    }
    const double obs = s.udot();
    const double scale = std::max(std::abs(obs), std::abs(ref));
    if (scale == 0.0) continue;
    const double rel = std::abs(obs - ref) / scale;
    if (rel > c.worst) c.worst = rel, c.t_worst = s.t;
  }
  c.pass = c.worst <= tolerance;
  return c;
}

}  // namespace hcf
