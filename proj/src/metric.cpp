#include "hcf/metric.hpp"

#include <algorithm>
#include <array>
#include <cmath>

#include <fmt/format.h>

namespace hcf {

namespace {

constexpr std::array<std::pair<Geometry, std::string_view>, kGeometryCount> kIds{{
    {Geometry::Torus, "torus"},
    {Geometry::Hyperelliptic, "hyperelliptic"},
    {Geometry::Hopf, "hopf"},
    {Geometry::ProperlyElliptic, "properly-elliptic"},
    {Geometry::KodairaPrimary, "kodaira-primary"},
    {Geometry::KodairaSecondary, "kodaira-secondary"},
    {Geometry::InoueS0, "inoue-s0"},
    {Geometry::InoueSpmJ1, "inoue-spm-j1"},
    {Geometry::InoueSpJ2, "inoue-sp-j2"},
}};

}  // namespace

double Herm2::max_abs() const noexcept {
  return std::max({std::abs(m11), std::abs(m22), std::abs(m12)});
}

Herm2 operator+(const Herm2& a, const Herm2& b) noexcept {
  return {a.m11 + b.m11, a.m22 + b.m22, a.m12 + b.m12};
}

Herm2 operator-(const Herm2& a, const Herm2& b) noexcept {
  return {a.m11 - b.m11, a.m22 - b.m22, a.m12 - b.m12};
}

Herm2 operator*(double s, const Herm2& a) noexcept {
  return {s * a.m11, s * a.m22, s * a.m12};
}

std::string_view geometry_id(Geometry g) noexcept {
  for (const auto& [geo, id] : kIds)
    if (geo == g) return id;
  return "unknown";
}

Geometry geometry_from_id(std::string_view id) {
  for (const auto& [geo, name] : kIds)
    if (name == id) return geo;
  throw std::invalid_argument(fmt::format("unknown geometry '{}'", id));
}

void validate_params(const GeometryParams& p) {
  switch (p.geometry) {
    case Geometry::Hopf:
    case Geometry::ProperlyElliptic:
      if (!std::isfinite(p.lambda))
        throw InadmissibleParams("lambda must be finite");
      break;
    case Geometry::InoueS0:
      if (!std::isfinite(p.a) || !std::isfinite(p.b))
        throw InadmissibleParams("a and b must be finite");
      if (p.a == 0.0)
        throw InadmissibleParams("inoue-s0 requires a != 0");
      break;
    case Geometry::KodairaSecondary:
      if (p.epsilon != 1 && p.epsilon != -1)
        throw InadmissibleParams("kodaira-secondary requires epsilon = +1 or -1");
      break;
    default:
      break;
  }
}

double metric_determinant(const HermitianMetric& g) noexcept { return g.det(); }

bool is_positive(const HermitianMetric& g) noexcept {
  return g.x > 0.0 && g.det() > 0.0;
}

void require_positive(const HermitianMetric& g, double margin) {
  const double d = g.det();
  if (!(g.x > 0.0) || !(g.y > 0.0) || !(d >= margin * g.x * g.y) || !std::isfinite(d))
    throw DegenerateMetric(
        fmt::format("degenerate metric {} (D = {:.6g})", to_string(g), d));
}

InverseMetric metric_inverse(const HermitianMetric& g, double margin) {
  require_positive(g, margin);
  const double d = g.det();
  return {g.y / d, g.x / d, -g.z / d};
}

std::string to_string(const HermitianMetric& g) {
  return fmt::format("(x={:.17g}, y={:.17g}, z={:.17g}{:+.17g}i)", g.x, g.y,
                     g.z.real(), g.z.imag());
}

}  // namespace hcf
