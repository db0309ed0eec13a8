#include "hcf/catalog.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace hcf {

namespace {

constexpr cplx I{0.0, 1.0};

using Vec = StructureConstants::Vec;

bool kaehler_everywhere(const HermitianMetric&) { return true; }
bool kaehler_if_diagonal(const HermitianMetric& g) { return g.z == cplx{}; }

std::vector<GeometryDescriptor> build_catalog() {
  const ParamSpec lambda{"lambda", "real", "any real"};
  using EO = ExpectedOutcome;
  using LC = LimitClass;
  return {
      {Geometry::Torus, geometry_id(Geometry::Torus), "complex torus (C^2)", {},
       EO::Immortal, LC::Point, false, &kaehler_everywhere},
      {Geometry::Hyperelliptic, geometry_id(Geometry::Hyperelliptic),
       "hyperelliptic surface", {}, EO::Immortal, LC::Point, true, &kaehler_if_diagonal},
      {Geometry::Hopf, geometry_id(Geometry::Hopf), "Hopf surface", {lambda},
       EO::FiniteTimeExtinction, LC::FiniteTimeCollapse},
      {Geometry::ProperlyElliptic, geometry_id(Geometry::ProperlyElliptic),
       "non-Kaehler properly elliptic surface", {lambda}, EO::Immortal,
       LC::KaehlerEinsteinCurve},
      {Geometry::KodairaPrimary, geometry_id(Geometry::KodairaPrimary),
       "primary Kodaira surface", {}, EO::Immortal, LC::Point},
      {Geometry::KodairaSecondary, geometry_id(Geometry::KodairaSecondary),
       "secondary Kodaira surface", {{"epsilon", "sign", "+1 or -1"}}, EO::Immortal,
       LC::Point},
      {Geometry::InoueS0, geometry_id(Geometry::InoueS0), "Inoue surface S0",
       {{"a", "real", "nonzero"}, {"b", "real", "any real"}}, EO::Immortal, LC::Circle},
      {Geometry::InoueSpmJ1, geometry_id(Geometry::InoueSpmJ1),
       "Inoue surface S+- (structure J1)", {}, EO::Immortal, LC::Circle},
      {Geometry::InoueSpJ2, geometry_id(Geometry::InoueSpJ2),
       "Inoue surface S+ (structure J2)", {}, EO::Immortal, LC::Circle},
  };
}

struct Scalars {
  double x, y, u, d;
  cplx z, zb;
};

Scalars scalars(const HermitianMetric& g) {
  require_positive(g);
  return {g.x, g.y, g.u(), g.det(), g.z, std::conj(g.z)};
}

}  // namespace

std::string_view to_string(ExpectedOutcome o) noexcept {
  return o == ExpectedOutcome::Immortal ? "immortal" : "extinction";
}

std::string_view to_string(LimitClass c) noexcept {
  switch (c) {
    case LimitClass::Point: return "point";
    case LimitClass::Circle: return "circle";
    case LimitClass::KaehlerEinsteinCurve: return "kaehler-einstein-curve";
    case LimitClass::FlatKaehlerMetric: return "flat-kaehler-metric";
    case LimitClass::FiniteTimeCollapse: return "finite-time-collapse";
    case LimitClass::Unclassified: return "unclassified";
  }
  return "unclassified";
}

const std::vector<GeometryDescriptor>& list_geometries() {
  static const std::vector<GeometryDescriptor> catalog = build_catalog();
  return catalog;
}

const GeometryDescriptor& descriptor(Geometry g) {
  return list_geometries().at(static_cast<std::size_t>(g));
}

std::optional<double> expected_circle_length(const GeometryParams& p) {
  switch (p.geometry) {
    case Geometry::InoueS0: return 2.0 * std::numbers::sqrt2 * std::abs(p.a);
    case Geometry::InoueSpmJ1:
    case Geometry::InoueSpJ2: return std::sqrt(3.0);
    default: return std::nullopt;
  }
}

std::optional<Herm2> expected_normalized_limit(const GeometryParams& p) {
  if (p.geometry == Geometry::ProperlyElliptic) return Herm2{2.0, 0.0, {}};
  return std::nullopt;
}

StructureConstants structure_constants(const GeometryParams& p) {
  validate_params(p);
  StructureConstants mu;
  const double l = p.lambda;
  switch (p.geometry) {
    case Geometry::Torus:
      break;
    case Geometry::Hyperelliptic:
      mu.set(Z1, Z2, Vec{1.0, 0.0, 0.0, 0.0});
      mu.set(Z1, Zb2, Vec{-1.0, 0.0, 0.0, 0.0});
      break;
    case Geometry::Hopf:
      mu.set(Z1, Z2, Vec{0.0, 1.0, 0.0, 0.0});
      mu.set(Z1, Zb2, Vec{0.0, 0.0, 0.0, -1.0});
      mu.set(Z2, Zb2, Vec{-1.0 + I * l, 0.0, 1.0 + I * l, 0.0});
      break;
    case Geometry::ProperlyElliptic:
      mu.set(Z1, Z2, Vec{I, 0.0, 0.0, 0.0});
      mu.set(Z1, Zb2, Vec{I, 0.0, 0.0, 0.0});
      mu.set(Z1, Zb1, Vec{0.0, -l + I, 0.0, l + I});
      break;
    case Geometry::KodairaPrimary:
      mu.set(Z1, Zb1, Vec{0.0, I, 0.0, I});
      break;
    case Geometry::KodairaSecondary: {
      const double e = p.epsilon;
      mu.set(Z1, Z2, Vec{e, 0.0, 0.0, 0.0});
      mu.set(Z1, Zb2, Vec{-e, 0.0, 0.0, 0.0});
      mu.set(Z1, Zb1, Vec{0.0, -e * I, 0.0, -e * I});
      break;
    }
    case Geometry::InoueS0: {
      const cplx w{p.b, p.a};
      mu.set(Z1, Z2, Vec{-w, 0.0, 0.0, 0.0});
      mu.set(Z1, Zb2, Vec{w, 0.0, 0.0, 0.0});
      mu.set(Z2, Zb2, Vec{0.0, -2.0 * I * p.a, 0.0, -2.0 * I * p.a});
      break;
    }
    case Geometry::InoueSpmJ1:
      mu.set(Z1, Z2, Vec{0.0, -1.0, 0.0, 0.0});
      mu.set(Z1, Zb2, Vec{0.0, -1.0, 0.0, 0.0});
      mu.set(Z1, Zb1, Vec{-1.0, 0.0, 1.0, 0.0});
      break;
    case Geometry::InoueSpJ2:
      mu.set(Z1, Z2, Vec{0.0, -1.0, 0.0, 0.0});
      mu.set(Z1, Zb2, Vec{0.0, -1.0, 0.0, 0.0});
      mu.set(Z1, Zb1, Vec{-1.0, 1.0, 1.0, -1.0});
      break;
  }
  return mu;
}

Herm2 closed_form_K(const GeometryParams& p, const HermitianMetric& g) {
  validate_params(p);
  const auto [x, y, u, d, z, zb] = scalars(g);
  const double d2 = d * d;
  const double c = p.c();
  const double l2 = p.lambda * p.lambda;
  switch (p.geometry) {
    case Geometry::Torus:
      return {};
    case Geometry::Hyperelliptic:
      return {x * x * u / d2, u * u / d2, x * x * y * z / d2};
    case Geometry::Hopf:
      return {(c * x * x * x * x + u * (2 * x * x + u)) / d2,
              (c * x * x * u + 2 * d2 + u * (y * y + 2 * u) - 2 * c * x * x * d) / d2,
              x * z * (l2 * x * x + (x + y) * (x + y)) / d2};
    case Geometry::ProperlyElliptic:
      return {(c * y * y * u - 2 * d2 + u * (x * x - 2 * u) - 2 * c * y * y * d) / d2,
              (l2 * y * y * y * y + (y * y - u) * (y * y - u)) / d2,
              y * z * (l2 * y * y + (x - y) * (x - y)) / d2};
    case Geometry::KodairaPrimary:
      return {(-2 * y * y * d + y * y * u) / d2, y * y * y * y / d2, y * y * y * z / d2};
    case Geometry::KodairaSecondary:
      return {(u * (x * x + y * y) - 2 * y * y * d) / d2, (y * y * y * y + u * u) / d2,
              y * z * (x * x + y * y) / d2};
    case Geometry::InoueS0: {
      const double a2 = p.a * p.a;
      const double bb = p.b * p.b + 9 * a2;
      return {x * x * u * bb / d2,
              (u * u * (a2 + p.b * p.b) + 16 * u * a2 * x * y - 8 * a2 * x * x * y * y) / d2,
              x * x * y * z * bb / d2};
    }
    case Geometry::InoueSpmJ1: {
      const double w2 = ((z - zb) * (z - zb)).real();
      return {-3.0 - u * w2 / d2, -y * y * w2 / d2,
              y * (z * (zb * zb - z * z) - 2 * x * y * (zb - z)) / d2};
    }
    case Geometry::InoueSpJ2: {
      const double w2 = ((z - zb) * (z - zb)).real();
      return {-3.0 - (u * w2 + 2 * y * y * d - y * y * u) / d2, -y * y * (w2 - y * y) / d2,
              y * (z * (zb * zb - z * z) - 2 * x * y * (zb - z) + y * y * z) / d2};
    }
  }
  return {};
}

AppendixTables appendix_tables(const GeometryParams& p, const HermitianMetric& g) {
  validate_params(p);
  if (p.geometry == Geometry::Torus)
    throw std::invalid_argument("no appendix tables for the torus");
  const auto [x, y, u, d, z, zb] = scalars(g);
  const double d2 = d * d;
  const double c = p.c();
  const double l = p.lambda;
  const double s2 = (z * z + zb * zb).real();
  const double zr2 = (z + zb).real();
  AppendixTables t;
  switch (p.geometry) {
    case Geometry::Hyperelliptic:
      t.s = {x * x * u / d2, x * y * u / d2, x * x * y * z / d2};
      t.q1 = {x * x * u / d2, x * y * u / d2, x * z * u / d2};
      t.q2 = {0.0, 2 * u / d, 0.0};
      t.q3 = {x * x * u / d2, u * u / d2, x * z * u / d2};
      t.q4 = {0.0, u / d, 0.0};
      break;
    case Geometry::Hopf: {
      const double num1 = c * x * x * x * d2 + y * u * (x * x * y * y - u * u) +
                          (x + y) * (x * y - 2 * u) * u * u + 2 * x * x * y * d;
      t.s = {x * (x * x * x * c + u * (2 * x + y)) / d2,
             (-c * x * x * (x * y - 2 * u) - 4 * u * d + y * y * (2 * x * x + u)) / d2,
             x * z * (-I * l * d + x * x * c + y * (x + y) + u) / d2};
      t.q1 = {x * num1 / (d2 * d2), y * num1 / (d2 * d2),
              z * (c * x * x * x + (2 * x + y) * u) / d2};
      t.q2 = {2 * u / d, 2 * c * x * x / d, -2 * x * y * (1.0 + I * l) / d};
      t.q3 = {(c * x * x * x * x + (2 * x * x + u) * u) / d2,
              (c * x * x + (2 * x + y) * y * u) / d2,
              z * (c * x * x * x + I * l * x + (x + y) * u + x * x * y) / d2};
      t.q4 = {u / d, c * x * x / d, -(1.0 + I * l) * x * z / d};
      break;
    }
    case Geometry::ProperlyElliptic: {
      // the printed S_11 carries an "a^2 y^2" term; read as lambda^2
      const double q1n = c * y * y * y + (x - 2 * y) * u;
      t.s = {(-y * (2 * x + c * y) * d + ((x + y) * (x + y) + l * l * y * y - 4) * u) / d2,
             y * q1n / d2,
             y * z * ((1.0 + I * l) * d + x * x - 2 * x * y + c * y * y) / d2};
      t.q1 = {x * q1n / d2, y * q1n / d2, z * q1n / d2};
      t.q2 = {2 * y * y * c / d, 2 * u / d, 2.0 * (1.0 + I * l) * y * z / d};
      t.q3 = {(c * y * y + x * (x - 2 * y)) * u / d2,
              (c * y * y * y * y + u * (u - 2 * y * y)) / d2,
              z * ((1.0 - I * l) * y * d + c * y * y * y + x * u) / d2};
      t.q4 = {y * y * c / d, u / d, (1.0 + I * l) / d};
      break;
    }
    case Geometry::KodairaPrimary:
      t.s = {-y * y * (x * y - 2 * u) / d2, y * y * y * y / d2, y * y * y * z / d2};
      t.q1 = {x * y * y * y / d2, y * y * y * y / d2, y * y * y * z / d2};
      t.q2 = {2 * y * y / d, 0.0, 0.0};
      t.q3 = {y * y * u / d2, y * y * y * y / d2, y * y * y * z / d2};
      t.q4 = {y * y / d, 0.0, 0.0};
      break;
    case Geometry::KodairaSecondary: {
      const double n = x * u + y * y * y;
      t.s = {((x * x + y * y) * u - y * y * d) / d2, y * n / d2,
             ((x * x + y * y) + I * d) / d2};
      t.q1 = {x * n / d2, y * n / d2, z * n / d2};
      t.q2 = {2 * y * y / d, 2 * u / d, 2.0 * I * y * z / d};
      t.q3 = {(x * x + y * y) * u / d2, (y * y * y * y + u * u) / d2,
              z * (x + I * y) * (u - I * y * y) / d2};
      t.q4 = {y * y / d, u / d, I * y * z / d};
      break;
    }
    case Geometry::InoueS0: {
      const double a = p.a, b = p.b, a2 = a * a;
      const double bb = b * b + 9 * a2;
      const double n = bb * u + 4 * a2 * d;
      const cplx w{a, b};  // a + ib
      t.s = {x * n / d2, x * y * (bb * u - 8 * a2 * d) / d2,
             x * z * (bb * x * y - 2 * a * w * d) / d2};
      t.q1 = {x * x * n / d2, x * y * n / d2, x * z * n / d2};
      t.q2 = {8 * a2 * x * x / d, 2 * (b * b + a2) * u / d, -4.0 * a * w / d};
      t.q3 = {bb * x * x * u / d2, (bb * u * u + 4 * a2 * (x * y + 2 * u) * d) / d2,
              x * z * (bb * u + 2 * a * cplx{3 * a, b} * d) / d2};
      t.q4 = {4 * a2 * x * x / d, (b * b + a2) * u / d, -2.0 * a * w / d};
      break;
    }
    case Geometry::InoueSpmJ1: {
      const double n = x * y + u - s2;
      t.s = {(-2 * d2 - x * y * d - s2 * u + 2 * x * y * u) / d2, y * y * n / d2,
             (x * y * y * (z - zb) + y * z * (x * y - z * z)) / d2};
      t.q1 = {x * y * n / d2, y * y * n / d2,
              y * z * ((z - zb) * u + x * y * z - z * z * z) / d2};
      t.q2 = {2 * u / d, 2 * y * y / d, 2 * y * zb / d};
      t.q3 = {(x * x * y * y - x * y * s2 + u * u) / d2, y * y * (2 * u - s2) / d2,
              y * (x * y - z * z) * (z - zb) / d2};
      t.q4 = {u / d, y * y / d, y * zb / d};
      break;
    }
    case Geometry::InoueSpJ2: {
      const double n = u - s2 + y * (x + y);
      t.s = {(x * y * y * (4 * x - y) - (2 * u - 2 * y * y + s2) * u - y * (7 * x - zr2) * d) /
                 d2,
             y * y * (u + y * y + x * y - s2) / d2,
             (y * y * d + x * y * y * (2.0 * z * z - zb) + z * y * (y * y - z * z)) / d2};
      t.q1 = {x * y * n / d2, y * y * n / d2,
              y * ((z - zb) * u + x * y * z + y * y * z - z * z * z) / d2};
      t.q2 = {2 * (u + y * zr2 + y * y) / d, 2 * y * y / d, 2 * y * (y + zb) / d};
      t.q3 = {(2 * x * y * u - x * y * s2 + y * y * u + (x * y - y * zr2 - u) * d) / d2,
              y * y * (2 * u - s2 + y * y) / d2,
              y * (z * u + y * u - x * y * (z - zb) - z * z * z + y * y * z - x * y * y) / d2};
      t.q4 = {(u + y * zr2 + y * y) / d, y * y / d, y * (y + zb) / d};
      break;
    }
    case Geometry::Torus:
      break;
  }
  return t;
}

Herm2 assemble_q(const AppendixTables& t) noexcept {
  return 0.5 * t.q1 - 0.25 * t.q2 - 0.5 * t.q3 + t.q4;
}

Herm2 assemble_k(const AppendixTables& t) noexcept { return t.s - assemble_q(t); }

ReducedRates reduced_rates(const GeometryParams& p, const HermitianMetric& g) {
  validate_params(p);
  const auto [x, y, u, d, z, zb] = scalars(g);
  const double d2 = d * d;
  const double c = p.c();
  const double w2 = 4.0 * z.imag() * z.imag();  // |z - zb|^2
  switch (p.geometry) {
    case Geometry::Torus:
      return {};
    case Geometry::Hyperelliptic:
      return {-x * x * u / d2, -u * u / d2, -2 * x * x * y * u / d2};
    case Geometry::Hopf:
      return {-(c * x * x * x * x + u * (2 * x * x + u)) / d2,
              -2 + (2 * c * x * x * d - c * x * x * u - u * (y * y + 2 * u)) / d2,
              -2 * x * u * (c * x * x + 2 * x * y + y * y) / d2};
    case Geometry::ProperlyElliptic:
      return {2 + (2 * c * y * y * d - c * y * y * u - u * x * x + 2 * u * u) / d2,
              -(c * y * y * y * y - 2 * y * y * u + u * u) / d2,
              -2 * y * u * (x * x - 2 * x * y + c * y * y) / d2};
    case Geometry::KodairaPrimary:
      return {(2 * y * y * d - y * y * u) / d2, -y * y * y * y / d2,
              -2 * y * y * y * u / d2};
    case Geometry::KodairaSecondary:
      // y^4 where the printed system has y^2
      return {(2 * y * y * d - u * (x * x + y * y)) / d2, -(y * y * y * y + u * u) / d2,
              -2 * y * u * (x * x + y * y) / d2};
    case Geometry::InoueS0: {
      const double k = 9 * p.a * p.a + p.b * p.b;
      return {-k * x * x * u / d2, 8 * p.a * p.a - k * (u / d) * (u / d),
              -2 * k * x * x * u * y / d2};
    }
    case Geometry::InoueSpmJ1:
      return {3 - u * w2 / d2, -y * y * w2 / d2, -2 * x * y * y * w2 / d2};
    case Geometry::InoueSpJ2:
      return {3 + 2 * y * y / d - u * (y * y + w2) / d2, -y * y * (w2 + y * y) / d2,
              -2 * y * y * (x * w2 + y * u) / d2};
  }
  return {};
}

GeometryParams random_params(Geometry g, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> lam(-2.0, 2.0);
  std::uniform_real_distribution<double> mag(0.2, 2.0);
  std::bernoulli_distribution coin(0.5);
  GeometryParams p = GeometryParams::of(g);
  switch (g) {
    case Geometry::Hopf:
    case Geometry::ProperlyElliptic:
      p.lambda = lam(rng);
      break;
    case Geometry::InoueS0:
      p.a = mag(rng) * (coin(rng) ? 1.0 : -1.0);
      p.b = lam(rng);
      break;
    case Geometry::KodairaSecondary:
      p.epsilon = coin(rng) ? 1 : -1;
      break;
    default:
      break;
  }
  return p;
}

HermitianMetric random_metric(std::mt19937_64& rng, double lo, double hi) {
  std::uniform_real_distribution<double> logu(std::log(lo), std::log(hi));
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  HermitianMetric g;
  g.x = std::exp(logu(rng));
  g.y = std::exp(logu(rng));
  const double r = std::sqrt(unit(rng) * 0.95 * g.x * g.y);
  const double phi = 2.0 * std::numbers::pi * unit(rng);
  g.z = std::polar(r, phi);
  return g;
}

}  // namespace hcf
