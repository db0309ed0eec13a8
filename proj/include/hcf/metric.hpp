#pragma once

#include <complex>
#include <stdexcept>
#include <string>
#include <string_view>

namespace hcf {

using cplx = std::complex<double>;

/// Raised when an operation that needs a positive-definite metric receives
/// one with D = xy - |z|^2 below the validity margin.
class DegenerateMetric : public std::domain_error {
public:
  using std::domain_error::domain_error;
};

/// Raised for parameter sets a geometry does not admit (e.g. a = 0 on Sol_0^4).
class InadmissibleParams : public std::invalid_argument {
public:
  using std::invalid_argument::invalid_argument;
};

/// Relative floor on D / (x y) accepted by positivity-dependent operations.
inline constexpr double kDefaultValidityMargin = 1e-12;

/// Left-invariant Hermitian metric
///   g = x z1.z1b + y z2.z2b + z z1.z2b + conj(z) z2.z1b
/// on a complex surface, in a fixed left-invariant (1,0)-frame {Z1, Z2}.
/// In components g_{1 1b} = x, g_{2 2b} = y, g_{1 2b} = z, g_{2 1b} = conj(z).
///
/// u = |z|^2 and D = xy - u are always recomputed, never stored.
struct HermitianMetric {
  double x = 1.0;
  double y = 1.0;
  cplx z{0.0, 0.0};

  [[nodiscard]] double u() const noexcept { return std::norm(z); }
  [[nodiscard]] double det() const noexcept { return x * y - std::norm(z); }

  /// Entry g_{i jb} with i, j in {0, 1}.
  [[nodiscard]] cplx entry(int i, int j) const noexcept {
    if (i == 0 && j == 0) return {x, 0.0};
    if (i == 1 && j == 1) return {y, 0.0};
    if (i == 0) return z;
    return std::conj(z);
  }

  friend bool operator==(const HermitianMetric&, const HermitianMetric&) = default;
};

/// Hermitian 2x2 tensor M_{i jb}: real diagonal, M_{2 1b} = conj(M_{1 2b}).
struct Herm2 {
  double m11 = 0.0;
  double m22 = 0.0;
  cplx m12{0.0, 0.0};

  [[nodiscard]] cplx entry(int i, int j) const noexcept {
    if (i == 0 && j == 0) return {m11, 0.0};
    if (i == 1 && j == 1) return {m22, 0.0};
    if (i == 0) return m12;
    return std::conj(m12);
  }
  [[nodiscard]] double max_abs() const noexcept;

  friend bool operator==(const Herm2&, const Herm2&) = default;
};

Herm2 operator+(const Herm2& a, const Herm2& b) noexcept;
Herm2 operator-(const Herm2& a, const Herm2& b) noexcept;
Herm2 operator*(double s, const Herm2& a) noexcept;

/// Components of the inverse metric: g^{1b 1}, g^{2b 2}, g^{1b 2}.
struct InverseMetric {
  double inv11 = 0.0;
  double inv22 = 0.0;
  cplx inv12{0.0, 0.0};
};

enum class Geometry {
  Torus,
  Hyperelliptic,
  Hopf,
  ProperlyElliptic,
  KodairaPrimary,
  KodairaSecondary,
  InoueS0,
  InoueSpmJ1,
  InoueSpJ2,
};

inline constexpr int kGeometryCount = 9;

/// Stable identifier used by the CLI and in JSON ("hopf", "inoue-s0", ...).
std::string_view geometry_id(Geometry g) noexcept;
/// Inverse of geometry_id; throws std::invalid_argument for unknown ids.
Geometry geometry_from_id(std::string_view id);

/// Geometry selector plus its parameters. Parameters a geometry does not use
/// are ignored by every consumer.
struct GeometryParams {
  Geometry geometry = Geometry::Torus;
  double lambda = 0.0;   // Hopf, ProperlyElliptic
  double a = 1.0;        // InoueS0, must be nonzero
  double b = 0.0;        // InoueS0
  int epsilon = 1;       // KodairaSecondary, +1 or -1

  /// c = 1 + lambda^2.
  [[nodiscard]] double c() const noexcept { return 1.0 + lambda * lambda; }

  static GeometryParams of(Geometry g) { return GeometryParams{g}; }
  static GeometryParams hopf(double lambda) { return {Geometry::Hopf, lambda}; }
  static GeometryParams properly_elliptic(double lambda) {
    return {Geometry::ProperlyElliptic, lambda};
  }
  static GeometryParams inoue_s0(double a, double b) {
    return {Geometry::InoueS0, 0.0, a, b};
  }
  static GeometryParams kodaira_secondary(int epsilon) {
    return {Geometry::KodairaSecondary, 0.0, 1.0, 0.0, epsilon};
  }
};

/// Throws InadmissibleParams if the parameters are not admitted by the geometry.
void validate_params(const GeometryParams& p);

double metric_determinant(const HermitianMetric& g) noexcept;

/// True iff x > 0 and xy - |z|^2 > 0.
bool is_positive(const HermitianMetric& g) noexcept;

/// Throws DegenerateMetric unless x > 0, y > 0 and D >= margin * x * y.
void require_positive(const HermitianMetric& g,
                      double margin = kDefaultValidityMargin);

/// g^{1b1} = y/D, g^{2b2} = x/D, g^{1b2} = -z/D.
InverseMetric metric_inverse(const HermitianMetric& g,
                             double margin = kDefaultValidityMargin);

std::string to_string(const HermitianMetric& g);

}  // namespace hcf
