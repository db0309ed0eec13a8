#pragma once

// General HCF tensor from structure constants.
//
// Index conventions (all indices 0-based):
//   complexified basis  A in {Z1, Z2, Zb1, Zb2} = {0, 1, 2, 3}, bar(A) = A +- 2
//   mu(A, B, C)         coefficient of e_C in [e_A, e_B]
//   G[i][j]             g_{i jb}
//   H[p][v]             g^{p vb} (= g^{vb p}); H = (G^{-1})^T
//   Mat2 M[i][j]        M_{i jb}
//
// Everything is dense over {0, 1}; n = 2 is fixed.

#include <array>

#include "hcf/metric.hpp"

namespace hcf {

enum Basis : int { Z1 = 0, Z2 = 1, Zb1 = 2, Zb2 = 3 };

constexpr int bar(int a) noexcept { return (a + 2) % 4; }

using Mat2 = std::array<std::array<cplx, 2>, 2>;
using Tensor3 = std::array<std::array<std::array<cplx, 2>, 2>, 2>;

/// Bracket coefficients of a complexified real Lie algebra of real dimension 4.
class StructureConstants {
public:
  using Vec = std::array<cplx, 4>;

  /// Abelian algebra.
  StructureConstants() = default;

  /// Sets [e_A, e_B] = v and fills [e_B, e_A], [e_Ab, e_Bb], [e_Bb, e_Ab]
  /// from antisymmetry and reality. Throws std::invalid_argument if v is
  /// inconsistent with those constraints (only possible when B = bar(A)).
  StructureConstants& set(int a, int b, const Vec& v);

  [[nodiscard]] cplx operator()(int a, int b, int c) const noexcept {
    return c_[a][b][c];
  }
  [[nodiscard]] const Vec& bracket(int a, int b) const noexcept { return c_[a][b]; }

  /// max |mu_AB^C + mu_BA^C|
  [[nodiscard]] double antisymmetry_violation() const noexcept;
  /// max |conj(mu_AB^C) - mu_{Ab Bb}^{Cb}|
  [[nodiscard]] double reality_violation() const noexcept;
  /// max |component of [Z_i, Z_j] along Zb_k|
  [[nodiscard]] double integrability_violation() const noexcept;
  /// max over A, B, C of the cyclic sum [[A,B],C] + [[B,C],A] + [[C,A],B].
  [[nodiscard]] double jacobi_violation() const noexcept;

private:
  std::array<std::array<Vec, 4>, 4> c_{};
};

struct Christoffels {
  Tensor3 hol{};    // Gamma_{k i}^s   -> hol[k][i][s]
  Tensor3 mixed{};  // Gamma_{kb l}^r  -> mixed[k][l][r]
};

/// T_{i j kb} -> t[i][j][k]; antisymmetric in (i, j).
using Torsion = Tensor3;

struct QuadraticTerms {
  Mat2 q1{}, q2{}, q3{}, q4{};
};

struct CurvatureBundle {
  Christoffels gamma;
  Torsion torsion{};
  Mat2 s{};
  QuadraticTerms q;
  Mat2 q_total{};  // Q = Q1/2 - Q2/4 - Q3/2 + Q4
  Mat2 k{};        // K = S - Q
};

Christoffels christoffels(const StructureConstants& mu, const HermitianMetric& g);
Torsion torsion(const StructureConstants& mu, const HermitianMetric& g);
Mat2 second_chern_ricci(const StructureConstants& mu, const HermitianMetric& g);
/// Q1..Q4 contracted from the torsion tensor.
QuadraticTerms quadratic_terms(const StructureConstants& mu, const HermitianMetric& g);
/// Q1/2 - Q2/4 - Q3/2 + Q4.
Mat2 assemble_q(const QuadraticTerms& q) noexcept;
Mat2 hcf_tensor(const StructureConstants& mu, const HermitianMetric& g);
CurvatureBundle curvature_bundle(const StructureConstants& mu, const HermitianMetric& g);

Herm2 to_herm(const Mat2& m) noexcept;
/// max(|m01 - conj(m10)|, |Im m00|, |Im m11|)
double hermiticity_defect(const Mat2& m) noexcept;

namespace reference {

// Second routes kept for cross-checking the production contractions.

/// T_{ij}^s = Gamma_{ij}^s - Gamma_{ji}^s - mu_{ij}^s, lowered with g.
Torsion torsion_from_christoffels(const StructureConstants& mu, const HermitianMetric& g);
/// S from the curvature form written with Christoffel symbols.
Mat2 second_chern_ricci_from_christoffels(const StructureConstants& mu,
                                          const HermitianMetric& g);
/// Q1..Q4 written directly as products of structure constants, without
/// forming the torsion tensor or using conjugation of it.
QuadraticTerms quadratic_terms_expanded(const StructureConstants& mu,
                                        const HermitianMetric& g);

}  // namespace reference

}  // namespace hcf
