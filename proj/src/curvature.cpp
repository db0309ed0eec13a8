#include "hcf/curvature.hpp"

#include <algorithm>
#include <cmath>

namespace hcf {

namespace {

using Vec4 = StructureConstants::Vec;

// conj of a bracket value with the basis relabelled Z <-> Zb
Vec4 conj_swap(const Vec4& v) noexcept {
  return {std::conj(v[2]), std::conj(v[3]), std::conj(v[0]), std::conj(v[1])};
}

struct Frame {
  Mat2 g{};  // g_{i jb}
  Mat2 h{};  // g^{p vb}
};

Frame make_frame(const HermitianMetric& m) {
  const InverseMetric inv = metric_inverse(m);
  Frame f;
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j) f.g[i][j] = m.entry(i, j);
  // g^{p vb} = (G^{-1})[v][p]; G^{-1} = [[y, -z], [-conj z, x]] / D
  f.h[0][0] = inv.inv11;
  f.h[1][1] = inv.inv22;
  f.h[1][0] = inv.inv12;             // g^{2 1b} = g^{1b 2} = -z / D
  f.h[0][1] = std::conj(inv.inv12);  // g^{1 2b} = -conj(z) / D
  return f;
}

Tensor3 torsion_impl(const StructureConstants& mu, const Frame& f) {
  Tensor3 t{};
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j)
      for (int k = 0; k < 2; ++k) {
        cplx s{};
        for (int a = 0; a < 2; ++a)
          s += f.g[j][a] * mu(bar(k), i, bar(a)) - f.g[i][a] * mu(bar(k), j, bar(a));
        for (int m = 0; m < 2; ++m) s -= f.g[m][k] * mu(i, j, m);
        t[i][j][k] = s;
      }
  return t;
}

Mat2 ricci_impl(const StructureConstants& mu, const Frame& f) {
  Mat2 out{};
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j) {
      cplx acc{};
      for (int l = 0; l < 2; ++l)
        for (int k = 0; k < 2; ++k)
          for (int p = 0; p < 2; ++p) {
            cplx inner{};
            for (int r = 0; r < 2; ++r) {
              for (int v = 0; v < 2; ++v)
                for (int q = 0; q < 2; ++q) {
                  const cplx mkvq = mu(k, bar(v), bar(q));
                  inner += f.h[p][v] * f.g[r][q] * mkvq * mu(bar(l), i, r);
                  inner -= f.h[r][v] * f.g[i][q] * mkvq * mu(bar(l), r, p);
                  inner -= f.h[p][v] * f.g[i][q] * mu(r, bar(v), bar(q)) * mu(k, bar(l), r);
                }
              inner += mu(k, bar(l), bar(r)) * mu(bar(r), i, p);
            }
            acc -= f.h[k][l] * f.g[p][j] * inner;
          }
      out[i][j] = acc;
    }
  return out;
}

QuadraticTerms quadratic_impl(const Tensor3& t, const Frame& f) {
  // tb[i][j][k] = T_{ib jb k} = conj(T_{i j kb})
  Tensor3 tb{};
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j)
      for (int k = 0; k < 2; ++k) tb[i][j][k] = std::conj(t[i][j][k]);

  QuadraticTerms q;
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j) {
      cplx q1{}, q2{}, q3{}, q4{};
      for (int l = 0; l < 2; ++l)
        for (int k = 0; k < 2; ++k)
          for (int qq = 0; qq < 2; ++qq)
            for (int m = 0; m < 2; ++m) {
              const cplx w = f.h[k][l] * f.h[m][qq];
              q1 += w * t[i][k][qq] * tb[j][l][m];
              q2 += w * t[k][m][j] * tb[l][qq][i];
              q3 += w * t[i][k][l] * tb[j][qq][m];
              q4 += 0.5 * w * (t[m][k][l] * tb[qq][j][i] + tb[qq][l][k] * t[m][i][j]);
            }
      q.q1[i][j] = q1;
      q.q2[i][j] = q2;
      q.q3[i][j] = q3;
      q.q4[i][j] = q4;
    }
  return q;
}

Mat2 sub(const Mat2& a, const Mat2& b) noexcept {
  Mat2 r{};
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j) r[i][j] = a[i][j] - b[i][j];
  return r;
}

Christoffels christoffels_impl(const StructureConstants& mu, const Frame& f) {
  Christoffels c;
  for (int k = 0; k < 2; ++k)
    for (int i = 0; i < 2; ++i)
      for (int s = 0; s < 2; ++s) {
        cplx acc{};
        for (int j = 0; j < 2; ++j)
          for (int p = 0; p < 2; ++p)
            acc -= f.h[s][j] * f.g[i][p] * mu(k, bar(j), bar(p));
        c.hol[k][i][s] = acc;
        c.mixed[k][i][s] = mu(bar(k), i, s);
      }
  return c;
}

}  // namespace

StructureConstants& StructureConstants::set(int a, int b, const Vec& v) {
  if (a < 0 || a > 3 || b < 0 || b > 3 || a == b)
    throw std::invalid_argument("bracket indices must be distinct and in [0, 4)");
  const Vec vb = conj_swap(v);
  Vec neg{}, negb{};
  for (int c = 0; c < 4; ++c) {
    neg[c] = -v[c];
    negb[c] = -vb[c];
  }
  if (b == bar(a)) {
    // [e_Ab, e_A] is both -v (antisymmetry) and conj_swap(v) (reality)
    for (int c = 0; c < 4; ++c)
      if (std::abs(vb[c] + v[c]) > 1e-15 * (1.0 + std::abs(v[c])))
        throw std::invalid_argument("bracket [e_A, e_Ab] must be anti-real");
  }
  c_[a][b] = v;
  c_[b][a] = neg;
  c_[bar(a)][bar(b)] = vb;
  c_[bar(b)][bar(a)] = negb;
  return *this;
}

double StructureConstants::antisymmetry_violation() const noexcept {
  double worst = 0.0;
  for (int a = 0; a < 4; ++a)
    for (int b = 0; b < 4; ++b)
      for (int c = 0; c < 4; ++c)
        worst = std::max(worst, std::abs(c_[a][b][c] + c_[b][a][c]));
  return worst;
}

double StructureConstants::reality_violation() const noexcept {
  double worst = 0.0;
  for (int a = 0; a < 4; ++a)
    for (int b = 0; b < 4; ++b)
      for (int c = 0; c < 4; ++c)
        worst = std::max(worst, std::abs(std::conj(c_[a][b][c]) - c_[bar(a)][bar(b)][bar(c)]));
  return worst;
}

double StructureConstants::integrability_violation() const noexcept {
  double worst = 0.0;
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j)
      for (int k = 2; k < 4; ++k) worst = std::max(worst, std::abs(c_[i][j][k]));
  return worst;
}

double StructureConstants::jacobi_violation() const noexcept {
  double worst = 0.0;
  for (int a = 0; a < 4; ++a)
    for (int b = 0; b < 4; ++b)
      for (int c = 0; c < 4; ++c)
        for (int out = 0; out < 4; ++out) {
          cplx s{};
          for (int e = 0; e < 4; ++e) {
            s += c_[a][b][e] * c_[e][c][out];
            s += c_[b][c][e] * c_[e][a][out];
            s += c_[c][a][e] * c_[e][b][out];
          }
          worst = std::max(worst, std::abs(s));
        }
  return worst;
}

Christoffels christoffels(const StructureConstants& mu, const HermitianMetric& g) {
  return christoffels_impl(mu, make_frame(g));
}

Torsion torsion(const StructureConstants& mu, const HermitianMetric& g) {
  return torsion_impl(mu, make_frame(g));
}

Mat2 second_chern_ricci(const StructureConstants& mu, const HermitianMetric& g) {
  return ricci_impl(mu, make_frame(g));
}

QuadraticTerms quadratic_terms(const StructureConstants& mu, const HermitianMetric& g) {
  const Frame f = make_frame(g);
  return quadratic_impl(torsion_impl(mu, f), f);
}

Mat2 assemble_q(const QuadraticTerms& q) noexcept {
  Mat2 r{};
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j)
      r[i][j] = 0.5 * q.q1[i][j] - 0.25 * q.q2[i][j] - 0.5 * q.q3[i][j] + q.q4[i][j];
  return r;
}

Mat2 hcf_tensor(const StructureConstants& mu, const HermitianMetric& g) {
  const Frame f = make_frame(g);
  return sub(ricci_impl(mu, f), assemble_q(quadratic_impl(torsion_impl(mu, f), f)));
}

CurvatureBundle curvature_bundle(const StructureConstants& mu, const HermitianMetric& g) {
  const Frame f = make_frame(g);
  CurvatureBundle out;
  out.gamma = christoffels_impl(mu, f);
  out.torsion = torsion_impl(mu, f);
  out.s = ricci_impl(mu, f);
  out.q = quadratic_impl(out.torsion, f);
  out.q_total = assemble_q(out.q);
  out.k = sub(out.s, out.q_total);
  return out;
}

Herm2 to_herm(const Mat2& m) noexcept {
  return {m[0][0].real(), m[1][1].real(), m[0][1]};
}

double hermiticity_defect(const Mat2& m) noexcept {
  return std::max({std::abs(m[0][1] - std::conj(m[1][0])), std::abs(m[0][0].imag()),
                   std::abs(m[1][1].imag())});
}

namespace reference {

Torsion torsion_from_christoffels(const StructureConstants& mu, const HermitianMetric& g) {
  const Frame f = make_frame(g);
  const Christoffels c = christoffels_impl(mu, f);
  Torsion t{};
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j) {
      std::array<cplx, 2> upper{};
      for (int s = 0; s < 2; ++s)
        upper[s] = c.hol[i][j][s] - c.hol[j][i][s] - mu(i, j, s);
      for (int k = 0; k < 2; ++k)
        t[i][j][k] = upper[0] * f.g[0][k] + upper[1] * f.g[1][k];
    }
  return t;
}

Mat2 second_chern_ricci_from_christoffels(const StructureConstants& mu,
                                          const HermitianMetric& g) {
  const Frame f = make_frame(g);
  const Christoffels c = christoffels_impl(mu, f);
  Mat2 out{};
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j) {
      cplx acc{};
      for (int l = 0; l < 2; ++l)
        for (int k = 0; k < 2; ++k)
          for (int p = 0; p < 2; ++p) {
            cplx inner{};
            for (int r = 0; r < 2; ++r) {
              inner += mu(bar(l), i, r) * c.hol[k][r][p];
              inner -= mu(bar(l), r, p) * c.hol[k][i][r];
              inner -= mu(k, bar(l), r) * c.hol[r][i][p];
              inner -= mu(k, bar(l), bar(r)) * mu(bar(r), i, p);
            }
            acc += f.h[k][l] * f.g[p][j] * inner;
          }
      out[i][j] = acc;
    }
  return out;
}

QuadraticTerms quadratic_terms_expanded(const StructureConstants& mu,
                                        const HermitianMetric& gm) {
  const Frame f = make_frame(gm);
  const auto& g = f.g;
  // (1,0)-type factor with lower indices (i, k, qb)
  auto hol = [&](int i, int k, int q) {
    cplx s{};
    for (int a = 0; a < 2; ++a)
      s += g[k][a] * mu(bar(q), i, bar(a)) - g[i][a] * mu(bar(q), k, bar(a));
    for (int v = 0; v < 2; ++v) s -= g[v][q] * mu(i, k, v);
    return s;
  };
  // (0,1)-type factor with lower indices (jb, lb, m)
  auto anti = [&](int j, int l, int m) {
    cplx s{};
    for (int b = 0; b < 2; ++b)
      s += g[b][l] * mu(m, bar(j), b) - g[b][j] * mu(m, bar(l), b);
    for (int r = 0; r < 2; ++r) s -= g[m][r] * mu(bar(j), bar(l), bar(r));
    return s;
  };

  QuadraticTerms q;
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j) {
      cplx q1{}, q2{}, q3{}, q4{};
      for (int l = 0; l < 2; ++l)
        for (int k = 0; k < 2; ++k)
          for (int qq = 0; qq < 2; ++qq)
            for (int m = 0; m < 2; ++m) {
              const cplx w = f.h[k][l] * f.h[m][qq];
              q1 += w * hol(i, k, qq) * anti(j, l, m);
              q2 += w * hol(k, m, j) * anti(l, qq, i);
              q3 += w * hol(i, k, l) * anti(j, qq, m);
              q4 += 0.5 * w * (hol(m, k, l) * anti(qq, j, i) + anti(qq, l, k) * hol(m, i, j));
            }
      q.q1[i][j] = q1;
      q.q2[i][j] = q2;
      q.q3[i][j] = q3;
      q.q4[i][j] = q4;
    }
  return q;
}

}  // namespace reference

}  // namespace hcf
