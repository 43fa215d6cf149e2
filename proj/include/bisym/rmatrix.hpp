#pragma once

#include <vector>

#include "bisym/liealg.hpp"

namespace bisym {

/// r^{ij} on g (upper) or r̃_{ij} on the dual (lower); the tag is metadata only.
enum class Variance { upper, lower };

struct WedgeTerm {
  std::size_t i, j;  // zero-based
  Expr coefficient;
};

struct RMatrix {
  Matrix<Expr> r;
  Variance variance = Variance::upper;

  std::size_t dim() const { return r.rows(); }

  /// X∧Y = X⊗Y - Y⊗X, so c X_i∧X_j puts c at (i,j) and -c at (j,i).
  static RMatrix from_wedges(std::size_t dim, const std::vector<WedgeTerm>& terms,
                             Variance v = Variance::upper) {
    RMatrix m{Matrix<Expr>(dim, dim), v};
    for (const auto& t : terms) {
      if (t.i >= dim || t.j >= dim) throw DimensionError("wedge index out of range");
      m.r(t.i, t.j) += t.coefficient;
      m.r(t.j, t.i) -= t.coefficient;
    }
    return m;
  }

  Matrix<Rational> evaluate(const ExactAssignment& params) const {
    return r.map([&](const Expr& e) { return eval_exact(e, params); });
  }
};

inline ExactResidual check_skew(const Matrix<Rational>& r) {
  ExactResidual res;
  for (std::size_t i = 0; i < r.rows(); ++i)
    for (std::size_t j = i; j < r.cols(); ++j) res.note(r(i, j) + r(j, i), {i, j});
  return res;
}

/// residual(m,j,l) = r^{ij} r^{kl} f_{ik}^m + r^{mi} r^{kl} f_{ik}^j + r^{mi} r^{jk} f_{ik}^l
inline Constants cybe_tensor(const Matrix<Rational>& r, const Constants& f) {
  std::size_t n = f.dim();
  if (r.rows() != n) throw DimensionError("r-matrix size differs from algebra");
  Constants res(n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t k = 0; k < n; ++k)
      for (std::size_t o = 0; o < n; ++o) {
        const Rational& c = f(i, k, o);
        if (c == 0) continue;
        for (std::size_t a = 0; a < n; ++a)
          for (std::size_t b = 0; b < n; ++b) {
            // term 1: m = o, j = a, l = b
            if (r(i, a) != 0 && r(k, b) != 0) res(o, a, b) += r(i, a) * r(k, b) * c;
            // term 2: j = o, m = a, l = b
            if (r(a, i) != 0 && r(k, b) != 0) res(a, o, b) += r(a, i) * r(k, b) * c;
            // term 3: l = o, m = a, j = b
            if (r(a, i) != 0 && r(b, k) != 0) res(a, b, o) += r(a, i) * r(b, k) * c;
          }
      }
  return res;
}

inline ExactResidual cybe_residual(const Matrix<Rational>& r, const Constants& f) {
  Constants t = cybe_tensor(r, f);
  ExactResidual res;
  std::size_t n = f.dim();
  for (std::size_t m = 0; m < n; ++m)
    for (std::size_t j = 0; j < n; ++j)
      for (std::size_t l = 0; l < n; ++l) res.note(t(m, j, l), {m, j, l});
  return res;
}

/// r̃_{ij} = (C^{-1})_{ki} r^{kl} (C^{-1})_{lj}, i.e. C^{-T} r C^{-1}.
inline Matrix<Rational> transform_r(const Matrix<Rational>& C, const Matrix<Rational>& r) {
  Matrix<Rational> Ci = inverse(C);
  return Ci.transpose() * r * Ci;
}

}  // namespace bisym
