#pragma once

#include <array>
#include <optional>
#include <string>
#include <tuple>
#include <vector>

#include "bisym/eval.hpp"
#include "bisym/matrix.hpp"

namespace bisym {

/// Dense rank-3 array; t(i, j, k) holds f_{ij}^k (or f̃^{ij}_k for a dual).
template <class T>
class Tensor3 {
 public:
  Tensor3() = default;
  explicit Tensor3(std::size_t n, const T& fill = T(0)) : n_(n), data_(n * n * n, fill) {}

  std::size_t dim() const { return n_; }
  T& operator()(std::size_t i, std::size_t j, std::size_t k) { return data_[(i * n_ + j) * n_ + k]; }
  const T& operator()(std::size_t i, std::size_t j, std::size_t k) const {
    return data_[(i * n_ + j) * n_ + k];
  }

  friend bool operator==(const Tensor3& a, const Tensor3& b) = default;

 private:
  std::size_t n_ = 0;
  std::vector<T> data_;
};

using Constants = Tensor3<Rational>;

struct SparseEntry {
  std::size_t i, j, k;  // zero-based
  Expr value;
};

/// Structure constants with parameter-only entries.
class StructureConstants {
 public:
  StructureConstants() = default;
  explicit StructureConstants(std::size_t dim) : f_(dim) {}

  /// Fills f(i,j,k) and its antisymmetric partner f(j,i,k).
  static StructureConstants from_sparse(std::size_t dim, const std::vector<SparseEntry>& entries) {
    StructureConstants s(dim);
    for (const auto& e : entries) {
      if (e.i >= dim || e.j >= dim || e.k >= dim) throw DimensionError("structure constant index out of range");
      if (e.i == e.j) throw std::invalid_argument("diagonal structure constant");
      s.f_(e.i, e.j, e.k) = e.value;
      s.f_(e.j, e.i, e.k) = -e.value;
    }
    return s;
  }

  std::size_t dim() const { return f_.dim(); }
  const Expr& operator()(std::size_t i, std::size_t j, std::size_t k) const { return f_(i, j, k); }
  Expr& at(std::size_t i, std::size_t j, std::size_t k) { return f_(i, j, k); }

  Constants evaluate(const ExactAssignment& params) const {
    std::size_t n = dim();
    Constants c(n);
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j)
        for (std::size_t k = 0; k < n; ++k)
          if (!f_(i, j, k).is_zero()) c(i, j, k) = eval_exact(f_(i, j, k), params);
    return c;
  }

  std::vector<Symbol> parameters() const {
    std::vector<Expr> all;
    std::size_t n = dim();
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j)
        for (std::size_t k = 0; k < n; ++k)
          if (!f_(i, j, k).is_constant()) all.push_back(f_(i, j, k));
    std::map<std::string, Symbol> m;
    for (const auto& e : all)
      for (const auto& s : free_symbols(e)) m.emplace(s.name, s);
    std::vector<Symbol> out;
    for (auto& [_, s] : m) out.push_back(s);
    return out;
  }

 private:
  Tensor3<Expr> f_;
};

/// Largest exact violation and where it happened (zero-based indices).
struct ExactResidual {
  Rational max_abs{0};
  std::vector<std::size_t> witness;

  bool zero() const { return max_abs == 0; }
  void note(const Rational& v, std::vector<std::size_t> idx) {
    Rational a = abs(v);
    if (a > max_abs) {
      max_abs = a;
      witness = std::move(idx);
    }
  }
  void merge(const ExactResidual& o) {
    if (o.max_abs > max_abs) *this = o;
  }
};

inline ExactResidual check_antisymmetry(const Constants& f) {
  ExactResidual r;
  std::size_t n = f.dim();
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i; j < n; ++j)
      for (std::size_t k = 0; k < n; ++k) r.note(f(i, j, k) + f(j, i, k), {i, j, k});
  return r;
}

/// f_{ij}^l f_{lk}^m + f_{jk}^l f_{li}^m + f_{ki}^l f_{lj}^m over all (i,j,k,m).
inline ExactResidual check_jacobi(const Constants& f) {
  ExactResidual r;
  std::size_t n = f.dim();
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      for (std::size_t k = 0; k < n; ++k)
        for (std::size_t m = 0; m < n; ++m) {
          Rational s(0);
          for (std::size_t l = 0; l < n; ++l) {
            if (f(i, j, l) != 0) s += f(i, j, l) * f(l, k, m);
            if (f(j, k, l) != 0) s += f(j, k, l) * f(l, i, m);
            if (f(k, i, l) != 0) s += f(k, i, l) * f(l, j, m);
          }
          r.note(s, {i, j, k, m});
        }
  return r;
}

enum class MixedSign { standard, opposite };

/// Basis X_1..X_n, X̃^1..X̃^n. Mixed bracket
/// [X_i, X̃^j] = f̃^{jk}_i X_k + f_{ki}^j X̃^k (sign flipped as a diagnostic).
inline Constants build_double(const Constants& f, const Constants& ft,
                              MixedSign sign = MixedSign::standard) {
  if (f.dim() != ft.dim()) throw DimensionError("bialgebra dimensions differ");
  std::size_t n = f.dim();
  Constants d(2 * n);
  Rational s = sign == MixedSign::standard ? Rational(1) : Rational(-1);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      for (std::size_t k = 0; k < n; ++k) {
        d(i, j, k) = f(i, j, k);
        d(n + i, n + j, n + k) = ft(i, j, k);
        d(i, n + j, k) = s * ft(j, k, i);
        d(i, n + j, n + k) = s * f(k, i, j);
        d(n + j, i, k) = -d(i, n + j, k);
        d(n + j, i, n + k) = -d(i, n + j, n + k);
      }
  return d;
}

/// <X_i, X̃^j> = δ, blocks isotropic; checks <[Z,U],V> + <U,[Z,V]> = 0.
inline ExactResidual check_ad_invariance(const Constants& d) {
  std::size_t big = d.dim(), n = big / 2;
  auto form = [n](std::size_t a, std::size_t b) {
    if (a < n && b >= n) return b - n == a ? 1 : 0;
    if (b < n && a >= n) return a - n == b ? 1 : 0;
    return 0;
  };
  ExactResidual r;
  for (std::size_t z = 0; z < big; ++z)
    for (std::size_t u = 0; u < big; ++u)
      for (std::size_t v = 0; v < big; ++v) {
        Rational s(0);
        for (std::size_t w = 0; w < big; ++w) {
          if (form(w, v)) s += d(z, u, w);
          if (form(u, w)) s += d(z, v, w);
        }
        r.note(s, {z, u, v});
      }
  return r;
}

struct ManinReport {
  ExactResidual jacobi;
  ExactResidual ad_invariance;
  bool passed() const { return jacobi.zero() && ad_invariance.zero(); }
};

inline ManinReport verify_manin_triple(const Constants& f, const Constants& ft,
                                       MixedSign sign = MixedSign::standard) {
  Constants d = build_double(f, ft, sign);
  return {check_jacobi(d), check_ad_invariance(d)};
}

/// δ(X_i) = [1⊗X_i + X_i⊗1, r] = r^{ab}([X_i,X_a]⊗X_b + X_a⊗[X_i,X_b]);
/// result(a, b, i) is the coefficient of X_a⊗X_b in δ(X_i).
inline Constants cobracket_from_r(const Matrix<Rational>& r, const Constants& f) {
  std::size_t n = f.dim();
  if (r.rows() != n || r.cols() != n) throw DimensionError("r-matrix size differs from algebra");
  Constants out(n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t a = 0; a < n; ++a)
      for (std::size_t b = 0; b < n; ++b) {
        if (r(a, b) == 0) continue;
        for (std::size_t c = 0; c < n; ++c) {
          out(c, b, i) += r(a, b) * f(i, a, c);
          out(a, c, i) += r(a, b) * f(i, b, c);
        }
      }
  return out;
}

/// C^{il} C^{jm} f_{lm}^s (C^{-1})_{sk}.
inline Constants apply_isomorphism(const Matrix<Rational>& C, const Constants& f) {
  std::size_t n = f.dim();
  if (C.rows() != n || C.cols() != n) throw DimensionError("isomorphism size differs from algebra");
  Matrix<Rational> Ci = inverse(C);
  Constants t(n), out(n);
  // t(i, j, s) = C^{il} C^{jm} f_{lm}^s
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t l = 0; l < n; ++l) {
      if (C(i, l) == 0) continue;
      for (std::size_t j = 0; j < n; ++j)
        for (std::size_t m = 0; m < n; ++m) {
          if (C(j, m) == 0) continue;
          Rational cc = C(i, l) * C(j, m);
          for (std::size_t s = 0; s < n; ++s)
            if (f(l, m, s) != 0) t(i, j, s) += cc * f(l, m, s);
        }
    }
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      for (std::size_t s = 0; s < n; ++s) {
        if (t(i, j, s) == 0) continue;
        for (std::size_t k = 0; k < n; ++k) out(i, j, k) += t(i, j, s) * Ci(s, k);
      }
  return out;
}

/// Matrices rho_1..rho_dim with parameter-only entries.
struct MatrixRep {
  std::vector<Matrix<Expr>> rho;

  std::size_t size() const { return rho.empty() ? 0 : rho.front().rows(); }

  std::vector<Matrix<Rational>> evaluate(const ExactAssignment& params) const {
    std::vector<Matrix<Rational>> out;
    for (const auto& m : rho) out.push_back(m.map([&](const Expr& e) { return eval_exact(e, params); }));
    return out;
  }
};

/// [rho_i, rho_j] - f_{ij}^k rho_k entrywise; witness (i, j, row, col).
inline ExactResidual check_representation(const std::vector<Matrix<Rational>>& rho, const Constants& f) {
  std::size_t n = f.dim();
  if (rho.size() != n) throw DimensionError("representation has wrong number of matrices");
  ExactResidual r;
  if (n == 0) return r;
  std::size_t m = rho.front().rows();
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) {
      Matrix<Rational> c = rho[i] * rho[j] - rho[j] * rho[i];
      for (std::size_t k = 0; k < n; ++k)
        if (f(i, j, k) != 0) c = c - scaled(rho[k], f(i, j, k));
      for (std::size_t a = 0; a < m; ++a)
        for (std::size_t b = 0; b < m; ++b) r.note(c(a, b), {i, j, a, b});
    }
  return r;
}

/// Conjugates a representation of the image algebra back along C:
/// rho(X_j) = sum_i (C^{-1})_{ji} rhot^i.
inline std::vector<Matrix<Rational>> pull_representation(const Matrix<Rational>& C,
                                                         const std::vector<Matrix<Rational>>& rhot) {
  Matrix<Rational> Ci = inverse(C);
  std::size_t n = rhot.size();
  std::vector<Matrix<Rational>> out;
  for (std::size_t j = 0; j < n; ++j) {
    Matrix<Rational> m(rhot.front().rows(), rhot.front().cols());
    for (std::size_t i = 0; i < n; ++i)
      if (Ci(j, i) != 0) m = m + scaled(rhot[i], Ci(j, i));
    out.push_back(m);
  }
  return out;
}

}  // namespace bisym
