#pragma once

#include <stdexcept>
#include <tuple>
#include <vector>

#include "bisym/liealg.hpp"
#include "bisym/sampling.hpp"

namespace bisym {

struct ClosureReport {
  // dω(X_i,X_j,X_k) = -(f_{ij}^l ω_lk + f_{jk}^l ω_li + f_{ki}^l ω_lj); decides closedness.
  ExactResidual exterior;
  // f_{ij}^l ω_lk + f_{ik}^l ω_lj + f_{jk}^l ω_li as printed in the source formula.
  ExactResidual literal;
  bool closed() const { return exterior.zero(); }
  bool forms_disagree() const { return exterior.zero() != literal.zero(); }
};

/// Both sums over i<j<k.
inline ClosureReport closure_residual(const Matrix<Rational>& w, const Constants& f) {
  std::size_t n = f.dim();
  if (w.rows() != n) throw DimensionError("symplectic form size differs from algebra");
  ClosureReport rep;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j)
      for (std::size_t k = j + 1; k < n; ++k) {
        Rational cyc(0), lit(0);
        for (std::size_t l = 0; l < n; ++l) {
          cyc += f(i, j, l) * w(l, k) + f(j, k, l) * w(l, i) + f(k, i, l) * w(l, j);
          lit += f(i, j, l) * w(l, k) + f(i, k, l) * w(l, j) + f(j, k, l) * w(l, i);
        }
        rep.exterior.note(cyc, {i, j, k});
        rep.literal.note(lit, {i, j, k});
      }
  return rep;
}

inline Matrix<Rational> skew_from_upper(std::size_t n,
                                        const std::vector<std::tuple<std::size_t, std::size_t, Rational>>& upper) {
  Matrix<Rational> m(n, n);
  for (const auto& [i, j, v] : upper) {
    if (i >= n || j >= n || i == j) throw DimensionError("bad skew-matrix entry index");
    m(i, j) = v;
    m(j, i) = -v;
  }
  return m;
}

/// P with ω·P = 1.
inline Matrix<Rational> invert_omega(const Matrix<Rational>& w) {
  for (std::size_t i = 0; i < w.rows(); ++i)
    for (std::size_t j = 0; j < w.cols(); ++j)
      if (w(i, j) != -w(j, i)) throw std::invalid_argument("symplectic form is not skew");
  return inverse(w);
}

/// Skew matrix of expressions over ordered coordinates.
struct PoissonField {
  std::vector<Symbol> coords;
  Matrix<Expr> P;

  std::size_t dim() const { return coords.size(); }

  static PoissonField from_upper(std::vector<Symbol> coords,
                                 const std::vector<std::tuple<std::size_t, std::size_t, Expr>>& upper) {
    std::size_t n = coords.size();
    PoissonField pf{std::move(coords), Matrix<Expr>(n, n)};
    for (const auto& [i, j, e] : upper) {
      if (i >= n || j >= n || i == j) throw DimensionError("bad Poisson entry index");
      pf.P(i, j) = e;
      pf.P(j, i) = -e;
    }
    return pf;
  }

  /// Constant field from a rational matrix.
  static PoissonField constant(std::vector<Symbol> coords, const Matrix<Rational>& P) {
    PoissonField pf{std::move(coords), P.map([](const Rational& v) { return Expr(v); })};
    return pf;
  }

  static PoissonField canonical(std::vector<Symbol> coords) {
    std::size_t n = coords.size(), h = n / 2;
    PoissonField pf{std::move(coords), Matrix<Expr>(n, n)};
    for (std::size_t i = 0; i < h; ++i) {
      pf.P(i, h + i) = Expr(1);
      pf.P(h + i, i) = Expr(-1);
    }
    return pf;
  }
};

inline Expr bracket_from_gradients(const Matrix<Expr>& P, const std::vector<Expr>& gf,
                                   const std::vector<Expr>& gg) {
  Expr acc(0);
  for (std::size_t i = 0; i < gf.size(); ++i) {
    if (gf[i].is_zero()) continue;
    for (std::size_t j = 0; j < gg.size(); ++j) {
      if (gg[j].is_zero() || P(i, j).is_zero()) continue;
      acc += P(i, j) * gf[i] * gg[j];
    }
  }
  return acc;
}

/// {f,g} = P^{ij} ∂_i f ∂_j g
inline Expr poisson_bracket(const PoissonField& pf, const Expr& f, const Expr& g) {
  return bracket_from_gradients(pf.P, gradient(f, pf.coords), gradient(g, pf.coords));
}

inline IdentityResult skew_residual(const PoissonField& pf, const SamplingConfig& cfg,
                                    const ExactAssignment& fixed = {}) {
  std::vector<Expr> es;
  for (std::size_t i = 0; i < pf.dim(); ++i)
    for (std::size_t j = i; j < pf.dim(); ++j) es.push_back(pf.P(i, j) + pf.P(j, i));
  return equiv_zero_all(es, cfg, fixed);
}

/// Σ_l P^{il} ∂_l P^{jk} + cyclic, for i<j<k.
inline std::vector<Expr> jacobi_field_expressions(const PoissonField& pf) {
  std::size_t n = pf.dim();
  std::vector<std::vector<std::vector<Expr>>> g(n, std::vector<std::vector<Expr>>(n));
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) g[i][j] = gradient(pf.P(i, j), pf.coords);
  auto term = [&](std::size_t a, std::size_t b, std::size_t c) {
    Expr acc(0);
    for (std::size_t l = 0; l < n; ++l)
      if (!pf.P(a, l).is_zero() && !g[b][c][l].is_zero()) acc += pf.P(a, l) * g[b][c][l];
    return acc;
  };
  std::vector<Expr> out;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j)
      for (std::size_t k = j + 1; k < n; ++k) out.push_back(term(i, j, k) + term(j, k, i) + term(k, i, j));
  return out;
}

inline IdentityResult jacobi_residual_field(const PoissonField& pf, const SamplingConfig& cfg,
                                            const ExactAssignment& fixed = {}) {
  std::vector<Expr> es = jacobi_field_expressions(pf);
  if (es.empty()) return {};
  return equiv_zero_all(es, cfg, fixed);
}

/// Largest |P^{ij}| at the point where every coordinate equals `eps`.
inline double identity_magnitude(const PoissonField& pf, const Assignment& params, double eps = 1e-9) {
  Assignment a = params;
  for (const auto& s : pf.coords) a[s.name] = eps;
  double m = 0;
  for (std::size_t i = 0; i < pf.dim(); ++i)
    for (std::size_t j = i + 1; j < pf.dim(); ++j)
      m = std::max(m, std::fabs(eval(pf.P(i, j), a, 1e-300)));
  return m;
}

struct Vielbein {
  Matrix<Expr> e;     // e(i, j)
  Matrix<Expr> einv;  // einv(k, j), with Σ_j e(i,j) einv(k,j) = δ_ik
};

inline IdentityResult check_vielbein(const Vielbein& vb, const SamplingConfig& cfg,
                                     const ExactAssignment& fixed = {}) {
  std::size_t n = vb.e.rows();
  std::vector<Expr> es;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t k = 0; k < n; ++k) {
      Expr s = Expr(i == k ? -1 : 0);
      for (std::size_t j = 0; j < n; ++j) s += vb.e(i, j) * vb.einv(k, j);
      es.push_back(s);
    }
  return equiv_zero_all(es, cfg, fixed);
}

struct VielbeinError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// P^{ij}(x) = e(i,k) e(j,l) P^{kl}.
inline PoissonField push_poisson(const Vielbein& vb, const Matrix<Rational>& P, std::vector<Symbol> coords,
                                 const SamplingConfig& cfg, const ExactAssignment& fixed = {}) {
  std::size_t n = P.rows();
  if (vb.e.rows() != n || coords.size() != n) throw DimensionError("vielbein size mismatch");
  IdentityResult ok = check_vielbein(vb, cfg, fixed);
  if (!ok.holds) throw VielbeinError("vielbein and its inverse do not compose to the identity");
  PoissonField pf{std::move(coords), Matrix<Expr>(n, n)};
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) {
      Expr acc(0);
      for (std::size_t k = 0; k < n; ++k)
        for (std::size_t l = 0; l < n; ++l)
          if (P(k, l) != 0) acc += vb.e(i, k) * vb.e(j, l) * Expr(P(k, l));
      pf.P(i, j) = acc;
    }
  return pf;
}

}  // namespace bisym
