#pragma once

#include <optional>
#include <string>
#include <vector>

#include "bisym/dynsys.hpp"

namespace bisym {

/// target^i = exprs[i](source).
struct CoordinateMap {
  std::vector<Symbol> source;
  std::vector<Symbol> target;
  std::vector<Expr> exprs;

  static CoordinateMap identity(const std::vector<Symbol>& from, const std::vector<Symbol>& to) {
    CoordinateMap m{from, to, {}};
    for (const auto& s : from) m.exprs.push_back(Expr::symbol(s));
    return m;
  }

  /// Pulls a function of the target coordinates back to the source.
  Expr pull(const Expr& e) const { return compose(e, target, exprs); }

  std::vector<Expr> pull(const std::vector<Expr>& es) const {
    std::vector<Expr> out;
    for (const auto& e : es) out.push_back(pull(e));
    return out;
  }

  Matrix<Expr> jacobian() const {
    Matrix<Expr> J(exprs.size(), source.size());
    for (std::size_t i = 0; i < exprs.size(); ++i)
      for (std::size_t l = 0; l < source.size(); ++l) J(i, l) = diff(exprs[i], source[l]);
    return J;
  }
};

/// P̃^{lk} ∂x^i/∂y^l ∂x^j/∂y^k - P^{ij}(x(y)) for i<j.
inline std::vector<Expr> phase_exchange_expressions(const CoordinateMap& map, const PoissonField& Pg,
                                                    const PoissonField& Pgt) {
  std::size_t n = map.exprs.size();
  if (Pg.dim() != n || Pgt.dim() != map.source.size()) throw DimensionError("map and fields differ in size");
  Matrix<Expr> J = map.jacobian();
  std::vector<Expr> out;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j) {
      Expr acc(0);
      for (std::size_t l = 0; l < n; ++l) {
        if (J(i, l).is_zero()) continue;
        for (std::size_t k = 0; k < n; ++k)
          if (!J(j, k).is_zero() && !Pgt.P(l, k).is_zero()) acc += Pgt.P(l, k) * J(i, l) * J(j, k);
      }
      out.push_back(acc - map.pull(Pg.P(i, j)));
    }
  return out;
}

inline IdentityResult check_phase_exchange(const CoordinateMap& map, const PoissonField& Pg,
                                           const PoissonField& Pgt, const SamplingConfig& cfg,
                                           const ExactAssignment& params = {}) {
  return equiv_zero_all(phase_exchange_expressions(map, Pg, Pgt), cfg, params);
}

/// S̃_j(y) = (C^{-1})_{jl} S^l(x(y)).
inline std::vector<Expr> transform_dynfuncs(const Matrix<Rational>& C, const std::vector<Expr>& S,
                                            const CoordinateMap& map) {
  Matrix<Rational> Ci = inverse(C);
  std::vector<Expr> pulled = map.pull(S);
  std::vector<Expr> out;
  for (std::size_t j = 0; j < S.size(); ++j) {
    Expr acc(0);
    for (std::size_t l = 0; l < S.size(); ++l)
      if (Ci(j, l) != 0) acc += Expr(Ci(j, l)) * pulled[l];
    out.push_back(acc);
  }
  return out;
}

/// One side of the exchange evaluated at a parameter sample.
struct ExchangeBundle {
  Constants f;   // algebra acting as symmetry of the tilde side
  Constants ft;  // algebra realized by S on G
  Matrix<Rational> C;
  PoissonField Pg, Pgt;
  std::vector<Expr> S;   // over Pg.coords
  std::vector<Expr> St;  // over Pgt.coords
  CoordinateMap map;     // x(y)
  // Representation data for Q; r_tilde is r̃_{ij} on the dual, rep_tilde represents the dual.
  std::optional<Matrix<Rational>> r_tilde;
  std::optional<std::vector<Matrix<Rational>>> rep_tilde;
};

/// Q(x(y)) = S^i(x(y)) r̃_{ij} rhõ^j against Q̃(y) = S̃_i(y) r^{ij} rho_j,
/// with r = C^T r̃ C and rho pulled back along C.
inline std::vector<Expr> transform_Q_expressions(const ExchangeBundle& b) {
  if (!b.r_tilde || !b.rep_tilde) throw std::invalid_argument("bundle has no representation data");
  auto to_expr = [](const Matrix<Rational>& m) { return m.map([](const Rational& v) { return Expr(v); }); };
  Matrix<Rational> r = b.C.transpose() * *b.r_tilde * b.C;
  std::vector<Matrix<Rational>> rho = pull_representation(b.C, *b.rep_tilde);
  std::vector<Matrix<Expr>> rho_e, rhot_e;
  for (const auto& m : rho) rho_e.push_back(to_expr(m));
  for (const auto& m : *b.rep_tilde) rhot_e.push_back(to_expr(m));
  Matrix<Expr> Q = build_Q(b.map.pull(b.S), to_expr(*b.r_tilde), rhot_e);
  Matrix<Expr> Qt = build_Q(b.St, to_expr(r), rho_e);
  std::vector<Expr> out;
  for (std::size_t i = 0; i < Q.rows(); ++i)
    for (std::size_t j = 0; j < Q.cols(); ++j) out.push_back(Q(i, j) - Qt(i, j));
  return out;
}

inline IdentityResult transform_Q(const ExchangeBundle& b, const SamplingConfig& cfg,
                                  const ExactAssignment& params = {}) {
  return equiv_zero_all(transform_Q_expressions(b), cfg, params);
}

struct Theorem1Report {
  IdentityResult phase_exchange;
  IdentityResult tilde_symmetry;        // {S̃_l, S̃_m} = f_{lm}^k S̃_k under P̃
  IdentityResult transformed_functions;  // S̃ from C and the map against the listed S̃
  std::optional<IdentityResult> q_transform;
  bool passed() const {
    return phase_exchange.holds && tilde_symmetry.holds && transformed_functions.holds &&
           (!q_transform || q_transform->holds);
  }
};

inline Theorem1Report verify_theorem1(const ExchangeBundle& b, const SamplingConfig& cfg,
                                      const ExactAssignment& params = {}) {
  Theorem1Report rep;
  rep.phase_exchange = check_phase_exchange(b.map, b.Pg, b.Pgt, cfg, params);
  rep.tilde_symmetry = symmetry_residual(b.Pgt, b.St, b.f, cfg, params);
  std::vector<Expr> computed = transform_dynfuncs(b.C, b.S, b.map);
  std::vector<Expr> diffs;
  for (std::size_t i = 0; i < computed.size(); ++i) diffs.push_back(computed[i] - b.St[i]);
  rep.transformed_functions = equiv_zero_all(diffs, cfg, params);
  if (b.r_tilde && b.rep_tilde) rep.q_transform = transform_Q(b, cfg, params);
  return rep;
}

struct Classification {
  bool bracket_preserving = false;
  bool invariant_mapping = false;
  // coefficients(a, b): invA[a] = Σ_b coefficients(a, b) invB[b]∘zmap, when found exactly
  std::optional<Matrix<Rational>> coefficients;
  IdentityResult bracket_check;
  bool canonical() const { return bracket_preserving && invariant_mapping; }
};

namespace detail {

/// Exact coefficients c with target ≡ Σ c_b basis_b, or nothing.
inline std::optional<std::vector<Rational>> exact_combination(const Expr& target, const std::vector<Expr>& basis,
                                                              const SamplingConfig& cfg,
                                                              const ExactAssignment& params) {
  std::size_t k = basis.size();
  std::vector<Expr> all = basis;
  all.push_back(target);
  std::vector<Symbol> syms = free_symbols(all);
  PointSampler sampler(cfg);
  // collect k rows that give an invertible system
  std::vector<std::vector<Rational>> rows;
  std::vector<Rational> rhs;
  for (std::uint64_t t = 0; t < 200 && rows.size() < k; ++t) {
    ExactAssignment p = sampler.sample(syms, params, 5000 + t);
    std::vector<Rational> row;
    Rational v;
    try {
      for (const auto& b : basis) row.push_back(eval_exact(b, p));
      v = eval_exact(target, p);
    } catch (const SingularPointError&) {
      continue;
    }
    Matrix<Rational> trial(rows.size() + 1, k);
    for (std::size_t i = 0; i < rows.size(); ++i)
      for (std::size_t j = 0; j < k; ++j) trial(i, j) = rows[i][j];
    for (std::size_t j = 0; j < k; ++j) trial(rows.size(), j) = row[j];
    // keep the row only if it raises the rank
    Matrix<Rational> gram = trial * trial.transpose();
    if (determinant(gram) == 0) continue;
    rows.push_back(row);
    rhs.push_back(v);
  }
  if (rows.size() < k) return std::nullopt;
  Matrix<Rational> A(k, k);
  for (std::size_t i = 0; i < k; ++i)
    for (std::size_t j = 0; j < k; ++j) A(i, j) = rows[i][j];
  std::vector<Rational> c = solve(A, rhs);
  Expr check = target;
  for (std::size_t j = 0; j < k; ++j)
    if (c[j] != 0) check -= Expr(c[j]) * basis[j];
  if (!equiv_zero(check, cfg, params).holds) return std::nullopt;
  return c;
}

/// Floating least squares, used when exp keeps the exact route closed.
inline bool numeric_combination(const Expr& target, const std::vector<Expr>& basis, const SamplingConfig& cfg,
                                const ExactAssignment& params) {
  std::size_t k = basis.size();
  std::vector<Expr> all = basis;
  all.push_back(target);
  std::vector<Symbol> syms = free_symbols(all);
  PointSampler sampler(cfg);
  Matrix<double> AtA(k, k, 0.0);
  std::vector<double> Atb(k, 0.0);
  int used = 0;
  for (std::uint64_t t = 0; t < 200 && used < static_cast<int>(3 * k + 5); ++t) {
    Assignment p = to_double(sampler.sample(syms, params, 7000 + t));
    std::vector<double> row;
    double v;
    try {
      for (const auto& b : basis) row.push_back(eval(b, p));
      v = eval(target, p);
    } catch (const SingularPointError&) {
      continue;
    }
    ++used;
    for (std::size_t i = 0; i < k; ++i) {
      Atb[i] += row[i] * v;
      for (std::size_t j = 0; j < k; ++j) AtA(i, j) += row[i] * row[j];
    }
  }
  // Gaussian elimination in doubles
  std::vector<double> c = Atb;
  Matrix<double> A = AtA;
  for (std::size_t col = 0; col < k; ++col) {
    std::size_t p = col;
    for (std::size_t i = col + 1; i < k; ++i)
      if (std::fabs(A(i, col)) > std::fabs(A(p, col))) p = i;
    if (std::fabs(A(p, col)) < 1e-300) return false;
    for (std::size_t j = 0; j < k; ++j) std::swap(A(p, j), A(col, j));
    std::swap(c[p], c[col]);
    for (std::size_t i = 0; i < k; ++i) {
      if (i == col) continue;
      double f = A(i, col) / A(col, col);
      for (std::size_t j = 0; j < k; ++j) A(i, j) -= f * A(col, j);
      c[i] -= f * c[col];
    }
  }
  for (std::size_t i = 0; i < k; ++i) c[i] /= A(i, i);
  Expr check = target;
  for (std::size_t j = 0; j < k; ++j) check -= Expr(Rational(c[j])) * basis[j];
  return equiv_zero(check, cfg, params).holds;
}

}  // namespace detail

/// zmap expresses the B-side Darboux coordinates through the A-side ones.
inline Classification classify_transformation(const CoordinateMap& zmap, const std::vector<Expr>& invA,
                                              const std::vector<Expr>& invB, const PoissonField& phaseA,
                                              const PoissonField& phaseB, const SamplingConfig& cfg,
                                              const ExactAssignment& params = {}) {
  Classification c;
  c.bracket_check = check_phase_exchange(zmap, phaseB, phaseA, cfg, params);
  c.bracket_preserving = c.bracket_check.holds;
  std::vector<Expr> basis = zmap.pull(invB);
  bool exact = !contains_exp(sum_of(basis)) && !std::any_of(invA.begin(), invA.end(), [](const Expr& e) {
    return contains_exp(e);
  });
  c.invariant_mapping = true;
  Matrix<Rational> coeffs(invA.size(), invB.size());
  for (std::size_t a = 0; a < invA.size(); ++a) {
    if (exact) {
      auto sol = detail::exact_combination(invA[a], basis, cfg, params);
      if (!sol) {
        c.invariant_mapping = false;
        break;
      }
      for (std::size_t b = 0; b < basis.size(); ++b) coeffs(a, b) = (*sol)[b];
    } else if (!detail::numeric_combination(invA[a], basis, cfg, params)) {
      c.invariant_mapping = false;
      break;
    }
  }
  if (c.invariant_mapping && exact) c.coefficients = coeffs;
  return c;
}

}  // namespace bisym
