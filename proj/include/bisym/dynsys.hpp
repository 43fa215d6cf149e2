#pragma once

#include <string>
#include <vector>

#include "bisym/rmatrix.hpp"
#include "bisym/symplectic.hpp"

namespace bisym {

/// S-functions on a phase space whose brackets should realize `target`.
struct DynamicalSystem {
  PoissonField phase;
  std::vector<Expr> S;
  StructureConstants target;
};

/// {S^i,S^j} - t^{ij}_k S^k for i<j, with t already evaluated.
inline std::vector<Expr> symmetry_expressions(const PoissonField& phase, const std::vector<Expr>& S,
                                              const Constants& target) {
  std::size_t n = S.size();
  if (target.dim() != n) throw DimensionError("S list and target constants differ in size");
  std::vector<std::vector<Expr>> g;
  for (const auto& s : S) g.push_back(gradient(s, phase.coords));
  std::vector<Expr> out;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j) {
      Expr e = bracket_from_gradients(phase.P, g[i], g[j]);
      for (std::size_t k = 0; k < n; ++k)
        if (target(i, j, k) != 0) e -= Expr(target(i, j, k)) * S[k];
      out.push_back(e);
    }
  return out;
}

inline IdentityResult symmetry_residual(const PoissonField& phase, const std::vector<Expr>& S,
                                        const Constants& target, const SamplingConfig& cfg,
                                        const ExactAssignment& params = {}) {
  return equiv_zero_all(symmetry_expressions(phase, S, target), cfg, params);
}

inline IdentityResult symmetry_residual(const DynamicalSystem& sys, const SamplingConfig& cfg,
                                        const ExactAssignment& params) {
  return symmetry_residual(sys.phase, sys.S, sys.target.evaluate(params), cfg, params);
}

struct BracketCheck {
  std::size_t i, j;
  int expected;
  IdentityResult result;
};

struct DarbouxReport {
  std::vector<BracketCheck> brackets;
  std::vector<BracketCheck> failures() const {
    std::vector<BracketCheck> out;
    for (const auto& b : brackets)
      if (!b.result.holds) out.push_back(b);
    return out;
  }
  bool passed() const { return failures().empty(); }
  double max_residual() const {
    double m = 0;
    for (const auto& b : brackets) m = std::max(m, b.result.max_residual);
    return m;
  }
};

/// Pairing (z_i, z_{n+i}) with bracket +1, everything else 0.
inline DarbouxReport check_darboux(const PoissonField& phase, const std::vector<Expr>& z,
                                   const SamplingConfig& cfg, const ExactAssignment& params = {}) {
  std::size_t m = z.size(), h = m / 2;
  if (m != phase.dim()) throw DimensionError("chart size differs from phase space");
  std::vector<std::vector<Expr>> g;
  for (const auto& e : z) g.push_back(gradient(e, phase.coords));
  DarbouxReport rep;
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t j = i + 1; j < m; ++j) {
      int expected = j == i + h ? 1 : 0;
      Expr e = bracket_from_gradients(phase.P, g[i], g[j]) - Expr(expected);
      rep.brackets.push_back({i, j, expected, equiv_zero(e, cfg, params)});
    }
  return rep;
}

/// Q = Σ S_i r^{ij} rho_j
inline Matrix<Expr> build_Q(const std::vector<Expr>& S, const Matrix<Expr>& r,
                            const std::vector<Matrix<Expr>>& rho) {
  std::size_t n = S.size();
  if (r.rows() != n || rho.size() != n) throw DimensionError("S, r and representation sizes differ");
  std::size_t m = rho.front().rows();
  Matrix<Expr> Q(m, m);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) {
      if (r(i, j).is_zero()) continue;
      Expr c = S[i] * r(i, j);
      for (std::size_t a = 0; a < m; ++a)
        for (std::size_t b = 0; b < m; ++b)
          if (!rho[j](a, b).is_zero()) Q(a, b) += c * rho[j](a, b);
    }
  return Q;
}

template <class T>
Matrix<T> kron(const Matrix<T>& a, const Matrix<T>& b) {
  Matrix<T> k(a.rows() * b.rows(), a.cols() * b.cols());
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < a.cols(); ++j) {
      if (is_zero_entry(a(i, j))) continue;
      for (std::size_t p = 0; p < b.rows(); ++p)
        for (std::size_t q = 0; q < b.cols(); ++q)
          if (!is_zero_entry(b(p, q))) k(i * b.rows() + p, j * b.cols() + q) = a(i, j) * b(p, q);
    }
  return k;
}

/// Entries of {Q ⊗, Q} + [Q⊗1 + 1⊗Q, R], R = Σ r^{ij} rho_i⊗rho_j.
/// {Q ⊗, Q} sits at row A·m+C, column B·m+D with value {Q_AB, Q_CD}.
inline std::vector<Expr> sts_expressions(const Matrix<Expr>& Q, const Matrix<Expr>& r,
                                         const std::vector<Matrix<Expr>>& rho, const PoissonField& phase) {
  std::size_t m = Q.rows(), n = rho.size(), mm = m * m;
  Matrix<Expr> R(mm, mm);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      if (!r(i, j).is_zero()) R = R + scaled(kron(rho[i], rho[j]), r(i, j));
  Matrix<Expr> I = Matrix<Expr>::identity(m);
  Matrix<Expr> M = kron(Q, I) + kron(I, Q);
  Matrix<Expr> comm = M * R - R * M;
  std::vector<std::vector<Expr>> g(mm);
  for (std::size_t a = 0; a < m; ++a)
    for (std::size_t b = 0; b < m; ++b) g[a * m + b] = gradient(Q(a, b), phase.coords);
  std::vector<Expr> out;
  for (std::size_t A = 0; A < m; ++A)
    for (std::size_t C = 0; C < m; ++C)
      for (std::size_t B = 0; B < m; ++B)
        for (std::size_t D = 0; D < m; ++D) {
          Expr br = bracket_from_gradients(phase.P, g[A * m + B], g[C * m + D]);
          out.push_back(br + comm(A * m + C, B * m + D));
        }
  return out;
}

inline IdentityResult sts_residual(const Matrix<Expr>& Q, const Matrix<Expr>& r,
                                   const std::vector<Matrix<Expr>>& rho, const PoissonField& phase,
                                   const SamplingConfig& cfg, const ExactAssignment& params = {}) {
  return equiv_zero_all(sts_expressions(Q, r, rho, phase), cfg, params);
}

inline Expr trace(const Matrix<Expr>& m) {
  Expr t(0);
  for (std::size_t i = 0; i < m.rows(); ++i) t += m(i, i);
  return t;
}

/// I_k = tr(Q^k), k = 1..kmax.
inline std::vector<Expr> invariants(const Matrix<Expr>& Q, int kmax = 3) {
  if (kmax < 1) throw std::invalid_argument("kmax must be at least 1");
  std::vector<Expr> out;
  Matrix<Expr> p = Q;
  for (int k = 1; k <= kmax; ++k) {
    if (k > 1) p = p * Q;
    out.push_back(trace(p));
  }
  return out;
}

struct InvolutionReport {
  Matrix<int> commute;  // 1 where {F_a, F_b} passes equiv_zero
  Matrix<double> residual;
  bool all() const {
    for (std::size_t i = 0; i < commute.rows(); ++i)
      for (std::size_t j = 0; j < commute.cols(); ++j)
        if (!commute(i, j)) return false;
    return true;
  }
};

inline InvolutionReport involution_check(const PoissonField& phase, const std::vector<Expr>& F,
                                         const SamplingConfig& cfg, const ExactAssignment& params = {}) {
  std::size_t k = F.size();
  InvolutionReport rep{Matrix<int>(k, k, 1), Matrix<double>(k, k, 0.0)};
  std::vector<std::vector<Expr>> g;
  for (const auto& f : F) g.push_back(gradient(f, phase.coords));
  for (std::size_t a = 0; a < k; ++a)
    for (std::size_t b = a + 1; b < k; ++b) {
      IdentityResult r = equiv_zero(bracket_from_gradients(phase.P, g[a], g[b]), cfg, params);
      rep.commute(a, b) = rep.commute(b, a) = r.holds ? 1 : 0;
      rep.residual(a, b) = rep.residual(b, a) = r.max_residual;
    }
  return rep;
}

/// Maximal subsets (size >= 2) whose members pairwise commute, zero-based,
/// in lexicographic order.
inline std::vector<std::vector<std::size_t>> maximal_involutive_subsets(const Matrix<int>& commute) {
  std::size_t k = commute.rows();
  std::vector<std::vector<std::size_t>> good;
  for (unsigned long mask = 1; mask < (1UL << k); ++mask) {
    std::vector<std::size_t> s;
    for (std::size_t i = 0; i < k; ++i)
      if (mask & (1UL << i)) s.push_back(i);
    if (s.size() < 2) continue;
    bool ok = true;
    for (std::size_t a = 0; a < s.size() && ok; ++a)
      for (std::size_t b = a + 1; b < s.size() && ok; ++b) ok = commute(s[a], s[b]) != 0;
    if (ok) good.push_back(s);
  }
  std::vector<std::vector<std::size_t>> out;
  for (const auto& s : good) {
    bool maximal = true;
    for (const auto& t : good)
      if (t.size() > s.size() && std::includes(t.begin(), t.end(), s.begin(), s.end())) maximal = false;
    if (maximal) out.push_back(s);
  }
  std::sort(out.begin(), out.end());
  return out;
}

inline std::vector<std::vector<std::size_t>> find_involutive_pairs(const PoissonField& phase,
                                                                   const std::vector<Expr>& S,
                                                                   const SamplingConfig& cfg,
                                                                   const ExactAssignment& params = {}) {
  return maximal_involutive_subsets(involution_check(phase, S, cfg, params).commute);
}

/// Smallest rank of [∂F_a/∂x^i] over `points` sampled points.
inline std::size_t jacobian_rank(const std::vector<Expr>& F, const std::vector<Symbol>& coords,
                                 const SamplingConfig& cfg, const ExactAssignment& params = {},
                                 int points = 5) {
  std::vector<std::vector<Expr>> g;
  for (const auto& f : F) g.push_back(gradient(f, coords));
  PointSampler sampler(cfg);
  std::vector<Symbol> syms = coords;
  for (const auto& s : free_symbols(F))
    if (s.kind == SymbolKind::parameter) syms.push_back(s);
  std::size_t best = F.size();
  int done = 0;
  for (std::uint64_t t = 0; done < points && t < static_cast<std::uint64_t>(points) * 10; ++t) {
    Assignment p = to_double(sampler.sample(syms, params, 1000 + t));
    Matrix<double> J(F.size(), coords.size());
    try {
      for (std::size_t a = 0; a < F.size(); ++a)
        for (std::size_t i = 0; i < coords.size(); ++i) J(a, i) = eval(g[a][i], p, cfg.den_guard);
    } catch (const SingularPointError&) {
      continue;
    }
    ++done;
    best = std::min(best, rank(J, 1e-9));
  }
  if (done == 0) throw InconclusiveError("no nonsingular point for the Jacobian rank");
  return best;
}

}  // namespace bisym
