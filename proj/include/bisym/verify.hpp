#pragma once

#include <chrono>
#include <filesystem>
#include <functional>
#include <future>
#include <iomanip>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <nlohmann/json.hpp>

#include "bisym/catalog.hpp"
#include "bisym/flow.hpp"

namespace bisym {

struct CheckResult {
  std::string name;
  std::string status;  // pass, fail, skipped, info
  double max_residual = 0;
  std::string detail;
  std::optional<std::map<std::string, double>> witness;

  bool failed() const { return status == "fail"; }
  friend bool operator==(const CheckResult&, const CheckResult&) = default;
};

struct VerificationReport {
  std::string entry;
  std::string status = "pass";
  std::uint64_t seed = 0;
  int trials = 0;
  double tol_abs = 0, tol_rel = 0;
  std::string mutation;
  std::vector<std::map<std::string, std::string>> parameter_samples;
  std::vector<CheckResult> checks;
  double wall_time = 0;

  bool passed() const { return status == "pass"; }
  const CheckResult* find(const std::string& name) const {
    for (const auto& c : checks)
      if (c.name == name) return &c;
    return nullptr;
  }
  std::vector<std::string> failures() const {
    std::vector<std::string> out;
    for (const auto& c : checks)
      if (c.failed()) out.push_back(c.name);
    return out;
  }
  friend bool operator==(const VerificationReport&, const VerificationReport&) = default;
};

struct LoadFailure {
  std::string file;
  std::string error;
  friend bool operator==(const LoadFailure&, const LoadFailure&) = default;
};

struct SummaryReport {
  std::vector<VerificationReport> entries;
  std::vector<LoadFailure> load_errors;

  std::size_t passed() const {
    return static_cast<std::size_t>(
        std::count_if(entries.begin(), entries.end(), [](const auto& r) { return r.passed(); }));
  }
  bool ok() const { return load_errors.empty() && passed() == entries.size(); }
  friend bool operator==(const SummaryReport&, const SummaryReport&) = default;
};

struct VerifyConfig {
  SamplingConfig sampling;
  int exact_samples = 5;   // parameter samples for the exact checks
  int random_samples = 3;  // parameter samples for the randomized checks
  std::string mutation;    // empty, swap-C-rows, perturb-r, drop-map-term
  bool flows = true;
  double flow_dt = 1e-3;
  double flow_T = 1.0;
  double drift_tol = 1e-6;
  unsigned jobs = 0;  // 0: hardware concurrency
};

inline const std::vector<std::string>& mutation_flags() {
  static const std::vector<std::string> flags{"swap-C-rows", "perturb-r", "drop-map-term"};
  return flags;
}

/// Negative controls; returns false when the flag has nothing to act on.
inline bool apply_mutation(CatalogEntry& e, const std::string& flag) {
  if (flag == "swap-C-rows") {
    if (e.C.rows() < 2) return false;
    for (std::size_t j = 0; j < e.C.cols(); ++j) std::swap(e.C(0, j), e.C(1, j));
    return true;
  }
  if (flag == "perturb-r") {
    if (!e.r || e.r->dim() < 2) return false;
    Expr eps(Rational(1, 7));
    std::size_t n = e.r->dim();
    e.r->r(n - 2, n - 1) += eps;
    e.r->r(n - 1, n - 2) -= eps;
    return true;
  }
  if (flag == "drop-map-term") {
    for (auto& x : e.map.exprs)
      if (x.kind() == NodeKind::sum && x.args().size() > 1) {
        std::vector<Expr> terms(x.args().begin(), x.args().end() - 1);
        x = sum_of(terms);
        return true;
      }
    for (auto& x : e.map.exprs)
      if (!x.is_constant()) {
        x = Expr(0);
        return true;
      }
    return false;
  }
  throw std::invalid_argument("unknown mutation flag '" + flag + "'");
}

namespace detail {

inline std::string exact_witness(const std::vector<std::size_t>& idx) {
  std::string s;
  for (std::size_t k = 0; k < idx.size(); ++k) s += (k ? "," : "") + std::to_string(idx[k] + 1);
  return "(" + s + ")";
}

inline std::map<std::string, double> as_doubles(const ExactAssignment& a) {
  std::map<std::string, double> out;
  for (const auto& [k, v] : a) out[k] = to_double(v);
  return out;
}

inline Matrix<Rational> eval_matrix(const Matrix<Expr>& m, const ExactAssignment& p) {
  return m.map([&](const Expr& e) { return eval_exact(e, p); });
}

inline std::vector<Matrix<Expr>> to_expr(const std::vector<Matrix<Rational>>& ms) {
  std::vector<Matrix<Expr>> out;
  for (const auto& m : ms) out.push_back(m.map([](const Rational& v) { return Expr(v); }));
  return out;
}

/// Accumulates one check over several parameter samples.
class Accumulator {
 public:
  explicit Accumulator(std::string name) { r_.name = std::move(name); r_.status = "pass"; }

  void exact(const ExactResidual& res, const ExactAssignment& params, const std::string& what = {}) {
    double v = to_double(res.max_abs);
    r_.max_residual = std::max(r_.max_residual, v);
    if (!res.zero() && !r_.failed()) {
      r_.status = "fail";
      r_.detail = (what.empty() ? "" : what + " ") + "nonzero at " + exact_witness(res.witness) + " value " +
                  to_string(res.max_abs);
      r_.witness = as_doubles(params);
    }
  }

  void random(const IdentityResult& res) {
    r_.max_residual = std::max(r_.max_residual, res.max_residual);
    points_ += res.points;
    singular_ += res.singular;
    max_ratio_ = std::max(max_ratio_, res.max_ratio);
    if (!res.holds && !r_.failed()) {
      r_.status = "fail";
      if (res.witness) r_.witness = std::map<std::string, double>(res.witness->begin(), res.witness->end());
      r_.detail = "expression " + std::to_string(res.worst_index) + " exceeds tolerance";
    }
  }

  void fail(const std::string& why, std::optional<std::map<std::string, double>> witness = std::nullopt) {
    if (r_.failed()) return;
    r_.status = "fail";
    r_.detail = why;
    r_.witness = std::move(witness);
  }

  void note(const std::string& d) {
    if (!r_.failed()) r_.detail = d;
  }

  CheckResult result() const {
    CheckResult out = r_;
    if (points_ > 0 && !out.failed()) {
      std::ostringstream os;
      os << "points=" << points_ << " singular=" << singular_ << " ratio=" << std::setprecision(3) << max_ratio_;
      out.detail = os.str();
    }
    return out;
  }

 private:
  CheckResult r_;
  int points_ = 0, singular_ = 0;
  double max_ratio_ = 0;
};

inline std::string join_sets(const std::vector<std::vector<std::size_t>>& sets) {
  std::string s;
  for (std::size_t i = 0; i < sets.size(); ++i) {
    s += i ? " {" : "{";
    for (std::size_t k = 0; k < sets[i].size(); ++k) s += (k ? "," : "") + std::to_string(sets[i][k] + 1);
    s += "}";
  }
  return s.empty() ? "{}" : s;
}

/// Default start: every coordinate 1/2; coordinates are bumped to 1 (fewest first)
/// until H, F and the field evaluate.
inline std::optional<std::vector<double>> default_start(const std::vector<Symbol>& coords,
                                                        const std::vector<Expr>& probe, const Assignment& params,
                                                        double den_guard) {
  std::size_t n = coords.size();
  std::vector<unsigned long> masks;
  for (unsigned long m = 0; m < (1UL << n); ++m) masks.push_back(m);
  std::stable_sort(masks.begin(), masks.end(),
                   [](unsigned long a, unsigned long b) { return __builtin_popcountl(a) < __builtin_popcountl(b); });
  for (unsigned long m : masks) {
    std::vector<double> x(n, 0.5);
    Assignment a = params;
    for (std::size_t i = 0; i < n; ++i) {
      if (m & (1UL << i)) x[i] = 1.0;
      a[coords[i].name] = x[i];
    }
    try {
      for (const auto& e : probe) eval(e, a, den_guard);
      return x;
    } catch (const SingularPointError&) {
    }
  }
  return std::nullopt;
}

}  // namespace detail

class EntryVerifier {
 public:
  EntryVerifier(const CatalogEntry& e, const VerifyConfig& cfg) : e_(e), cfg_(cfg) {
    PointSampler sampler(cfg.sampling);
    std::vector<Symbol> ps = e.parameter_symbols();
    int want = ps.empty() ? 1 : std::max(cfg.exact_samples, cfg.random_samples);
    for (int i = 0; i < want; ++i) samples_.push_back(sampler.sample_parameters(ps, static_cast<std::uint64_t>(i)));
  }

  VerificationReport run() {
    auto t0 = std::chrono::steady_clock::now();
    VerificationReport rep;
    rep.entry = e_.id;
    rep.seed = cfg_.sampling.seed;
    rep.trials = cfg_.sampling.trials;
    rep.tol_abs = cfg_.sampling.tol.abs;
    rep.tol_rel = cfg_.sampling.tol.rel;
    rep.mutation = cfg_.mutation;
    for (const auto& s : samples_) {
      std::map<std::string, std::string> m;
      for (const auto& [k, v] : s) m[k] = to_string(v);
      rep.parameter_samples.push_back(m);
    }
    out_ = &rep.checks;
    liealg_checks();
    rmatrix_checks();
    symplectic_checks();
    dynsys_checks("g");
    dynsys_checks("gdual");
    representation_checks();
    exchange_checks();
    if (cfg_.flows) flow_checks();
    for (const auto& c : rep.checks)
      if (c.failed()) rep.status = "fail";
    rep.wall_time = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return rep;
  }

 private:
  const CatalogEntry& e_;
  VerifyConfig cfg_;
  std::vector<ExactAssignment> samples_;
  std::vector<CheckResult>* out_ = nullptr;

  std::vector<ExactAssignment> exact_samples() const {
    return {samples_.begin(), samples_.begin() + std::min<std::size_t>(samples_.size(), cfg_.exact_samples)};
  }
  std::vector<ExactAssignment> random_samples() const {
    return {samples_.begin(), samples_.begin() + std::min<std::size_t>(samples_.size(), cfg_.random_samples)};
  }

  void record(CheckResult c) { out_->push_back(std::move(c)); }

  void skip(const std::string& name, const std::string& why) { record({name, "skipped", 0, why, std::nullopt}); }

  /// Runs `body` per sample, turning exceptions into a failure of the check.
  void each(const std::string& name, const std::vector<ExactAssignment>& samples,
            const std::function<void(detail::Accumulator&, const ExactAssignment&)>& body) {
    detail::Accumulator acc(name);
    for (const auto& p : samples) {
      try {
        body(acc, p);
      } catch (const std::exception& ex) {
        acc.fail(ex.what(), detail::as_doubles(p));
      }
    }
    record(acc.result());
  }

  void liealg_checks() {
    auto ex = exact_samples();
    each("liealg.antisymmetry", ex, [&](auto& acc, const auto& p) {
      acc.exact(check_antisymmetry(e_.f.evaluate(p)), p, "g");
      acc.exact(check_antisymmetry(e_.ft.evaluate(p)), p, "gdual");
      if (e_.symmetry) acc.exact(check_antisymmetry(e_.symmetry->evaluate(p)), p, "symmetry");
    });
    each("liealg.jacobi.g", ex, [&](auto& acc, const auto& p) { acc.exact(check_jacobi(e_.f.evaluate(p)), p); });
    each("liealg.jacobi.gdual", ex,
         [&](auto& acc, const auto& p) { acc.exact(check_jacobi(e_.ft.evaluate(p)), p); });
    if (e_.symmetry)
      each("liealg.jacobi.symmetry", ex,
           [&](auto& acc, const auto& p) { acc.exact(check_jacobi(e_.symmetry->evaluate(p)), p); });
    each("liealg.jacobi.double", ex, [&](auto& acc, const auto& p) {
      acc.exact(check_jacobi(build_double(e_.f.evaluate(p), e_.ft.evaluate(p))), p);
    });
    each("liealg.ad_invariance", ex, [&](auto& acc, const auto& p) {
      acc.exact(check_ad_invariance(build_double(e_.f.evaluate(p), e_.ft.evaluate(p))), p);
    });
    // S realizes C·f; the tilde functions then realize f.
    each("liealg.isomorphism", ex, [&](auto& acc, const auto& p) {
      Matrix<Rational> C = detail::eval_matrix(e_.C, p);
      if (determinant(C) == 0) {
        acc.fail("isomorphism matrix is singular", detail::as_doubles(p));
        return;
      }
      Constants image = apply_isomorphism(C, e_.f.evaluate(p));
      Constants target = e_.symmetry_constants().evaluate(p);
      ExactResidual r;
      for (std::size_t i = 0; i < e_.dim; ++i)
        for (std::size_t j = 0; j < e_.dim; ++j)
          for (std::size_t k = 0; k < e_.dim; ++k) r.note(image(i, j, k) - target(i, j, k), {i, j, k});
      acc.exact(r, p);
    });
    if (e_.rep) {
      each("liealg.representation", exact_samples(), [&](auto& acc, const auto& p) {
        acc.exact(check_representation(e_.rep->evaluate(p), e_.algebra(e_.rep_algebra).evaluate(p)), p);
      });
    } else {
      skip("liealg.representation", "no representation in entry");
    }
  }

  void symplectic_checks() {
    auto ex = exact_samples();
    for (const char* s : {"g", "gdual"}) {
      const SideData& side = e_.side(s);
      const StructureConstants& alg = e_.algebra(s);
      std::vector<ExactResidual> literal;
      each(std::string("symplectic.closure.") + s, ex, [&](auto& acc, const auto& p) {
        Matrix<Rational> w = detail::eval_matrix(side.omega, p);
        if (determinant(w) == 0) {
          acc.fail("symplectic form is degenerate", detail::as_doubles(p));
          return;
        }
        ClosureReport cr = closure_residual(w, alg.evaluate(p));
        acc.exact(cr.exterior, p);
        literal.push_back(cr.literal);
      });
      ExactResidual lit;
      for (const auto& l : literal) lit.merge(l);
      record({std::string("symplectic.closure_literal.") + s, "info", to_double(lit.max_abs),
              lit.zero() ? "printed index order also vanishes"
                         : "printed index order nonzero at " + detail::exact_witness(lit.witness),
              std::nullopt});
    }
    auto rs = random_samples();
    for (const char* s : {"g", "gdual"}) {
      const SideData& side = e_.side(s);
      each(std::string("symplectic.poisson_jacobi.") + s, rs, [&](auto& acc, const auto& p) {
        acc.random(jacobi_residual_field(side.phase, cfg_.sampling, p));
      });
    }
  }

  void rmatrix_checks() {
    if (!e_.r) {
      for (const char* c : {"rmatrix.skew", "rmatrix.cybe", "rmatrix.cobracket"}) skip(c, "no r-matrix in entry");
      return;
    }
    auto ex = exact_samples();
    each("rmatrix.skew", ex, [&](auto& acc, const auto& p) { acc.exact(check_skew(e_.r->evaluate(p)), p); });
    each("rmatrix.cybe", ex, [&](auto& acc, const auto& p) {
      acc.exact(cybe_residual(e_.r->evaluate(p), e_.algebra(e_.r_algebra).evaluate(p)), p);
    });
    // the cobracket r induces must be the bracket of the partner algebra
    each("rmatrix.cobracket", ex, [&](auto& acc, const auto& p) {
      Constants c = cobracket_from_r(e_.r->evaluate(p), e_.algebra(e_.r_algebra).evaluate(p));
      Constants want = e_.algebra(e_.r_algebra == "g" ? "gdual" : "g").evaluate(p);
      ExactResidual res;
      for (std::size_t i = 0; i < e_.dim; ++i)
        for (std::size_t j = 0; j < e_.dim; ++j)
          for (std::size_t k = 0; k < e_.dim; ++k) res.note(c(i, j, k) - want(i, j, k), {i, j, k});
      acc.exact(res, p);
    });
  }

  /// g-side S realize the symmetry constants, tilde-side S realize f.
  Constants bracket_target(const std::string& s, const ExactAssignment& p) const {
    return s == "g" ? e_.symmetry_constants().evaluate(p) : e_.f.evaluate(p);
  }

  void dynsys_checks(const std::string& s) {
    const SideData& side = e_.side(s);
    auto rs = random_samples();
    each("dynsys.darboux." + s, rs, [&](auto& acc, const auto& p) {
      DarbouxReport dr = check_darboux(side.phase, side.chart, cfg_.sampling, p);
      for (const auto& b : dr.brackets) {
        acc.random(b.result);
        if (!b.result.holds)
          acc.note("{z" + std::to_string(b.i + 1) + ",z" + std::to_string(b.j + 1) + "} != " +
                   std::to_string(b.expected));
      }
    });
    auto forms = [&](const std::string& name, const NamedFunctions& nf) {
      each(name, rs, [&](auto& acc, const auto& p) {
        std::vector<Expr> d;
        for (std::size_t i = 0; i < nf.coordinates.size(); ++i)
          d.push_back(nf.coordinates[i] - compose(nf.darboux[i], side.darboux, side.chart));
        acc.random(equiv_zero_all(d, cfg_.sampling, p));
      });
    };
    forms("dynsys.S_forms." + s, side.S);
    if (side.invariants) forms("dynsys.invariant_forms." + s, *side.invariants);
    if (s == "g")
      each("dynsys.symmetry.g", rs, [&](auto& acc, const auto& p) {
        acc.random(symmetry_residual(side.phase, side.S.coordinates, bracket_target(s, p), cfg_.sampling, p));
      });
    if (side.invariants)
      each("dynsys.invariant_involution." + s, rs, [&](auto& acc, const auto& p) {
        const auto& I = side.invariants->coordinates;
        std::vector<Expr> br;
        for (std::size_t a = 0; a < I.size(); ++a)
          for (std::size_t b = a + 1; b < I.size(); ++b) br.push_back(poisson_bracket(side.phase, I[a], I[b]));
        if (!br.empty()) acc.random(equiv_zero_all(br, cfg_.sampling, p));
      });
    if (side.involutive.empty()) {
      skip("dynsys.involutive." + s, "no expected families");
    } else {
      each("dynsys.involutive." + s, rs, [&](auto& acc, const auto& p) {
        auto found = find_involutive_pairs(side.phase, side.S.coordinates, cfg_.sampling, p);
        if (found != side.involutive)
          acc.fail("found " + detail::join_sets(found) + ", expected " + detail::join_sets(side.involutive),
                   detail::as_doubles(p));
        else
          acc.note(detail::join_sets(found));
      });
    }
  }

  /// Q from the side whose S functions realize the algebra carrying r and rep.
  void representation_checks() {
    bool usable = e_.r && e_.rep && e_.r_algebra == e_.rep_algebra;
    if (!usable) {
      skip("dynsys.sts", "needs r and a representation of the same algebra");
      skip("dynsys.trace_invariants", "needs r and a representation of the same algebra");
      return;
    }
    std::string s = e_.r_algebra == "gdual" ? "g" : "gdual";
    const SideData& side = e_.side(s);
    auto rs = random_samples();
    each("dynsys.sts", rs, [&](auto& acc, const auto& p) {
      Matrix<Expr> r = e_.r->evaluate(p).map([](const Rational& v) { return Expr(v); });
      auto rho = detail::to_expr(e_.rep->evaluate(p));
      Matrix<Expr> Q = build_Q(side.S.coordinates, r, rho);
      acc.random(sts_residual(Q, r, rho, side.phase, cfg_.sampling, p));
    });
    if (!side.invariants) {
      skip("dynsys.trace_invariants", "no listed invariants");
      return;
    }
    each("dynsys.trace_invariants", rs, [&](auto& acc, const auto& p) {
      Matrix<Expr> r = e_.r->evaluate(p).map([](const Rational& v) { return Expr(v); });
      Matrix<Expr> Q = build_Q(side.S.coordinates, r, detail::to_expr(e_.rep->evaluate(p)));
      const auto& I = side.invariants->coordinates;
      std::vector<Expr> tr = invariants(Q, static_cast<int>(I.size()));
      std::vector<Expr> d;
      for (std::size_t k = 0; k < I.size(); ++k) d.push_back(tr[k] - I[k]);
      acc.random(equiv_zero_all(d, cfg_.sampling, p));
    });
  }

  void exchange_checks() {
    auto rs = random_samples();
    each("exchange.phase_exchange", rs, [&](auto& acc, const auto& p) {
      acc.random(check_phase_exchange(e_.map, e_.g.phase, e_.gdual.phase, cfg_.sampling, p));
    });
    each("exchange.tilde_symmetry", rs, [&](auto& acc, const auto& p) {
      acc.random(symmetry_residual(e_.gdual.phase, e_.gdual.S.coordinates, bracket_target("gdual", p),
                                   cfg_.sampling, p));
    });
    each("exchange.transformed_functions", rs, [&](auto& acc, const auto& p) {
      Matrix<Rational> C = detail::eval_matrix(e_.C, p);
      std::vector<Expr> computed = transform_dynfuncs(C, e_.g.S.coordinates, e_.map);
      std::vector<Expr> d;
      for (std::size_t i = 0; i < computed.size(); ++i) d.push_back(computed[i] - e_.gdual.S.coordinates[i]);
      acc.random(equiv_zero_all(d, cfg_.sampling, p));
    });
    each("exchange.zmap_consistency", rs, [&](auto& acc, const auto& p) {
      std::vector<Expr> d;
      for (std::size_t i = 0; i < e_.zmap.exprs.size(); ++i) {
        Expr zx = compose(e_.zmap.exprs[i], e_.g.darboux, e_.g.chart);
        d.push_back(e_.gdual.chart[i] - e_.map.pull(zx));
      }
      acc.random(equiv_zero_all(d, cfg_.sampling, p));
    });
    if (e_.r && e_.rep && e_.r_algebra == "gdual" && e_.rep_algebra == "gdual") {
      each("exchange.q_transform", rs, [&](auto& acc, const auto& p) {
        ExchangeBundle b{e_.f.evaluate(p), e_.ft.evaluate(p), detail::eval_matrix(e_.C, p), e_.g.phase,
                         e_.gdual.phase, e_.g.S.coordinates, e_.gdual.S.coordinates, e_.map,
                         e_.r->evaluate(p), e_.rep->evaluate(p)};
        acc.random(transform_Q(b, cfg_.sampling, p));
      });
    } else {
      skip("exchange.q_transform", "needs r and a representation on the dual");
    }
    classification_check(rs);
  }

  void classification_check(const std::vector<ExactAssignment>& rs) {
    const auto& spec = e_.classification;
    bool inv = spec.functions == "invariants";
    const auto& A = inv ? e_.g.invariants->darboux : e_.g.S.darboux;
    const auto& B = inv ? e_.gdual.invariants->darboux : e_.gdual.S.darboux;
    PoissonField phaseA = PoissonField::canonical(e_.g.darboux);
    PoissonField phaseB = PoissonField::canonical(e_.gdual.darboux);
    each("exchange.classification", rs, [&](auto& acc, const auto& p) {
      Classification c = classify_transformation(e_.zmap, A, B, phaseA, phaseB, cfg_.sampling, p);
      auto yn = [](bool b) { return b ? std::string("yes") : std::string("no"); };
      std::string got = "bracket_preserving=" + yn(c.bracket_preserving) + " invariant_mapping=" +
                        yn(c.invariant_mapping);
      acc.random(c.bracket_check);
      if (c.bracket_preserving != spec.bracket_preserving || c.invariant_mapping != spec.invariant_mapping) {
        acc.fail("got " + got, detail::as_doubles(p));
        return;
      }
      if (spec.coefficients) {
        if (!c.coefficients) {
          acc.fail("no exact coefficients recovered", detail::as_doubles(p));
          return;
        }
        Matrix<Rational> want = detail::eval_matrix(*spec.coefficients, p);
        if (!(want == *c.coefficients)) {
          acc.fail("recovered coefficients differ from the listed mapping", detail::as_doubles(p));
          return;
        }
        acc.note(got + " coefficients exact");
      } else {
        acc.note(got);
      }
    });
  }

  /// RK4 along the H-flow from x0; drift of F relative to its start value.
  CheckResult run_flow(const std::string& name, const PoissonField& pf, const Expr& H, const Expr& F,
                       const std::vector<double>& x0, const Assignment& params) const {
    CheckResult c{name, "pass", 0, {}, std::nullopt};
    std::map<std::string, double> start(params.begin(), params.end());
    for (std::size_t i = 0; i < x0.size(); ++i) start[pf.coords[i].name] = x0[i];
    Trajectory tr = integrate(hamiltonian_vector_field(pf, H), pf.coords, x0, cfg_.flow_dt, cfg_.flow_T, params,
                              cfg_.sampling.den_guard);
    std::ostringstream os;
    os << std::setprecision(3);
    if (tr.aborted) {
      os << "stopped at t=" << tr.times.back() << ": " << tr.abort_reason;
      c.status = "fail";
      c.detail = os.str();
      c.witness = start;
      return c;
    }
    DriftReport dr;
    try {
      dr = conservation_drift(tr, {F}, params);
    } catch (const SingularPointError& ex) {
      c.status = "fail";
      c.detail = std::string("F not finite along the trajectory: ") + ex.what();
      c.witness = start;
      return c;
    }
    c.max_residual = dr.relative[0];
    os << "relative drift " << dr.relative[0] << " over " << tr.states.size() - 1 << " steps";
    c.detail = os.str();
    if (!(dr.relative[0] <= cfg_.drift_tol)) {
      c.status = "fail";
      c.witness = start;
    }
    return c;
  }

  /// Coordinate route from the default start, then the same flow in the Darboux chart.
  void flow_checks() {
    Assignment params = to_double(samples_.front());
    for (const auto& fs : e_.flows) {
      const SideData& side = e_.side(fs.side);
      std::string tag = fs.side + "." + fs.H + "." + fs.F;
      std::vector<double> x0;
      try {
        Expr H = *side.function(fs.H), F = *side.function(fs.F);
        if (fs.start) {
          for (const auto& v : *fs.start) x0.push_back(to_double(v));
        } else {
          std::vector<Expr> probe = hamiltonian_vector_field(side.phase, H);
          probe.push_back(H);
          probe.push_back(F);
          auto s = detail::default_start(side.coords(), probe, params, cfg_.sampling.den_guard);
          if (!s) throw SingularPointError("no usable start point");
          x0 = *s;
        }
        CheckResult c = run_flow("flow." + tag, side.phase, H, F, x0, params);
        if (fs.leaves_chart) {
          c.status = "info";
          c.detail = "leaves the chart; " + c.detail;
        }
        record(c);
      } catch (const std::exception& ex) {
        record({"flow." + tag, fs.leaves_chart ? "info" : "fail", 0, ex.what(), std::nullopt});
        continue;
      }
      try {
        Assignment a = params;
        for (std::size_t i = 0; i < x0.size(); ++i) a[side.coords()[i].name] = x0[i];
        std::vector<double> z0;
        for (const auto& z : side.chart) z0.push_back(eval(z, a, cfg_.sampling.den_guard));
        record(run_flow("flow_darboux." + tag, PoissonField::canonical(side.darboux), *side.darboux_function(fs.H),
                        *side.darboux_function(fs.F), z0, params));
      } catch (const std::exception& ex) {
        record({"flow_darboux." + tag, "fail", 0, ex.what(), std::nullopt});
      }
    }
  }
};

inline VerificationReport verify_entry(const CatalogEntry& entry, const VerifyConfig& cfg = {}) {
  if (cfg.mutation.empty()) return EntryVerifier(entry, cfg).run();
  CatalogEntry mutated = entry;
  apply_mutation(mutated, cfg.mutation);
  return EntryVerifier(mutated, cfg).run();
}

/// Loads and verifies every *.json in `dir`; unreadable files become load errors.
inline SummaryReport verify_all(const std::filesystem::path& dir, const VerifyConfig& cfg = {}) {
  SummaryReport sum;
  std::vector<CatalogEntry> entries;
  for (const auto& f : catalog_files(dir)) {
    try {
      entries.push_back(load_entry(f));
    } catch (const std::exception& ex) {
      sum.load_errors.push_back({f.filename().string(), ex.what()});
    }
  }
  unsigned jobs = cfg.jobs ? cfg.jobs : std::max(1u, std::thread::hardware_concurrency());
  sum.entries.resize(entries.size());
  std::size_t next = 0;
  while (next < entries.size()) {
    std::vector<std::future<VerificationReport>> batch;
    std::size_t first = next;
    for (; next < entries.size() && batch.size() < jobs; ++next)
      batch.push_back(std::async(std::launch::async, [&, next] { return verify_entry(entries[next], cfg); }));
    for (std::size_t k = 0; k < batch.size(); ++k) sum.entries[first + k] = batch[k].get();
  }
  return sum;
}

// ---- serialization (written in field order)

inline nlohmann::ordered_json to_json(const CheckResult& c) {
  nlohmann::ordered_json j{
      {"name", c.name}, {"status", c.status}, {"max_residual", c.max_residual}, {"detail", c.detail}};
  if (c.witness) j["witness"] = *c.witness;
  return j;
}

inline nlohmann::ordered_json to_json(const VerificationReport& r) {
  nlohmann::ordered_json checks = nlohmann::ordered_json::array();
  for (const auto& c : r.checks) checks.push_back(to_json(c));
  return {{"entry", r.entry},
          {"status", r.status},
          {"seed", r.seed},
          {"trials", r.trials},
          {"tolerance", {{"abs", r.tol_abs}, {"rel", r.tol_rel}}},
          {"mutation", r.mutation},
          {"parameter_samples", r.parameter_samples},
          {"checks", checks},
          {"wall_time", r.wall_time}};
}

inline nlohmann::ordered_json to_json(const SummaryReport& s) {
  nlohmann::ordered_json entries = nlohmann::ordered_json::array(), errors = nlohmann::ordered_json::array();
  for (const auto& r : s.entries) entries.push_back(to_json(r));
  for (const auto& e : s.load_errors) errors.push_back({{"file", e.file}, {"error", e.error}});
  return {{"status", s.ok() ? "pass" : "fail"},
          {"passed", s.passed()},
          {"total", s.entries.size() + s.load_errors.size()},
          {"entries", entries},
          {"load_errors", errors}};
}

inline CheckResult check_from_json(const nlohmann::json& j) {
  CheckResult c{j.at("name"), j.at("status"), j.at("max_residual"), j.at("detail"), std::nullopt};
  if (j.contains("witness")) c.witness = j.at("witness").get<std::map<std::string, double>>();
  return c;
}

inline VerificationReport report_from_json(const nlohmann::json& j) {
  VerificationReport r;
  r.entry = j.at("entry");
  r.status = j.at("status");
  r.seed = j.at("seed");
  r.trials = j.at("trials");
  r.tol_abs = j.at("tolerance").at("abs");
  r.tol_rel = j.at("tolerance").at("rel");
  r.mutation = j.at("mutation");
  r.parameter_samples = j.at("parameter_samples").get<std::vector<std::map<std::string, std::string>>>();
  for (const auto& c : j.at("checks")) r.checks.push_back(check_from_json(c));
  r.wall_time = j.at("wall_time");
  return r;
}

inline SummaryReport summary_from_json(const nlohmann::json& j) {
  SummaryReport s;
  for (const auto& e : j.at("entries")) s.entries.push_back(report_from_json(e));
  for (const auto& e : j.at("load_errors")) s.load_errors.push_back({e.at("file"), e.at("error")});
  return s;
}

enum class ReportFormat { json, text };

inline std::string format_residual(double v) {
  std::ostringstream os;
  os << std::scientific << std::setprecision(2) << v;
  return os.str();
}

inline std::string emit_text(const VerificationReport& r) {
  std::ostringstream os;
  os << "entry " << r.entry << ": " << r.status;
  if (!r.mutation.empty()) os << " (mutation " << r.mutation << ")";
  os << "\nseed " << r.seed << ", " << r.trials << " points per sample, " << r.parameter_samples.size()
     << " parameter samples\n";
  std::size_t w = 0;
  for (const auto& c : r.checks) w = std::max(w, c.name.size());
  for (const auto& c : r.checks) {
    os << "  " << std::left << std::setw(static_cast<int>(w)) << c.name << "  " << std::setw(7) << c.status << "  "
       << std::setw(9) << format_residual(c.max_residual) << "  " << c.detail << "\n";
    if (c.failed() && c.witness) {
      os << "  " << std::string(w, ' ') << "  witness:" << std::setprecision(17);
      for (const auto& [k, v] : *c.witness) os << " " << k << "=" << v;
      os << "\n";
    }
  }
  os << std::fixed << std::setprecision(2) << "wall time " << r.wall_time << " s\n";
  return os.str();
}

inline std::string emit_report(const VerificationReport& r, ReportFormat fmt) {
  return fmt == ReportFormat::json ? to_json(r).dump(2) + "\n" : emit_text(r);
}

inline std::string emit_report(const SummaryReport& s, ReportFormat fmt) {
  if (fmt == ReportFormat::json) return to_json(s).dump(2) + "\n";
  std::ostringstream os;
  for (const auto& r : s.entries) os << emit_text(r) << "\n";
  for (const auto& e : s.load_errors) os << "load error " << e.file << ": " << e.error << "\n";
  os << s.passed() << "/" << s.entries.size() + s.load_errors.size() << " entries pass\n";
  return os.str();
}

}  // namespace bisym
