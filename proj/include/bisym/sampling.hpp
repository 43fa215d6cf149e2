#pragma once

#include <cmath>
#include <cstdint>
#include <optional>
#include <random>
#include <vector>

#include "bisym/eval.hpp"

namespace bisym {

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

/// Seed for one trial, independent of evaluation order.
inline std::uint64_t trial_seed(std::uint64_t master, std::uint64_t trial, std::uint64_t attempt = 0) {
  return splitmix64(splitmix64(splitmix64(master) ^ trial) ^ (attempt * 0x632be59bd9b4e019ULL));
}

struct Tolerance {
  double abs = 1e-9;
  double rel = 1e-9;
};

struct SamplingConfig {
  std::uint64_t seed = 42;
  int trials = 20;
  Tolerance tol;
  double den_guard = kDefaultDenGuard;
  Rational coord_lo{1, 5};
  Rational coord_hi{3, 2};
  long grid = 1000;
  std::vector<Rational> parameter_values{Rational(-3), Rational(-2), Rational(-1), Rational(-1, 2),
                                         Rational(1, 2), Rational(1), Rational(2), Rational(3)};
  int max_resamples = 8;
};

/// Draws exact rational points; the same (seed, trial, attempt) always gives the same point.
class PointSampler {
 public:
  explicit PointSampler(const SamplingConfig& cfg) : cfg_(cfg) {}

  ExactAssignment sample(const std::vector<Symbol>& symbols, const ExactAssignment& fixed,
                         std::uint64_t trial, std::uint64_t attempt = 0) const {
    std::mt19937_64 rng(trial_seed(cfg_.seed, trial, attempt));
    ExactAssignment out = fixed;
    Rational lo_r = cfg_.coord_lo * cfg_.grid;
    Rational hi_r = cfg_.coord_hi * cfg_.grid;
    long lo = static_cast<long>(std::ceil(lo_r.get_d()));
    long hi = static_cast<long>(std::floor(hi_r.get_d()));
    for (const auto& s : symbols) {
      std::uint64_t draw = rng();
      if (fixed.count(s.name)) continue;
      if (s.kind == SymbolKind::parameter) {
        out[s.name] = cfg_.parameter_values[draw % cfg_.parameter_values.size()];
      } else {
        long k = lo + static_cast<long>(draw % static_cast<std::uint64_t>(hi - lo + 1));
        out[s.name] = Rational(k, cfg_.grid);
        out[s.name].canonicalize();
      }
    }
    return out;
  }

  /// Parameter-only assignment for exact checks.
  ExactAssignment sample_parameters(const std::vector<Symbol>& params, std::uint64_t index) const {
    std::mt19937_64 rng(trial_seed(cfg_.seed ^ 0x5bd1e995ULL, index));
    ExactAssignment out;
    for (const auto& p : params) out[p.name] = cfg_.parameter_values[rng() % cfg_.parameter_values.size()];
    return out;
  }

  const SamplingConfig& config() const { return cfg_; }

 private:
  SamplingConfig cfg_;
};

struct IdentityResult {
  bool holds = true;
  double max_residual = 0;  // largest |value|
  double max_ratio = 0;     // largest |value| / (abs + rel * scale); holds iff <= 1
  std::size_t worst_index = 0;
  std::optional<Assignment> witness;  // first failing point
  int points = 0;
  int singular = 0;

  void merge(const IdentityResult& o) {
    if (!o.holds && holds) {
      holds = false;
      witness = o.witness;
    }
    if (o.max_ratio > max_ratio) max_ratio = o.max_ratio;
    max_residual = std::max(max_residual, o.max_residual);
    points += o.points;
    singular += o.singular;
  }
};

inline std::vector<Symbol> free_symbols(const std::vector<Expr>& es) {
  std::map<std::string, Symbol> m;
  for (const auto& e : es)
    for (const auto& s : free_symbols(e)) m.emplace(s.name, s);
  std::vector<Symbol> out;
  for (auto& [_, s] : m) out.push_back(s);
  return out;
}

/// All expressions are tested at the same points.
inline IdentityResult equiv_zero_all(const std::vector<Expr>& es, const SamplingConfig& cfg,
                                     const ExactAssignment& fixed = {}) {
  PointSampler sampler(cfg);
  std::vector<Symbol> syms = free_symbols(es);
  IdentityResult res;
  for (int t = 0; t < cfg.trials; ++t) {
    bool ok = false;
    for (int attempt = 0; attempt <= cfg.max_resamples && !ok; ++attempt) {
      Assignment pt = to_double(sampler.sample(syms, fixed, static_cast<std::uint64_t>(t),
                                               static_cast<std::uint64_t>(attempt)));
      std::vector<Evaluation> vals;
      try {
        for (const auto& e : es) vals.push_back(evaluate(e, pt, cfg.den_guard));
      } catch (const SingularPointError&) {
        continue;
      }
      ok = true;
      ++res.points;
      for (std::size_t i = 0; i < vals.size(); ++i) {
        double r = std::fabs(vals[i].value);
        double ratio = r / (cfg.tol.abs + cfg.tol.rel * vals[i].scale);
        res.max_residual = std::max(res.max_residual, r);
        if (ratio > res.max_ratio) {
          res.max_ratio = ratio;
          res.worst_index = i;
        }
        if (ratio > 1 && res.holds) {
          res.holds = false;
          res.witness = pt;
        }
      }
    }
    if (!ok) ++res.singular;
  }
  if (res.points == 0) throw InconclusiveError("every sampled point was singular");
  return res;
}

inline IdentityResult equiv_zero(const Expr& e, const SamplingConfig& cfg,
                                 const ExactAssignment& fixed = {}) {
  return equiv_zero_all({e}, cfg, fixed);
}

}  // namespace bisym
