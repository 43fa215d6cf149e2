#pragma once

#include <algorithm>
#include <cctype>
#include <map>
#include <memory>
#include <set>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "bisym/rational.hpp"

namespace bisym {

enum class SymbolKind { coordinate, parameter };

struct Symbol {
  std::string name;
  SymbolKind kind = SymbolKind::coordinate;

  friend bool operator==(const Symbol&, const Symbol&) = default;
};

inline bool is_identifier(std::string_view s) {
  if (s.empty() || !std::isalpha(static_cast<unsigned char>(s[0]))) return false;
  return std::all_of(s.begin(), s.end(), [](char c) {
    return std::isalnum(static_cast<unsigned char>(c)) || c == '_';
  });
}

/// Names are unique; redeclaring with the same kind is a no-op.
class SymbolTable {
 public:
  const Symbol& declare(const std::string& name, SymbolKind kind) {
    if (!is_identifier(name) || name == "exp")
      throw std::invalid_argument("invalid symbol name '" + name + "'");
    if (auto it = index_.find(name); it != index_.end()) {
      const Symbol& s = symbols_[it->second];
      if (s.kind != kind)
        throw std::invalid_argument("symbol '" + name + "' already declared with another kind");
      return s;
    }
    index_.emplace(name, symbols_.size());
    symbols_.push_back({name, kind});
    return symbols_.back();
  }

  const Symbol* find(std::string_view name) const {
    auto it = index_.find(std::string(name));
    return it == index_.end() ? nullptr : &symbols_[it->second];
  }

  const std::vector<Symbol>& symbols() const { return symbols_; }

  std::vector<Symbol> of_kind(SymbolKind kind) const {
    std::vector<Symbol> out;
    for (const auto& s : symbols_)
      if (s.kind == kind) out.push_back(s);
    return out;
  }

 private:
  std::vector<Symbol> symbols_;
  std::map<std::string, std::size_t> index_;
};

enum class NodeKind { constant, symbol, sum, product, quotient, power, exp, negate };

struct Node;

/// Immutable expression handle; copies share the tree.
class Expr {
 public:
  Expr();
  Expr(int v);
  Expr(const Rational& v);

  static Expr symbol(const Symbol& s);
  // Raw constructors do no folding. The parser builds trees with these.
  static Expr raw_sum(std::vector<Expr> terms);
  static Expr raw_product(std::vector<Expr> factors);
  static Expr raw_quotient(Expr num, Expr den);
  static Expr raw_power(Expr base, long n);
  static Expr raw_exp(Expr arg);
  static Expr raw_negate(Expr arg);

  NodeKind kind() const;
  const Rational& value() const;
  const Symbol& sym() const;
  const std::vector<Expr>& args() const;
  const Expr& arg() const { return args().front(); }
  long exponent() const;

  bool is_constant() const { return kind() == NodeKind::constant; }
  bool is_zero() const { return is_constant() && value() == 0; }
  bool is_one() const { return is_constant() && value() == 1; }
  const Node* id() const { return node_.get(); }
  bool shared() const { return node_.use_count() > 1; }

 private:
  static Expr make(NodeKind k, std::vector<Expr> args, long e = 0);
  explicit Expr(std::shared_ptr<const Node> n) : node_(std::move(n)) {}
  std::shared_ptr<const Node> node_;
};

struct Node {
  NodeKind kind = NodeKind::constant;
  Rational value;
  Symbol symbol;
  std::vector<Expr> args;
  long exponent = 0;
};

inline Expr::Expr() : Expr(Rational(0)) {}
inline Expr::Expr(int v) : Expr(Rational(v)) {}
inline Expr::Expr(const Rational& v) {
  auto n = std::make_shared<Node>();
  n->kind = NodeKind::constant;
  n->value = v;
  node_ = std::move(n);
}

inline Expr Expr::symbol(const Symbol& s) {
  auto n = std::make_shared<Node>();
  n->kind = NodeKind::symbol;
  n->symbol = s;
  return Expr(std::shared_ptr<const Node>(std::move(n)));
}

inline Expr Expr::make(NodeKind k, std::vector<Expr> args, long e) {
  if ((k == NodeKind::sum || k == NodeKind::product) && args.empty())
    throw std::invalid_argument("empty sum or product");
  auto n = std::make_shared<Node>();
  n->kind = k;
  n->args = std::move(args);
  n->exponent = e;
  return Expr(std::shared_ptr<const Node>(std::move(n)));
}

inline Expr Expr::raw_sum(std::vector<Expr> terms) { return make(NodeKind::sum, std::move(terms)); }
inline Expr Expr::raw_product(std::vector<Expr> factors) {
  return make(NodeKind::product, std::move(factors));
}
inline Expr Expr::raw_quotient(Expr num, Expr den) {
  return make(NodeKind::quotient, {std::move(num), std::move(den)});
}
inline Expr Expr::raw_power(Expr base, long n) {
  return make(NodeKind::power, {std::move(base)}, n);
}
inline Expr Expr::raw_exp(Expr arg) { return make(NodeKind::exp, {std::move(arg)}); }
inline Expr Expr::raw_negate(Expr arg) { return make(NodeKind::negate, {std::move(arg)}); }

inline NodeKind Expr::kind() const { return node_->kind; }
inline const Rational& Expr::value() const { return node_->value; }
inline const Symbol& Expr::sym() const { return node_->symbol; }
inline const std::vector<Expr>& Expr::args() const { return node_->args; }
inline long Expr::exponent() const { return node_->exponent; }

inline bool is_zero_entry(const Expr& e) { return e.is_zero(); }

inline Expr sym(const std::string& name, SymbolKind kind = SymbolKind::coordinate) {
  return Expr::symbol({name, kind});
}

// ---- folding arithmetic ----

inline Expr operator-(const Expr& a) {
  if (a.is_constant()) return Expr(Rational(-a.value()));
  if (a.kind() == NodeKind::negate) return a.arg();
  return Expr::raw_negate(a);
}

inline Expr operator+(const Expr& a, const Expr& b) {
  if (a.is_zero()) return b;
  if (b.is_zero()) return a;
  if (a.is_constant() && b.is_constant()) return Expr(Rational(a.value() + b.value()));
  std::vector<Expr> terms;
  auto push = [&](const Expr& e) {
    if (e.kind() == NodeKind::sum)
      terms.insert(terms.end(), e.args().begin(), e.args().end());
    else
      terms.push_back(e);
  };
  push(a);
  push(b);
  return Expr::raw_sum(std::move(terms));
}

inline Expr operator-(const Expr& a, const Expr& b) { return a + (-b); }

inline Expr operator*(const Expr& a, const Expr& b) {
  if (a.is_zero() || b.is_zero()) return Expr(0);
  if (a.is_one()) return b;
  if (b.is_one()) return a;
  if (a.is_constant() && b.is_constant()) return Expr(Rational(a.value() * b.value()));
  if (a.is_constant() && a.value() == -1) return -b;
  if (b.is_constant() && b.value() == -1) return -a;
  if (a.kind() == NodeKind::negate) return -(a.arg() * b);
  if (b.kind() == NodeKind::negate) return -(a * b.arg());
  std::vector<Expr> factors;
  auto push = [&](const Expr& e) {
    if (e.kind() == NodeKind::product)
      factors.insert(factors.end(), e.args().begin(), e.args().end());
    else
      factors.push_back(e);
  };
  push(a);
  push(b);
  return Expr::raw_product(std::move(factors));
}

inline Expr operator/(const Expr& a, const Expr& b) {
  if (b.is_zero()) throw std::domain_error("division by the zero constant");
  if (a.is_zero()) return Expr(0);
  if (b.is_one()) return a;
  if (a.is_constant() && b.is_constant()) return Expr(Rational(a.value() / b.value()));
  if (a.kind() == NodeKind::negate) return -(a.arg() / b);
  if (b.kind() == NodeKind::negate) return -(a / b.arg());
  return Expr::raw_quotient(a, b);
}

inline Expr& operator+=(Expr& a, const Expr& b) { return a = a + b; }
inline Expr& operator-=(Expr& a, const Expr& b) { return a = a - b; }
inline Expr& operator*=(Expr& a, const Expr& b) { return a = a * b; }

inline Expr pow(const Expr& base, long n) {
  if (n == 0) return Expr(1);
  if (n == 1) return base;
  if (base.is_constant()) {
    Rational r(1);
    Rational b = base.value();
    if (n < 0) {
      if (b == 0) throw std::domain_error("negative power of zero");
      b = 1 / b;
    }
    for (long k = 0; k < (n < 0 ? -n : n); ++k) r *= b;
    return Expr(r);
  }
  if (base.kind() == NodeKind::power) return pow(base.arg(), base.exponent() * n);
  return Expr::raw_power(base, n);
}

inline Expr exp(const Expr& a) {
  if (a.is_zero()) return Expr(1);
  return Expr::raw_exp(a);
}

inline Expr sum_of(const std::vector<Expr>& terms) {
  Expr acc(0);
  for (const auto& t : terms) acc += t;
  return acc;
}

// ---- structure ----

inline bool structurally_equal(const Expr& a, const Expr& b) {
  if (a.id() == b.id()) return true;
  if (a.kind() != b.kind()) return false;
  switch (a.kind()) {
    case NodeKind::constant: return a.value() == b.value();
    case NodeKind::symbol: return a.sym() == b.sym();
    case NodeKind::power:
      if (a.exponent() != b.exponent()) return false;
      break;
    default: break;
  }
  if (a.args().size() != b.args().size()) return false;
  for (std::size_t i = 0; i < a.args().size(); ++i)
    if (!structurally_equal(a.args()[i], b.args()[i])) return false;
  return true;
}

namespace detail {
inline void collect_symbols(const Expr& e, std::map<std::string, Symbol>& out,
                            std::set<const Node*>& seen) {
  if (e.kind() == NodeKind::symbol) {
    out.emplace(e.sym().name, e.sym());
    return;
  }
  if (e.args().empty() || !seen.insert(e.id()).second) return;
  for (const auto& a : e.args()) collect_symbols(a, out, seen);
}
}  // namespace detail

/// Sorted by name.
inline std::vector<Symbol> free_symbols(const Expr& e) {
  std::map<std::string, Symbol> m;
  std::set<const Node*> seen;
  detail::collect_symbols(e, m, seen);
  std::vector<Symbol> out;
  for (auto& [_, s] : m) out.push_back(s);
  return out;
}

inline bool depends_on(const Expr& e, const std::string& name) {
  if (e.kind() == NodeKind::symbol) return e.sym().name == name;
  for (const auto& a : e.args())
    if (depends_on(a, name)) return true;
  return false;
}

inline bool contains_exp(const Expr& e) {
  if (e.kind() == NodeKind::exp) return true;
  for (const auto& a : e.args())
    if (contains_exp(a)) return true;
  return false;
}

inline std::size_t node_count(const Expr& e) {
  std::size_t n = 1;
  for (const auto& a : e.args()) n += node_count(a);
  return n;
}

// ---- differentiation ----

namespace detail {
class Differentiator {
 public:
  explicit Differentiator(std::string name) : name_(std::move(name)) {}

  Expr operator()(const Expr& e) {
    if (e.args().empty()) {
      if (e.kind() == NodeKind::symbol && e.sym().name == name_) return Expr(1);
      return Expr(0);
    }
    if (auto it = memo_.find(e.id()); it != memo_.end()) return it->second;
    Expr d = compute(e);
    if (e.shared()) memo_.emplace(e.id(), d);
    return d;
  }

 private:
  Expr compute(const Expr& e) {
    if (!depends(e)) return Expr(0);
    switch (e.kind()) {
      case NodeKind::sum: {
        Expr acc(0);
        for (const auto& t : e.args()) acc += (*this)(t);
        return acc;
      }
      case NodeKind::product: {
        const auto& f = e.args();
        Expr acc(0);
        for (std::size_t i = 0; i < f.size(); ++i) {
          Expr di = (*this)(f[i]);
          if (di.is_zero()) continue;
          Expr term = di;
          for (std::size_t j = 0; j < f.size(); ++j)
            if (j != i) term = term * f[j];
          acc += term;
        }
        return acc;
      }
      case NodeKind::quotient: {
        const Expr& n = e.args()[0];
        const Expr& d = e.args()[1];
        Expr dn = (*this)(n);
        Expr dd = (*this)(d);
        if (dd.is_zero()) return dn / d;
        return (dn * d - n * dd) / pow(d, 2);
      }
      case NodeKind::power: {
        long k = e.exponent();
        return Expr(Rational(k)) * pow(e.arg(), k - 1) * (*this)(e.arg());
      }
      case NodeKind::exp: return e * (*this)(e.arg());
      case NodeKind::negate: return -(*this)(e.arg());
      default: return Expr(0);
    }
  }

  bool depends(const Expr& e) {
    if (e.kind() == NodeKind::symbol) return e.sym().name == name_;
    if (e.args().empty()) return false;
    if (auto it = dep_.find(e.id()); it != dep_.end()) return it->second;
    bool r = false;
    for (const auto& a : e.args())
      if (depends(a)) {
        r = true;
        break;
      }
    if (e.shared()) dep_.emplace(e.id(), r);
    return r;
  }

  std::string name_;
  std::map<const Node*, Expr> memo_;
  std::map<const Node*, bool> dep_;
};
}  // namespace detail

inline Expr diff(const Expr& e, const std::string& name) {
  return detail::Differentiator(name)(e);
}
inline Expr diff(const Expr& e, const Symbol& s) { return diff(e, s.name); }

inline std::vector<Expr> gradient(const Expr& e, const std::vector<Symbol>& coords) {
  std::vector<Expr> g;
  g.reserve(coords.size());
  for (const auto& s : coords) g.push_back(diff(e, s));
  return g;
}

// ---- substitution ----

namespace detail {
class Substituter {
 public:
  explicit Substituter(const std::map<std::string, Expr>& m) : map_(m) {}

  Expr operator()(const Expr& e) {
    if (e.kind() == NodeKind::symbol) {
      auto it = map_.find(e.sym().name);
      return it == map_.end() ? e : it->second;
    }
    if (e.args().empty()) return e;
    if (auto it = memo_.find(e.id()); it != memo_.end()) return it->second;
    std::vector<Expr> args;
    args.reserve(e.args().size());
    for (const auto& a : e.args()) args.push_back((*this)(a));
    Expr out;
    switch (e.kind()) {
      case NodeKind::sum: out = Expr::raw_sum(std::move(args)); break;
      case NodeKind::product: out = Expr::raw_product(std::move(args)); break;
      case NodeKind::quotient: out = Expr::raw_quotient(args[0], args[1]); break;
      case NodeKind::power: out = Expr::raw_power(args[0], e.exponent()); break;
      case NodeKind::exp: out = Expr::raw_exp(args[0]); break;
      case NodeKind::negate: out = Expr::raw_negate(args[0]); break;
      default: out = e;
    }
    if (e.shared()) memo_.emplace(e.id(), out);
    return out;
  }

 private:
  const std::map<std::string, Expr>& map_;
  std::map<const Node*, Expr> memo_;
};
}  // namespace detail

/// Simultaneous replacement of symbols by expressions; tree shape is kept.
inline Expr substitute(const Expr& e, const std::map<std::string, Expr>& replacements) {
  return detail::Substituter(replacements)(e);
}

inline Expr compose(const Expr& e, const std::vector<Symbol>& coords,
                    const std::vector<Expr>& values) {
  if (coords.size() != values.size()) throw std::invalid_argument("compose: size mismatch");
  std::map<std::string, Expr> m;
  for (std::size_t i = 0; i < coords.size(); ++i) m.emplace(coords[i].name, values[i]);
  return substitute(e, m);
}

}  // namespace bisym
