#pragma once

#include <cmath>
#include <map>
#include <string>
#include <unordered_map>

#include "bisym/errors.hpp"
#include "bisym/expr.hpp"

namespace bisym {

template <class T>
using BasicAssignment = std::map<std::string, T>;
using Assignment = BasicAssignment<double>;
using ExactAssignment = BasicAssignment<Rational>;

inline constexpr double kDefaultDenGuard = 1e-8;

inline Assignment to_double(const ExactAssignment& a) {
  Assignment out;
  for (const auto& [k, v] : a) out.emplace(k, v.get_d());
  return out;
}

struct Evaluation {
  double value = 0;
  double scale = 0;  // largest |intermediate| seen
};

namespace detail {

class DoubleEvaluator {
 public:
  DoubleEvaluator(const Assignment& a, double guard) : a_(a), guard_(guard) {}

  double operator()(const Expr& e) {
    double v = eval(e);
    return v;
  }
  double scale() const { return scale_; }

 private:
  double eval(const Expr& e) {
    if (e.kind() == NodeKind::constant) return note(e.value().get_d());
    if (e.kind() == NodeKind::symbol) {
      auto it = a_.find(e.sym().name);
      if (it == a_.end()) throw UnboundSymbolError(e.sym().name);
      return note(it->second);
    }
    bool memo = e.shared();
    if (memo)
      if (auto it = memo_.find(e.id()); it != memo_.end()) return it->second;
    double v = 0;
    switch (e.kind()) {
      case NodeKind::sum:
        for (const auto& t : e.args()) v += eval(t);
        break;
      case NodeKind::product:
        v = 1;
        for (const auto& t : e.args()) v *= eval(t);
        break;
      case NodeKind::quotient: {
        double n = eval(e.args()[0]);
        double d = eval(e.args()[1]);
        if (std::fabs(d) < guard_) throw SingularPointError("denominator near zero");
        v = n / d;
        break;
      }
      case NodeKind::power: {
        double b = eval(e.arg());
        long k = e.exponent();
        if (k < 0 && std::fabs(b) < guard_) throw SingularPointError("negative power near zero");
        v = std::pow(b, static_cast<double>(k));
        break;
      }
      case NodeKind::exp: v = std::exp(eval(e.arg())); break;
      case NodeKind::negate: v = -eval(e.arg()); break;
      default: break;
    }
    if (!std::isfinite(v)) throw SingularPointError("non-finite value");
    note(v);
    if (memo) memo_.emplace(e.id(), v);
    return v;
  }

  double note(double v) {
    scale_ = std::max(scale_, std::fabs(v));
    return v;
  }

  const Assignment& a_;
  double guard_;
  double scale_ = 0;
  std::unordered_map<const Node*, double> memo_;
};

class ExactEvaluator {
 public:
  explicit ExactEvaluator(const ExactAssignment& a) : a_(a) {}

  Rational operator()(const Expr& e) {
    switch (e.kind()) {
      case NodeKind::constant: return e.value();
      case NodeKind::symbol: {
        auto it = a_.find(e.sym().name);
        if (it == a_.end()) throw UnboundSymbolError(e.sym().name);
        return it->second;
      }
      default: break;
    }
    bool memo = e.shared();
    if (memo)
      if (auto it = memo_.find(e.id()); it != memo_.end()) return it->second;
    Rational v;
    switch (e.kind()) {
      case NodeKind::sum:
        v = 0;
        for (const auto& t : e.args()) v += (*this)(t);
        break;
      case NodeKind::product:
        v = 1;
        for (const auto& t : e.args()) v *= (*this)(t);
        break;
      case NodeKind::quotient: {
        Rational n = (*this)(e.args()[0]);
        Rational d = (*this)(e.args()[1]);
        if (d == 0) throw SingularPointError("zero denominator");
        v = n / d;
        break;
      }
      case NodeKind::power: {
        Rational b = (*this)(e.arg());
        long k = e.exponent();
        if (k < 0) {
          if (b == 0) throw SingularPointError("negative power of zero");
          b = 1 / b;
          k = -k;
        }
        v = 1;
        for (long i = 0; i < k; ++i) v *= b;
        break;
      }
      case NodeKind::exp: {
        Rational x = (*this)(e.arg());
        if (x != 0) throw NotExactError("exp of a nonzero rational");
        v = 1;
        break;
      }
      case NodeKind::negate: v = -(*this)(e.arg()); break;
      default: break;
    }
    if (memo) memo_.emplace(e.id(), v);
    return v;
  }

 private:
  const ExactAssignment& a_;
  std::unordered_map<const Node*, Rational> memo_;
};

}  // namespace detail

/// Floating evaluation with the magnitude of the largest intermediate.
inline Evaluation evaluate(const Expr& e, const Assignment& a, double den_guard = kDefaultDenGuard) {
  detail::DoubleEvaluator ev(a, den_guard);
  double v = ev(e);
  return {v, ev.scale()};
}

inline double eval(const Expr& e, const Assignment& a, double den_guard = kDefaultDenGuard) {
  return evaluate(e, a, den_guard).value;
}

/// Exact value; throws NotExactError when exp of a nonzero argument appears.
inline Rational eval_exact(const Expr& e, const ExactAssignment& a) {
  return detail::ExactEvaluator(a)(e);
}

}  // namespace bisym
