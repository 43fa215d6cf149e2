#pragma once

#include <cctype>
#include <string>
#include <string_view>

#include "bisym/errors.hpp"
#include "bisym/expr.hpp"

namespace bisym {

namespace detail {

// expr := term (('+'|'-') term)*
// term := factor (('*'|'/') factor)*
// factor := atom ['^' integer]
// atom := rational | symbol | 'exp' '(' expr ')' | '(' expr ')' | '-' atom
// A literal p/q becomes one rational constant unless it directly follows '/'
// or q carries an exponent, so values always match left-to-right division.
class Parser {
 public:
  Parser(std::string_view text, const SymbolTable& table) : s_(text), table_(table) {}

  Expr parse() {
    Expr e = expr();
    skip();
    if (pos_ != s_.size()) fail("unexpected '" + std::string(1, s_[pos_]) + "'");
    return e;
  }

 private:
  Expr expr() {
    std::vector<Expr> terms{term()};
    for (;;) {
      skip();
      if (peek('+')) {
        ++pos_;
        terms.push_back(term());
      } else if (peek('-')) {
        ++pos_;
        terms.push_back(Expr::raw_negate(term()));
      } else {
        break;
      }
    }
    return terms.size() == 1 ? terms[0] : Expr::raw_sum(std::move(terms));
  }

  Expr term() {
    Expr cur = factor(true);
    bool open_product = false;
    for (;;) {
      skip();
      if (peek('*')) {
        ++pos_;
        Expr f = factor(true);
        if (open_product) {
          std::vector<Expr> fs = cur.args();
          fs.push_back(f);
          cur = Expr::raw_product(std::move(fs));
        } else {
          cur = Expr::raw_product({cur, f});
          open_product = true;
        }
      } else if (peek('/')) {
        ++pos_;
        cur = Expr::raw_quotient(cur, factor(false));
        open_product = false;
      } else {
        return cur;
      }
    }
  }

  Expr factor(bool allow_fraction) {
    Expr base = atom(allow_fraction);
    skip();
    if (peek('^')) {
      ++pos_;
      skip();
      bool neg = false;
      if (peek('-') || peek('+')) {
        neg = s_[pos_] == '-';
        ++pos_;
        skip();
      }
      std::size_t at = pos_;
      std::string digits = integer();
      if (digits.empty()) fail("expected integer exponent");
      long n;
      try {
        n = std::stol(digits);
      } catch (const std::exception&) {
        throw ParseError("exponent out of range", at);
      }
      return Expr::raw_power(base, neg ? -n : n);
    }
    return base;
  }

  Expr atom(bool allow_fraction) {
    skip();
    if (pos_ >= s_.size()) fail("unexpected end of input");
    char c = s_[pos_];
    if (c == '-') {
      ++pos_;
      Expr inner = atom(allow_fraction);
      if (inner.is_constant()) return Expr(Rational(-inner.value()));
      return Expr::raw_negate(inner);
    }
    if (c == '(') {
      ++pos_;
      Expr e = expr();
      skip();
      if (!peek(')')) fail("expected ')'");
      ++pos_;
      return e;
    }
    if (std::isdigit(static_cast<unsigned char>(c))) return number(allow_fraction);
    if (std::isalpha(static_cast<unsigned char>(c))) {
      std::size_t at = pos_;
      std::string name = identifier();
      skip();
      if (name == "exp" && peek('(')) {
        ++pos_;
        Expr arg = expr();
        skip();
        if (!peek(')')) fail("expected ')' after exp argument");
        ++pos_;
        return Expr::raw_exp(arg);
      }
      const Symbol* s = table_.find(name);
      if (!s) throw UnknownSymbolError(name, at);
      return Expr::symbol(*s);
    }
    fail("unexpected '" + std::string(1, c) + "'");
  }

  Expr number(bool allow_fraction) {
    Rational num(integer());
    if (allow_fraction) {
      std::size_t save = pos_;
      skip();
      if (peek('/')) {
        ++pos_;
        skip();
        if (pos_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[pos_]))) {
          std::size_t at = pos_;
          std::string den = integer();
          std::size_t after = pos_;
          skip();
          if (!peek('^')) {
            Rational d(den);
            if (d == 0) throw ParseError("zero denominator in rational literal", at);
            Rational r = num / d;
            r.canonicalize();
            return Expr(r);
          }
          (void)after;
        }
      }
      pos_ = save;
    }
    return Expr(num);
  }

  std::string integer() {
    std::size_t start = pos_;
    while (pos_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[pos_]))) ++pos_;
    return std::string(s_.substr(start, pos_ - start));
  }

  std::string identifier() {
    std::size_t start = pos_;
    while (pos_ < s_.size() &&
           (std::isalnum(static_cast<unsigned char>(s_[pos_])) || s_[pos_] == '_'))
      ++pos_;
    return std::string(s_.substr(start, pos_ - start));
  }

  void skip() {
    while (pos_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[pos_]))) ++pos_;
  }
  bool peek(char c) const { return pos_ < s_.size() && s_[pos_] == c; }
  [[noreturn]] void fail(const std::string& msg) const { throw ParseError(msg, pos_); }

  std::string_view s_;
  const SymbolTable& table_;
  std::size_t pos_ = 0;
};

inline std::string render_atom(const Expr& e);
inline std::string render_term(const Expr& e);

inline std::string render_constant(const Rational& v) {
  if (v.get_den() == 1 && v >= 0) return v.get_num().get_str();
  return "(" + v.get_str() + ")";
}

inline std::string paren(const std::string& s) { return "(" + s + ")"; }

}  // namespace detail

inline Expr parse_expr(std::string_view text, const SymbolTable& table) {
  return detail::Parser(text, table).parse();
}

/// Grammar text; parse(render(e)) rebuilds the same tree for parser-built e.
inline std::string render(const Expr& e) {
  using namespace detail;
  switch (e.kind()) {
    case NodeKind::constant: return render_constant(e.value());
    case NodeKind::symbol: return e.sym().name;
    case NodeKind::sum: {
      std::string out;
      for (std::size_t i = 0; i < e.args().size(); ++i) {
        const Expr& t = e.args()[i];
        if (i == 0) {
          out = t.kind() == NodeKind::sum ? paren(render(t)) : render_term(t);
        } else if (t.kind() == NodeKind::negate) {
          out += " - " + render_term(t.arg());
        } else {
          out += " + " + render_term(t);
        }
      }
      return out;
    }
    case NodeKind::product: {
      std::string out;
      for (std::size_t i = 0; i < e.args().size(); ++i) {
        const Expr& f = e.args()[i];
        if (i) out += "*";
        bool wrap = f.kind() == NodeKind::sum || f.kind() == NodeKind::product ||
                    f.kind() == NodeKind::quotient;
        out += wrap ? paren(render(f)) : render_term(f);
      }
      return out;
    }
    case NodeKind::quotient: {
      const Expr& n = e.args()[0];
      const Expr& d = e.args()[1];
      bool bare = n.kind() == NodeKind::symbol || n.kind() == NodeKind::exp ||
                  n.kind() == NodeKind::power || n.kind() == NodeKind::negate;
      std::string num = bare ? render(n) : paren(render(n));
      if (n.is_constant()) num = paren(render(n));
      bool atomic = d.kind() == NodeKind::symbol || d.kind() == NodeKind::exp ||
                    d.kind() == NodeKind::power ||
                    (d.is_constant() && d.value().get_den() == 1 && d.value() >= 0);
      return num + "/" + (atomic ? render(d) : paren(render(d)));
    }
    case NodeKind::power:
      return render_atom(e.arg()) + "^" + std::to_string(e.exponent());
    case NodeKind::exp: return "exp(" + render(e.arg()) + ")";
    case NodeKind::negate: {
      const Expr& a = e.arg();
      if (a.is_constant()) return "-" + paren(render(a));
      return "-" + render_atom(a);
    }
  }
  return {};
}

namespace detail {

// Operand of unary minus or '^'.
inline std::string render_atom(const Expr& e) {
  switch (e.kind()) {
    case NodeKind::symbol:
    case NodeKind::exp: return render(e);
    case NodeKind::constant:
      return e.value().get_den() == 1 && e.value() >= 0 ? render(e) : paren(render(e));
    case NodeKind::negate: return e.arg().is_constant() ? paren(render(e)) : render(e);
    default: return paren(render(e));
  }
}

// A summand or factor position: anything but a sum renders bare.
inline std::string render_term(const Expr& e) {
  if (e.kind() == NodeKind::sum) return paren(render(e));
  return render(e);
}

}  // namespace detail

}  // namespace bisym
