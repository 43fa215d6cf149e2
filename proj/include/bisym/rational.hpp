#pragma once

#include <gmpxx.h>

#include <cmath>
#include <stdexcept>
#include <string>
#include <string_view>

namespace bisym {

/// Exact rational scalar used by every exact-arithmetic check.
using Rational = mpq_class;

inline Rational make_rational(long num, long den = 1) {
  if (den == 0) throw std::invalid_argument("rational with zero denominator");
  Rational r(num, den);
  r.canonicalize();
  return r;
}

inline double to_double(const Rational& r) { return r.get_d(); }

inline Rational abs(const Rational& r) { return r < 0 ? Rational(-r) : r; }

inline std::string to_string(const Rational& r) { return r.get_str(); }

/// Parses "p" or "p/q" (optional leading sign).
inline Rational parse_rational(std::string_view text) {
  Rational r;
  if (r.set_str(std::string(text), 10) != 0 || r.get_den() == 0)
    throw std::invalid_argument("not a rational literal: " + std::string(text));
  r.canonicalize();
  return r;
}

}  // namespace bisym
