#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace bisym {

struct ParseError : std::runtime_error {
  std::size_t position;
  ParseError(const std::string& msg, std::size_t pos)
      : std::runtime_error(msg + " at position " + std::to_string(pos)), position(pos) {}
};

struct UnknownSymbolError : ParseError {
  std::string name;
  UnknownSymbolError(const std::string& n, std::size_t pos)
      : ParseError("unknown symbol '" + n + "'", pos), name(n) {}
};

struct UnboundSymbolError : std::runtime_error {
  std::string name;
  explicit UnboundSymbolError(const std::string& n)
      : std::runtime_error("unbound symbol '" + n + "'"), name(n) {}
};

/// A denominator came within den_guard of zero, or the value overflowed.
struct SingularPointError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Exact evaluation met exp of a nonzero argument.
struct NotExactError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Every sampled point was singular.
struct InconclusiveError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct SingularMatrixError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct DimensionError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

}  // namespace bisym
