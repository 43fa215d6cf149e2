#pragma once

#include <filesystem>
#include <string>

#include "bisym/bisym.hpp"

namespace testing_support {

inline std::filesystem::path catalog_dir() { return BISYM_CATALOG_DEFAULT; }

inline const bisym::CatalogEntry& entry(const std::string& id) {
  static std::map<std::string, bisym::CatalogEntry> cache;
  auto it = cache.find(id);
  if (it == cache.end()) it = cache.emplace(id, bisym::load_entry(catalog_dir() / (id + ".json"))).first;
  return it->second;
}

inline const bisym::CatalogEntry& ex1() { return entry("ex1_A4_9_0_iv__A4_9_0"); }
inline const bisym::CatalogEntry& ex2() { return entry("ex2_A2xA2__A2xA2_vi"); }
inline const bisym::CatalogEntry& ex3() { return entry("ex3_A4_9_0__A4_9_0_iv"); }
inline const bisym::CatalogEntry& ex4() { return entry("ex4_A4_9_1__A4_9_1_i"); }
inline const bisym::CatalogEntry& ex5() { return entry("ex5_A4_7_i__A4_7"); }
inline const bisym::CatalogEntry& trivial() { return entry("trivial_abelian2"); }

/// 1-based sparse entries, all parameter-free.
inline bisym::Constants constants(std::size_t n, std::initializer_list<std::array<int, 4>> entries) {
  bisym::Constants f(n);
  for (const auto& e : entries) {
    f(e[0] - 1, e[1] - 1, e[2] - 1) = e[3];
    f(e[1] - 1, e[0] - 1, e[2] - 1) = -e[3];
  }
  return f;
}

inline bisym::ExactAssignment params(std::initializer_list<std::pair<const char*, bisym::Rational>> kv) {
  bisym::ExactAssignment a;
  for (const auto& [k, v] : kv) a[k] = v;
  return a;
}

inline bisym::ExactAssignment sample(const bisym::CatalogEntry& e, std::uint64_t i = 0) {
  return bisym::PointSampler(bisym::SamplingConfig{}).sample_parameters(e.parameter_symbols(), i);
}

inline std::vector<bisym::Symbol> symbols(std::initializer_list<const char*> names) {
  std::vector<bisym::Symbol> out;
  for (const char* n : names) out.push_back({n, bisym::SymbolKind::coordinate});
  return out;
}

inline bisym::SymbolTable table(const std::vector<bisym::Symbol>& syms,
                                std::initializer_list<const char*> parameters = {}) {
  bisym::SymbolTable t;
  for (const auto& s : syms) t.declare(s.name, s.kind);
  for (const char* p : parameters) t.declare(p, bisym::SymbolKind::parameter);
  return t;
}

}  // namespace testing_support
