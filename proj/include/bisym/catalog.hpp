#pragma once

#include <filesystem>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "bisym/exchange.hpp"
#include "bisym/parse.hpp"

namespace bisym {

/// Schema or expression problem in a catalog file; `field` is a dotted path.
struct CatalogError : std::runtime_error {
  CatalogError(std::string field, const std::string& msg)
      : std::runtime_error(field.empty() ? msg : field + ": " + msg), field(std::move(field)) {}
  std::string field;
};

struct Parameter {
  Symbol symbol;
  std::string range;
};

struct NamedFunctions {
  std::vector<std::string> names;
  std::vector<Expr> coordinates;  // over the side's coordinates
  std::vector<Expr> darboux;      // over the side's Darboux symbols
};

struct SideData {
  std::string group;
  std::vector<Symbol> darboux;
  PoissonField phase;
  std::vector<Expr> chart;  // darboux[i] as a function of phase.coords
  NamedFunctions S;
  std::optional<NamedFunctions> invariants;
  std::vector<std::vector<std::size_t>> involutive;  // zero-based
  Matrix<Expr> omega;

  const std::vector<Symbol>& coords() const { return phase.coords; }

  /// "S2" or an invariant name, resolved to its coordinate form.
  std::optional<Expr> function(const std::string& name) const {
    for (std::size_t i = 0; i < S.names.size(); ++i)
      if (S.names[i] == name) return S.coordinates[i];
    if (invariants)
      for (std::size_t i = 0; i < invariants->names.size(); ++i)
        if (invariants->names[i] == name) return invariants->coordinates[i];
    return std::nullopt;
  }

  /// Same lookup, Darboux form.
  std::optional<Expr> darboux_function(const std::string& name) const {
    for (std::size_t i = 0; i < S.names.size(); ++i)
      if (S.names[i] == name) return S.darboux[i];
    if (invariants)
      for (std::size_t i = 0; i < invariants->names.size(); ++i)
        if (invariants->names[i] == name) return invariants->darboux[i];
    return std::nullopt;
  }
};

struct FlowSpec {
  std::string side;  // "g" or "gdual"
  std::string H, F;
  std::optional<std::vector<Rational>> start;
  bool leaves_chart = false;  // exact trajectory meets a chart singularity before the horizon
  std::string note;
};

struct ClassificationSpec {
  std::string functions = "S";  // "S" or "invariants"
  bool bracket_preserving = true;
  bool invariant_mapping = true;
  std::optional<Matrix<Expr>> coefficients;
};

struct Erratum {
  std::string field, printed, note;
};

struct CatalogEntry {
  std::string id;
  std::string bialgebra;
  std::size_t dim = 0;
  std::vector<Parameter> parameters;
  StructureConstants f, ft;
  std::optional<StructureConstants> symmetry;  // targets of the S brackets; ft when absent
  Matrix<Expr> C;
  std::optional<RMatrix> r;
  std::string r_algebra;  // "g" or "gdual"
  std::optional<MatrixRep> rep;
  std::string rep_algebra;
  SideData g, gdual;
  CoordinateMap map;   // x(y)
  CoordinateMap zmap;  // zt(z)
  std::vector<FlowSpec> flows;
  ClassificationSpec classification;
  std::vector<Erratum> errata;
  std::string source;

  const StructureConstants& symmetry_constants() const { return symmetry ? *symmetry : ft; }
  const SideData& side(const std::string& name) const { return name == "g" ? g : gdual; }
  const StructureConstants& algebra(const std::string& name) const { return name == "g" ? f : ft; }

  std::vector<Symbol> parameter_symbols() const {
    std::vector<Symbol> out;
    for (const auto& p : parameters) out.push_back(p.symbol);
    return out;
  }
};

namespace detail {

using nlohmann::json;

class EntryReader {
 public:
  const json& need(const json& obj, const std::string& key, const std::string& path) {
    if (!obj.is_object()) throw CatalogError(path, "expected an object");
    auto it = obj.find(key);
    if (it == obj.end()) throw CatalogError(join(path, key), "missing field");
    return *it;
  }

  const json* maybe(const json& obj, const std::string& key) {
    auto it = obj.find(key);
    return it == obj.end() || it->is_null() ? nullptr : &*it;
  }

  static std::string join(const std::string& path, const std::string& key) {
    return path.empty() ? key : path + "." + key;
  }
  static std::string index(const std::string& path, std::size_t i) {
    return path + "[" + std::to_string(i) + "]";
  }

  std::string text(const json& j, const std::string& path) {
    if (!j.is_string()) throw CatalogError(path, "expected a string");
    return j.get<std::string>();
  }

  std::size_t count(const json& j, const std::string& path) {
    if (!j.is_number_integer()) throw CatalogError(path, "expected an integer");
    return j.get<std::size_t>();
  }

  const json& array(const json& j, const std::string& path, std::optional<std::size_t> size = std::nullopt) {
    if (!j.is_array()) throw CatalogError(path, "expected an array");
    if (size && j.size() != *size)
      throw CatalogError(path, "expected " + std::to_string(*size) + " elements, found " + std::to_string(j.size()));
    return j;
  }

  Expr expr(const json& j, const std::string& path, const SymbolTable& table) {
    std::string s = text(j, path);
    try {
      return parse_expr(s, table);
    } catch (const UnknownSymbolError& e) {
      throw CatalogError(path, "undeclared symbol '" + e.name + "' at position " + std::to_string(e.position));
    } catch (const ParseError& e) {
      throw CatalogError(path, std::string("parse error: ") + e.what());
    }
  }

  std::vector<Expr> exprs(const json& j, const std::string& path, const SymbolTable& table,
                          std::optional<std::size_t> size = std::nullopt) {
    std::vector<Expr> out;
    const json& a = array(j, path, size);
    for (std::size_t i = 0; i < a.size(); ++i) out.push_back(expr(a[i], index(path, i), table));
    return out;
  }

  Matrix<Expr> matrix(const json& j, const std::string& path, const SymbolTable& table, std::size_t n) {
    Matrix<Expr> m(n, n);
    const json& rows = array(j, path, n);
    for (std::size_t i = 0; i < n; ++i) {
      std::string rp = index(path, i);
      const json& row = array(rows[i], rp, n);
      for (std::size_t k = 0; k < n; ++k) m(i, k) = expr(row[k], index(rp, k), table);
    }
    return m;
  }

  std::size_t one_based(const json& j, const std::string& path, std::size_t n) {
    std::size_t v = count(j, path);
    if (v < 1 || v > n) throw CatalogError(path, "index " + std::to_string(v) + " outside 1.." + std::to_string(n));
    return v - 1;
  }

  StructureConstants constants(const json& j, const std::string& path, const SymbolTable& params, std::size_t n) {
    std::vector<SparseEntry> entries;
    const json& a = array(j, path);
    for (std::size_t e = 0; e < a.size(); ++e) {
      std::string p = index(path, e);
      const json& t = array(a[e], p, 4);
      std::size_t i = one_based(t[0], index(p, 0), n), k = one_based(t[1], index(p, 1), n);
      std::size_t l = one_based(t[2], index(p, 2), n);
      if (i == k) throw CatalogError(p, "diagonal structure constant");
      entries.push_back({i, k, l, expr(t[3], index(p, 3), params)});
    }
    return StructureConstants::from_sparse(n, entries);
  }

  /// Upper-triangle triples [i, j, "value"] into a skew matrix.
  Matrix<Expr> skew(const json& j, const std::string& path, const SymbolTable& table, std::size_t n) {
    Matrix<Expr> m(n, n);
    const json& a = array(j, path);
    for (std::size_t e = 0; e < a.size(); ++e) {
      std::string p = index(path, e);
      const json& t = array(a[e], p, 3);
      std::size_t i = one_based(t[0], index(p, 0), n), k = one_based(t[1], index(p, 1), n);
      if (i == k) throw CatalogError(p, "diagonal entry in a skew matrix");
      Expr v = expr(t[2], index(p, 2), table);
      m(i, k) = v;
      m(k, i) = -v;
    }
    return m;
  }

  std::vector<Symbol> declare(const json& j, const std::string& path, SymbolTable& table,
                              SymbolKind kind, std::size_t n) {
    std::vector<Symbol> out;
    const json& a = array(j, path, n);
    for (std::size_t i = 0; i < n; ++i) {
      std::string name = text(a[i], index(path, i));
      try {
        out.push_back(table.declare(name, kind));
      } catch (const std::invalid_argument& e) {
        throw CatalogError(index(path, i), e.what());
      }
    }
    return out;
  }

  NamedFunctions functions(const json& j, const std::string& path, const SymbolTable& coords,
                           const SymbolTable& darboux, std::size_t count, const std::string& prefix) {
    NamedFunctions nf;
    nf.coordinates = exprs(need(j, "coordinates", path), join(path, "coordinates"), coords, count);
    nf.darboux = exprs(need(j, "darboux", path), join(path, "darboux"), darboux, nf.coordinates.size());
    if (const json* names = maybe(j, "names")) {
      const json& a = array(*names, join(path, "names"), nf.coordinates.size());
      for (std::size_t i = 0; i < a.size(); ++i) nf.names.push_back(text(a[i], index(join(path, "names"), i)));
    } else {
      for (std::size_t i = 0; i < nf.coordinates.size(); ++i) nf.names.push_back(prefix + std::to_string(i + 1));
    }
    return nf;
  }

  SideData side(const json& j, const std::string& path, const std::vector<Parameter>& params, std::size_t n,
                const json& omega, const std::string& omega_path) {
    SideData s;
    if (const json* g = maybe(j, "group")) s.group = text(*g, join(path, "group"));
    SymbolTable coords, darboux, constant;
    for (auto* t : {&coords, &darboux, &constant})
      for (const auto& p : params) t->declare(p.symbol.name, SymbolKind::parameter);
    std::vector<Symbol> xs = declare(need(j, "coordinates", path), join(path, "coordinates"), coords,
                                     SymbolKind::coordinate, n);
    s.darboux = declare(need(j, "darboux", path), join(path, "darboux"), darboux, SymbolKind::coordinate, n);
    s.phase = PoissonField{xs, skew(need(j, "poisson", path), join(path, "poisson"), coords, n)};
    s.chart = exprs(need(j, "chart", path), join(path, "chart"), coords, n);
    s.S = functions(need(j, "S", path), join(path, "S"), coords, darboux, n, "S");
    if (const json* inv = maybe(j, "invariants"))
    {
      std::string ip = join(path, "invariants");
      std::size_t k = array(need(*inv, "coordinates", ip), join(ip, "coordinates")).size();
      s.invariants = functions(*inv, ip, coords, darboux, k, "I");
    }
    if (const json* inv = maybe(j, "involutive")) {
      std::string p = join(path, "involutive");
      const json& a = array(*inv, p);
      for (std::size_t e = 0; e < a.size(); ++e) {
        std::vector<std::size_t> set;
        const json& members = array(a[e], index(p, e));
        for (std::size_t m = 0; m < members.size(); ++m)
          set.push_back(one_based(members[m], index(index(p, e), m), n));
        std::sort(set.begin(), set.end());
        s.involutive.push_back(set);
      }
      std::sort(s.involutive.begin(), s.involutive.end());
    }
    s.omega = skew(omega, omega_path, constant, n);
    return s;
  }
};

}  // namespace detail

inline CatalogEntry load_entry_json(const nlohmann::json& doc, const std::string& source = {}) {
  detail::EntryReader rd;
  CatalogEntry e;
  e.source = source;
  e.id = rd.text(rd.need(doc, "id", ""), "id");
  if (const auto* b = rd.maybe(doc, "bialgebra")) e.bialgebra = rd.text(*b, "bialgebra");
  e.dim = rd.count(rd.need(doc, "dimension", ""), "dimension");
  if (e.dim == 0) throw CatalogError("dimension", "must be positive");
  std::size_t n = e.dim;

  SymbolTable params;
  if (const auto* ps = rd.maybe(doc, "parameters")) {
    const auto& a = rd.array(*ps, "parameters");
    for (std::size_t i = 0; i < a.size(); ++i) {
      std::string p = detail::EntryReader::index("parameters", i);
      std::string name = rd.text(rd.need(a[i], "name", p), p + ".name");
      std::string range = a[i].contains("range") ? rd.text(a[i]["range"], p + ".range") : "nonzero";
      try {
        e.parameters.push_back({params.declare(name, SymbolKind::parameter), range});
      } catch (const std::invalid_argument& err) {
        throw CatalogError(p + ".name", err.what());
      }
    }
  }

  const auto& st = rd.need(doc, "structure", "");
  e.f = rd.constants(rd.need(st, "g", "structure"), "structure.g", params, n);
  e.ft = rd.constants(rd.need(st, "gdual", "structure"), "structure.gdual", params, n);
  if (const auto* sym = rd.maybe(st, "symmetry")) e.symmetry = rd.constants(*sym, "structure.symmetry", params, n);

  e.C = rd.matrix(rd.need(doc, "isomorphism", ""), "isomorphism", params, n);

  auto algebra_name = [&](const nlohmann::json& j, const std::string& path) {
    std::string s = rd.text(j, path);
    if (s != "g" && s != "gdual") throw CatalogError(path, "expected \"g\" or \"gdual\"");
    return s;
  };

  if (const auto* r = rd.maybe(doc, "r")) {
    std::string var = rd.text(rd.need(*r, "variance", "r"), "r.variance");
    if (var != "upper" && var != "lower") throw CatalogError("r.variance", "expected \"upper\" or \"lower\"");
    e.r_algebra = algebra_name(rd.need(*r, "algebra", "r"), "r.algebra");
    std::vector<WedgeTerm> terms;
    const auto& w = rd.array(rd.need(*r, "wedges", "r"), "r.wedges");
    for (std::size_t i = 0; i < w.size(); ++i) {
      std::string p = detail::EntryReader::index("r.wedges", i);
      const auto& t = rd.array(w[i], p, 3);
      terms.push_back({rd.one_based(t[0], p + "[0]", n), rd.one_based(t[1], p + "[1]", n),
                       rd.expr(t[2], p + "[2]", params)});
    }
    e.r = RMatrix::from_wedges(n, terms, var == "upper" ? Variance::upper : Variance::lower);
  }

  if (const auto* rep = rd.maybe(doc, "rep")) {
    e.rep_algebra = algebra_name(rd.need(*rep, "algebra", "rep"), "rep.algebra");
    const auto& ms = rd.array(rd.need(*rep, "matrices", "rep"), "rep.matrices", n);
    MatrixRep mr;
    std::size_t size = rd.array(ms[0], "rep.matrices[0]").size();
    if (size == 0) throw CatalogError("rep.matrices[0]", "empty matrix");
    for (std::size_t i = 0; i < n; ++i)
      mr.rho.push_back(rd.matrix(ms[i], detail::EntryReader::index("rep.matrices", i), params, size));
    e.rep = mr;
  }

  const auto& sides = rd.need(doc, "sides", "");
  const auto& omega = rd.need(doc, "omega", "");
  e.g = rd.side(rd.need(sides, "g", "sides"), "sides.g", e.parameters, n, rd.need(omega, "g", "omega"), "omega.g");
  e.gdual = rd.side(rd.need(sides, "gdual", "sides"), "sides.gdual", e.parameters, n,
                    rd.need(omega, "gdual", "omega"), "omega.gdual");

  auto table_of = [&](const std::vector<Symbol>& syms) {
    SymbolTable t;
    for (const auto& p : e.parameters) t.declare(p.symbol.name, SymbolKind::parameter);
    for (const auto& s : syms) t.declare(s.name, s.kind);
    return t;
  };
  e.map = CoordinateMap{e.gdual.coords(), e.g.coords(),
                        rd.exprs(rd.need(doc, "map", ""), "map", table_of(e.gdual.coords()), n)};
  e.zmap = CoordinateMap{e.g.darboux, e.gdual.darboux,
                         rd.exprs(rd.need(doc, "zmap", ""), "zmap", table_of(e.g.darboux), n)};

  if (const auto* fl = rd.maybe(doc, "flows")) {
    const auto& a = rd.array(*fl, "flows");
    for (std::size_t i = 0; i < a.size(); ++i) {
      std::string p = detail::EntryReader::index("flows", i);
      FlowSpec fs;
      fs.side = algebra_name(rd.need(a[i], "side", p), p + ".side");
      fs.H = rd.text(rd.need(a[i], "H", p), p + ".H");
      fs.F = rd.text(rd.need(a[i], "F", p), p + ".F");
      const SideData& s = e.side(fs.side);
      if (!s.function(fs.H)) throw CatalogError(p + ".H", "unknown function '" + fs.H + "'");
      if (!s.function(fs.F)) throw CatalogError(p + ".F", "unknown function '" + fs.F + "'");
      if (const auto* start = rd.maybe(a[i], "start")) {
        const auto& pts = rd.array(*start, p + ".start", n);
        std::vector<Rational> x0;
        for (std::size_t k = 0; k < pts.size(); ++k) {
          std::string kp = detail::EntryReader::index(p + ".start", k);
          try {
            x0.push_back(parse_rational(rd.text(pts[k], kp)));
          } catch (const std::exception& err) {
            throw CatalogError(kp, err.what());
          }
        }
        fs.start = x0;
      }
      if (const auto* lc = rd.maybe(a[i], "leaves_chart")) {
        if (!lc->is_boolean()) throw CatalogError(p + ".leaves_chart", "expected a boolean");
        fs.leaves_chart = lc->get<bool>();
      }
      if (const auto* nt = rd.maybe(a[i], "note")) fs.note = rd.text(*nt, p + ".note");
      e.flows.push_back(fs);
    }
  }

  if (const auto* cl = rd.maybe(doc, "classification")) {
    auto& c = e.classification;
    if (const auto* fn = rd.maybe(*cl, "functions")) {
      c.functions = rd.text(*fn, "classification.functions");
      if (c.functions != "S" && c.functions != "invariants")
        throw CatalogError("classification.functions", "expected \"S\" or \"invariants\"");
      if (c.functions == "invariants" && (!e.g.invariants || !e.gdual.invariants))
        throw CatalogError("classification.functions", "both sides need invariants");
    }
    auto flag = [&](const char* key, bool& out) {
      if (const auto* v = rd.maybe(*cl, key)) {
        if (!v->is_boolean()) throw CatalogError(std::string("classification.") + key, "expected a boolean");
        out = v->get<bool>();
      }
    };
    flag("bracket_preserving", c.bracket_preserving);
    flag("invariant_mapping", c.invariant_mapping);
    if (const auto* co = rd.maybe(*cl, "coefficients")) {
      std::size_t k = c.functions == "S" ? n : e.g.invariants->coordinates.size();
      c.coefficients = rd.matrix(*co, "classification.coefficients", params, k);
    }
  }

  if (const auto* er = rd.maybe(doc, "errata")) {
    const auto& a = rd.array(*er, "errata");
    for (std::size_t i = 0; i < a.size(); ++i) {
      std::string p = detail::EntryReader::index("errata", i);
      e.errata.push_back({rd.text(rd.need(a[i], "field", p), p + ".field"),
                          rd.text(rd.need(a[i], "printed", p), p + ".printed"),
                          a[i].contains("note") ? rd.text(a[i]["note"], p + ".note") : std::string()});
    }
  }
  return e;
}

inline CatalogEntry load_entry(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw CatalogError("", "cannot open " + path.string());
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(in);
  } catch (const nlohmann::json::parse_error& err) {
    throw CatalogError("", path.filename().string() + ": malformed JSON: " + err.what());
  }
  return load_entry_json(doc, path.string());
}

/// *.json files in name order.
inline std::vector<std::filesystem::path> catalog_files(const std::filesystem::path& dir) {
  std::vector<std::filesystem::path> out;
  if (!std::filesystem::is_directory(dir)) throw CatalogError("", "not a directory: " + dir.string());
  for (const auto& de : std::filesystem::directory_iterator(dir))
    if (de.is_regular_file() && de.path().extension() == ".json") out.push_back(de.path());
  std::sort(out.begin(), out.end());
  return out;
}

}  // namespace bisym
