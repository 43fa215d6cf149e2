#include <cstdlib>
#include <fstream>
#include <iostream>

#include <CLI11.hpp>

#include "bisym/bisym.hpp"

namespace {

using namespace bisym;

enum Exit { ok = 0, failed = 1, usage = 2 };

std::filesystem::path catalog_dir(const std::string& flag) {
  if (!flag.empty()) return flag;
  if (const char* env = std::getenv("BISYM_CATALOG_DIR"); env && *env) return env;
  return BISYM_CATALOG_DEFAULT;
}

/// File named after the id first, then a scan of every entry.
CatalogEntry find_entry(const std::filesystem::path& dir, const std::string& id) {
  auto direct = dir / (id + ".json");
  if (std::filesystem::exists(direct)) return load_entry(direct);
  for (const auto& f : catalog_files(dir)) {
    try {
      CatalogEntry e = load_entry(f);
      if (e.id == id) return e;
    } catch (const CatalogError&) {
    }
  }
  throw CatalogError("", "no entry with id '" + id + "' in " + dir.string());
}

void write_out(const std::string& text, const std::string& path) {
  if (path.empty() || path == "-") {
    std::cout << text;
    return;
  }
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << text;
}

int cmd_list(const std::filesystem::path& dir) {
  int status = ok;
  for (const auto& f : catalog_files(dir)) {
    try {
      CatalogEntry e = load_entry(f);
      std::cout << e.id << "  " << e.bialgebra << "  dim " << e.dim;
      if (!e.parameters.empty()) {
        std::cout << "  params";
        for (const auto& p : e.parameters) std::cout << " " << p.symbol.name;
      }
      std::cout << "  flows " << e.flows.size() << "  errata " << e.errata.size() << "\n";
    } catch (const std::exception& ex) {
      std::cerr << "load error: " << ex.what() << "\n";
      status = usage;
    }
  }
  return status;
}

struct VerifyArgs {
  std::string entry, mutate, format = "text", out;
  bool all = false;
  std::uint64_t seed = 42;
  int trials = 20;
  double tol = 1e-9;
  unsigned jobs = 0;
  bool no_flows = false;
};

int cmd_verify(const std::filesystem::path& dir, const VerifyArgs& a) {
  VerifyConfig cfg;
  cfg.sampling.seed = a.seed;
  cfg.sampling.trials = a.trials;
  cfg.sampling.tol = {a.tol, a.tol};
  cfg.mutation = a.mutate;
  cfg.jobs = a.jobs;
  cfg.flows = !a.no_flows;
  ReportFormat fmt = a.format == "json" ? ReportFormat::json : ReportFormat::text;
  if (!a.entry.empty()) {
    VerificationReport r = verify_entry(find_entry(dir, a.entry), cfg);
    write_out(emit_report(r, fmt), a.out);
    return r.passed() ? ok : failed;
  }
  SummaryReport s = verify_all(dir, cfg);
  write_out(emit_report(s, fmt), a.out);
  if (!s.load_errors.empty()) return usage;
  return s.ok() ? ok : failed;
}

struct FlowArgs {
  std::string entry, hamiltonian, side = "g", out;
  double T = 1.0, dt = 1e-3;
  std::uint64_t seed = 42;
};

/// CSV of the H-flow with every named function of the side as an observable.
int cmd_flow(const std::filesystem::path& dir, const FlowArgs& a) {
  CatalogEntry e = find_entry(dir, a.entry);
  const SideData& side = e.side(a.side);
  auto H = side.function(a.hamiltonian);
  if (!H) {
    std::cerr << "no function '" << a.hamiltonian << "' on side " << a.side << "\n";
    return usage;
  }
  SamplingConfig sc;
  sc.seed = a.seed;
  Assignment params = to_double(PointSampler(sc).sample_parameters(e.parameter_symbols(), 0));

  std::vector<Expr> F = side.S.coordinates;
  std::vector<std::string> names = side.S.names;
  if (side.invariants) {
    F.insert(F.end(), side.invariants->coordinates.begin(), side.invariants->coordinates.end());
    names.insert(names.end(), side.invariants->names.begin(), side.invariants->names.end());
  }
  std::vector<Expr> field = hamiltonian_vector_field(side.phase, *H);
  std::vector<double> x0;
  for (const auto& fs : e.flows)
    if (fs.side == a.side && fs.H == a.hamiltonian && fs.start)
      for (const auto& v : *fs.start) x0.push_back(to_double(v));
  if (x0.empty()) {
    std::vector<Expr> probe = field;
    probe.insert(probe.end(), F.begin(), F.end());
    auto s = detail::default_start(side.coords(), probe, params, sc.den_guard);
    if (!s) {
      std::cerr << "no nonsingular start point\n";
      return failed;
    }
    x0 = *s;
  }
  Trajectory tr = integrate(field, side.coords(), x0, a.dt, a.T, params, sc.den_guard);
  if (a.out.empty() || a.out == "-") {
    write_csv(std::cout, tr, F, params);
  } else {
    std::ofstream out(a.out);
    if (!out) throw std::runtime_error("cannot write " + a.out);
    write_csv(out, tr, F, params);
  }
  std::cerr << "columns F1..F" << F.size() << ":";
  for (const auto& n : names) std::cerr << " " << n;
  std::cerr << "\n";
  if (tr.aborted) {
    std::cerr << "stopped at t=" << tr.times.back() << ": " << tr.abort_reason << "\n";
    return failed;
  }
  DriftReport dr = conservation_drift(tr, F, params);
  for (std::size_t k = 0; k < F.size(); ++k)
    std::cerr << names[k] << " relative drift " << dr.relative[k] << "\n";
  return ok;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"bi-symplectic bialgebra catalog verifier"};
  app.require_subcommand(1);
  std::string catalog;
  app.add_option("--catalog", catalog, "catalog directory (default: $BISYM_CATALOG_DIR or the built-in path)");

  auto* list = app.add_subcommand("list", "catalog inventory");

  VerifyArgs va;
  auto* verify = app.add_subcommand("verify", "run every check on one entry or the whole catalog");
  auto* entry_opt = verify->add_option("--entry", va.entry, "entry id");
  verify->add_flag("--all", va.all, "verify every entry (default)")->excludes(entry_opt);
  verify->add_option("--seed", va.seed, "master seed");
  verify->add_option("--trials", va.trials, "points per randomized check")->check(CLI::PositiveNumber);
  verify->add_option("--tol", va.tol, "absolute and relative tolerance")->check(CLI::PositiveNumber);
  verify->add_option("--mutate", va.mutate, "negative control")->check(CLI::IsMember(mutation_flags()));
  verify->add_option("--format", va.format, "report format")->check(CLI::IsMember({"json", "text"}));
  verify->add_option("--out", va.out, "report path (stdout when absent)");
  verify->add_option("--jobs", va.jobs, "entries verified in parallel (0: all cores)");
  verify->add_flag("--no-flows", va.no_flows, "skip flow integration");

  FlowArgs fa;
  auto* flow = app.add_subcommand("flow", "integrate a Hamiltonian flow and write a CSV");
  flow->add_option("--entry", fa.entry, "entry id")->required();
  flow->add_option("--hamiltonian", fa.hamiltonian, "function name, e.g. S1 or I1")->required();
  flow->add_option("--side", fa.side, "g or gdual")->check(CLI::IsMember({"g", "gdual"}));
  flow->add_option("--t", fa.T, "horizon")->check(CLI::PositiveNumber);
  flow->add_option("--dt", fa.dt, "step")->check(CLI::PositiveNumber);
  flow->add_option("--out", fa.out, "CSV path (stdout when absent)");
  flow->add_option("--seed", fa.seed, "seed for the parameter sample");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? ok : usage;
  }

  try {
    auto dir = catalog_dir(catalog);
    if (*list) return cmd_list(dir);
    if (*verify) return cmd_verify(dir, va);
    if (*flow) return cmd_flow(dir, fa);
  } catch (const CatalogError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return usage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return failed;
  }
  return usage;
}
