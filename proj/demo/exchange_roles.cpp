// Loads one catalog entry and walks through the exchange of phase space and symmetry group.
#include <iostream>

#include "bisym/bisym.hpp"

using namespace bisym;

int main(int argc, char** argv) {
  std::string id = argc > 1 ? argv[1] : "ex3_A4_9_0__A4_9_0_iv";
  CatalogEntry e = load_entry(std::filesystem::path(BISYM_CATALOG_DEFAULT) / (id + ".json"));
  SamplingConfig cfg;
  ExactAssignment p = PointSampler(cfg).sample_parameters(e.parameter_symbols(), 0);

  std::cout << e.id << ": phase space " << e.g.group << ", symmetry " << e.gdual.group << "\n";
  for (const auto& [k, v] : p) std::cout << "  " << k << " = " << v << "\n";

  ManinReport m = verify_manin_triple(e.f.evaluate(p), e.ft.evaluate(p));
  std::cout << "Manin triple: " << (m.passed() ? "ok" : "broken") << "\n";

  DarbouxReport d = check_darboux(e.g.phase, e.g.chart, cfg, p);
  std::cout << "Darboux chart on G: " << (d.passed() ? "canonical" : "not canonical") << ", max residual "
            << d.max_residual() << "\n";

  IdentityResult sym = symmetry_residual(e.g.phase, e.g.S.coordinates, e.symmetry_constants().evaluate(p), cfg, p);
  std::cout << "S brackets close on the dual: " << (sym.holds ? "yes" : "no") << "\n";

  // swap roles: the dual group becomes the phase space
  Matrix<Rational> C = e.C.map([&](const Expr& x) { return eval_exact(x, p); });
  std::vector<Expr> St = transform_dynfuncs(C, e.g.S.coordinates, e.map);
  IdentityResult tilde = symmetry_residual(e.gdual.phase, St, e.f.evaluate(p), cfg, p);
  std::cout << "transformed functions close on g: " << (tilde.holds ? "yes" : "no") << "\n";
  for (std::size_t i = 0; i < St.size(); ++i) {
    IdentityResult same = equiv_zero(St[i] - e.gdual.S.coordinates[i], cfg, p);
    std::cout << "  " << e.gdual.S.names[i] << (same.holds ? " matches" : " differs from") << " the catalog form\n";
  }

  auto fam = find_involutive_pairs(e.gdual.phase, St, cfg, p);
  std::cout << "involutive families on the dual group:";
  for (const auto& f : fam) {
    std::cout << " (";
    for (std::size_t k = 0; k < f.size(); ++k) std::cout << (k ? "," : "") << "S" << f[k] + 1;
    std::cout << ")";
  }
  std::cout << "\n";
}
