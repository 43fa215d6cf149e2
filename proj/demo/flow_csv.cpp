// Integrates one S-function flow in Darboux coordinates and prints the conserved partners.
#include <iostream>

#include "bisym/bisym.hpp"

using namespace bisym;

int main() {
  CatalogEntry e = load_entry(std::filesystem::path(BISYM_CATALOG_DEFAULT) / "ex4_A4_9_1__A4_9_1_i.json");
  const SideData& g = e.g;
  PoissonField pf = PoissonField::canonical(g.darboux);
  Expr H = *g.darboux_function("S4");

  std::vector<double> z0{0.3, 0.7, 1.1, 0.9};
  Trajectory tr = integrate(hamiltonian_vector_field(pf, H), g.darboux, z0, 1e-3, 2.0);
  DriftReport d = conservation_drift(tr, g.S.darboux);
  for (std::size_t i = 0; i < d.relative.size(); ++i)
    std::cout << g.S.names[i] << " relative drift " << d.relative[i] << "\n";
  write_csv(std::cout, Trajectory{tr.coords, {tr.times.front(), tr.times.back()},
                                  {tr.states.front(), tr.states.back()}}, g.S.darboux);
}
