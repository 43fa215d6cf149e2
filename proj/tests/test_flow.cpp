#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <sstream>

#include "support.hpp"

using namespace bisym;
using namespace testing_support;

namespace {

struct Oscillator {
  std::vector<Symbol> z = symbols({"z1", "z2"});
  SymbolTable t = table(z);
  PoissonField pf = PoissonField::canonical(z);
  Expr H = parse_expr("(z1^2+z2^2)/2", t);
};

// endpoint error after one period, exact solution returns to the start
double period_error(double dt) {
  Oscillator o;
  double T = 2 * std::numbers::pi;
  Trajectory tr = integrate(hamiltonian_vector_field(o.pf, o.H), o.z, {1.0, 0.0}, dt, T);
  double t_end = tr.times.back();
  const auto& x = tr.states.back();
  return std::hypot(x[0] - std::cos(t_end), x[1] + std::sin(t_end));
}

// rigid body on so(3)*: |x|^2 is a Casimir
struct RigidBody {
  std::vector<Symbol> x = symbols({"x1", "x2", "x3"});
  SymbolTable t = table(x);
  PoissonField pf = PoissonField::from_upper(x, {{0, 1, parse_expr("x3", t)},
                                                 {0, 2, parse_expr("-x2", t)},
                                                 {1, 2, parse_expr("x1", t)}});
  Expr H = parse_expr("x1^2/2+x2^2/4+x3^2/6", t);
  Expr casimir = parse_expr("x1^2+x2^2+x3^2", t);
};

}  // namespace

TEST(Field, Oscillator) {
  Oscillator o;
  auto v = hamiltonian_vector_field(o.pf, o.H);
  ASSERT_EQ(v.size(), 2u);
  Assignment a{{"z1", 0.3}, {"z2", -1.25}};
  EXPECT_DOUBLE_EQ(eval(v[0], a), -1.25);
  EXPECT_DOUBLE_EQ(eval(v[1], a), -0.3);
}

TEST(Field, ConstantHamiltonianIsStatic) {
  Oscillator o;
  for (const auto& c : hamiltonian_vector_field(o.pf, Expr(Rational(7, 3)))) EXPECT_TRUE(c.is_zero());
}

TEST(Integrate, OscillatorPeriod) { EXPECT_LE(period_error(1e-3), 1e-9); }

TEST(Integrate, FourthOrderConvergence) {
  double ratio = period_error(0.1) / period_error(0.05);
  EXPECT_GE(ratio, 12);
  EXPECT_LE(ratio, 20);
}

TEST(Integrate, RejectsBadStep) {
  Oscillator o;
  EXPECT_THROW(integrate(hamiltonian_vector_field(o.pf, o.H), o.z, {1, 0}, 0, 1), std::invalid_argument);
  EXPECT_THROW(integrate(hamiltonian_vector_field(o.pf, o.H), o.z, {1}, 0.1, 1), DimensionError);
}

TEST(Drift, EnergyConservedCoordinateNot) {
  Oscillator o;
  Trajectory tr = integrate(hamiltonian_vector_field(o.pf, o.H), o.z, {1.0, 0.0}, 1e-3, 2 * std::numbers::pi);
  auto x1 = parse_expr("z1", o.t);
  DriftReport d = conservation_drift(tr, {o.H, x1});
  EXPECT_LE(d.max_abs[0], 1e-9);
  EXPECT_GT(d.max_abs[1], 1.0);
  EXPECT_NEAR(d.max_abs[1], 2.0, 1e-3);
}

TEST(Drift, CasimirNoWorseThanEnergy) {
  RigidBody rb;
  Trajectory tr = integrate(hamiltonian_vector_field(rb.pf, rb.H), rb.x, {0.6, 0.7, 0.4}, 1e-3, 5);
  ASSERT_FALSE(tr.aborted);
  DriftReport d = conservation_drift(tr, {rb.H, rb.casimir});
  EXPECT_LE(d.max_abs[0], 1e-9);
  EXPECT_LE(d.max_abs[1], 10 * d.max_abs[0] + 1e-14);
}

TEST(Chart, FirstExampleCoordinateFlowCrossesSingularity) {
  const CatalogEntry& e = ex1();
  Assignment p = to_double(sample(e));
  const FlowSpec& fs = e.flows.front();
  ASSERT_TRUE(fs.leaves_chart);
  ASSERT_TRUE(fs.start);
  std::vector<double> x0;
  for (const auto& v : *fs.start) x0.push_back(to_double(v));
  Expr H = *e.g.function(fs.H), F = *e.g.function(fs.F);
  Trajectory tr = integrate(hamiltonian_vector_field(e.g.phase, H), e.g.coords(), x0, 1e-3, 1, p);
  // z1 = exp(-x1) reaches 1 (x1 = 0) at t = (1 - 1/e)/2; fixed steps may jump the 0/0 point
  double t_hit = (1 - std::exp(-1.0)) / 2;
  std::size_t k = 0;
  while (k < tr.states.size() && tr.states[k][0] > 0) ++k;
  ASSERT_LT(k, tr.states.size());
  EXPECT_NEAR(tr.times[k], t_hit, 0.02);
  if (!tr.aborted) {
    DriftReport d = conservation_drift(tr, {F}, p);
    EXPECT_GT(d.relative[0], 1e-3);
  }
}

TEST(Chart, FirstExampleDarbouxRouteConserves) {
  const CatalogEntry& e = ex1();
  Assignment p = to_double(sample(e));
  const FlowSpec& fs = e.flows.front();
  Assignment a = p;
  for (std::size_t i = 0; i < 4; ++i) a[e.g.coords()[i].name] = to_double((*fs.start)[i]);
  std::vector<double> z0;
  for (const auto& c : e.g.chart) z0.push_back(eval(c, a));
  PoissonField pf = PoissonField::canonical(e.g.darboux);
  Expr H = *e.g.darboux_function(fs.H), F = *e.g.darboux_function(fs.F);
  Trajectory tr = integrate(hamiltonian_vector_field(pf, H), e.g.darboux, z0, 1e-3, 1, p);
  ASSERT_FALSE(tr.aborted);
  DriftReport d = conservation_drift(tr, {H, F}, p);
  EXPECT_LE(d.relative[0], 1e-6);
  EXPECT_LE(d.relative[1], 1e-6);
}

TEST(Csv, HeaderAndRows) {
  Oscillator o;
  Trajectory tr = integrate(hamiltonian_vector_field(o.pf, o.H), o.z, {1.0, 0.0}, 0.5, 1);
  std::ostringstream os;
  write_csv(os, tr, {o.H});
  std::istringstream is(os.str());
  std::string line;
  std::getline(is, line);
  EXPECT_EQ(line, "t,z1,z2,F1");
  int rows = 0;
  while (std::getline(is, line)) ++rows;
  EXPECT_EQ(rows, 3);
}
