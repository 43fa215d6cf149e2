#include <gtest/gtest.h>

#include <random>

#include "support.hpp"

using namespace bisym;
using namespace testing_support;

namespace {

Matrix<Rational> skew(std::size_t n, std::initializer_list<std::tuple<int, int, Rational>> upper) {
  Matrix<Rational> w(n, n);
  for (const auto& [i, j, v] : upper) {
    w(i - 1, j - 1) = v;
    w(j - 1, i - 1) = -v;
  }
  return w;
}

SamplingConfig cfg() { return SamplingConfig{}; }

}  // namespace

TEST(Closure, AbelianAnyForm) {
  Matrix<Rational> w = skew(4, {{1, 2, 3}, {1, 4, Rational(-1, 2)}, {2, 3, 5}});
  ClosureReport r = closure_residual(w, Constants(4));
  EXPECT_TRUE(r.exterior.zero());
  EXPECT_TRUE(r.literal.zero());
}

TEST(Closure, A2) {
  Constants f = constants(2, {{1, 2, 2, 1}});
  EXPECT_TRUE(closure_residual(skew(2, {{1, 2, 1}}), f).exterior.zero());
}

TEST(Closure, A2PlusA2PairedBlocks) {
  const CatalogEntry& e = ex2();
  auto p = sample(e);
  ClosureReport r = closure_residual(skew(4, {{1, 2, 1}, {3, 4, 1}}), e.f.evaluate(p));
  EXPECT_TRUE(r.exterior.zero());
  RecordProperty("literal_residual", to_string(r.literal.max_abs));
}

TEST(Closure, CatalogFormsAreClosedAndNondegenerate) {
  for (const auto& file : catalog_files(catalog_dir())) {
    CatalogEntry e = load_entry(file);
    auto p = sample(e);
    for (const char* s : {"g", "gdual"}) {
      Matrix<Rational> w = e.side(s).omega.map([&](const Expr& x) { return eval_exact(x, p); });
      EXPECT_NE(determinant(w), 0) << e.id << " " << s;
      EXPECT_TRUE(closure_residual(w, e.algebra(s).evaluate(p)).exterior.zero()) << e.id << " " << s;
    }
  }
}

TEST(Closure, WrongFormOnFirstExampleFails) {
  Constants f = ex1().f.evaluate({});
  EXPECT_FALSE(closure_residual(skew(4, {{1, 2, 1}, {3, 4, 1}}), f).exterior.zero());
}

TEST(InvertOmega, CanonicalForm) {
  Matrix<Rational> w = skew(4, {{1, 3, -1}, {2, 4, -1}});
  Matrix<Rational> want = skew(4, {{1, 3, 1}, {2, 4, 1}});
  EXPECT_EQ(invert_omega(w), want);
  auto z = symbols({"z1", "z2", "z3", "z4"});
  auto ev = [](const Matrix<Expr>& m) { return m.map([](const Expr& x) { return eval_exact(x, {}); }); };
  EXPECT_EQ(ev(PoissonField::constant(z, want).P), ev(PoissonField::canonical(z).P));
}

TEST(InvertOmega, DoubledFormHalvesP) {
  Matrix<Rational> w = skew(4, {{1, 4, 1}, {2, 3, 2}});
  EXPECT_EQ(invert_omega(scaled(w, Rational(2))), scaled(invert_omega(w), Rational(1, 2)));
}

TEST(InvertOmega, RandomNondegenerate) {
  std::mt19937 rng(11);
  std::uniform_int_distribution<int> d(-5, 5);
  for (int t = 0; t < 5; ++t) {
    Matrix<Rational> w(4, 4);
    for (std::size_t i = 0; i < 4; ++i)
      for (std::size_t j = i + 1; j < 4; ++j) {
        w(i, j) = make_rational(d(rng), 1 + t);
        w(j, i) = -w(i, j);
      }
    if (determinant(w) == 0) continue;
    EXPECT_EQ(w * invert_omega(w), Matrix<Rational>::identity(4));
  }
}

TEST(InvertOmega, RejectsNonSkew) {
  Matrix<Rational> w(2, 2);
  w(0, 1) = 1;
  w(1, 0) = 1;
  EXPECT_THROW(invert_omega(w), std::invalid_argument);
}

TEST(Bracket, CanonicalPair) {
  auto z = symbols({"z1", "z2", "z3", "z4"});
  PoissonField pf = PoissonField::canonical(z);
  Expr b = poisson_bracket(pf, Expr::symbol(z[0]), Expr::symbol(z[2]));
  EXPECT_EQ(eval_exact(b, {}), 1);
  EXPECT_EQ(eval_exact(poisson_bracket(pf, Expr::symbol(z[0]), Expr::symbol(z[1])), {}), 0);
}

TEST(Bracket, FirstExampleGroupEntry) {
  const SideData& g = ex1().g;
  auto t = table(g.coords());
  Expr b = poisson_bracket(g.phase, parse_expr("x2", t), parse_expr("x4", t));
  EXPECT_TRUE(equiv_zero(b - parse_expr("x2*exp(-x1)", t), cfg()).holds);
}

TEST(Bracket, SelfBracketVanishes) {
  const SideData& g = ex1().g;
  auto t = table(g.coords());
  Expr f = parse_expr("x1^2*exp(x3)/(1+x2^2)+x4*x2", t);
  EXPECT_TRUE(equiv_zero(poisson_bracket(g.phase, f, f), cfg()).holds);
}

TEST(FieldJacobi, ConstantCanonical) {
  IdentityResult r = jacobi_residual_field(PoissonField::canonical(symbols({"z1", "z2", "z3", "z4"})), cfg());
  EXPECT_TRUE(r.holds);
}

TEST(FieldJacobi, FirstExampleGroupField) {
  IdentityResult r = jacobi_residual_field(ex1().g.phase, cfg());
  EXPECT_TRUE(r.holds);
  EXPECT_LE(r.max_residual, 1e-9);
  EXPECT_EQ(r.points, 20);
}

TEST(FieldJacobi, ReplacedEntryBreaksJacobi) {
  PoissonField pf = ex1().g.phase;
  auto t = table(pf.coords);
  pf.P(0, 1) = parse_expr("x3", t);
  pf.P(1, 0) = parse_expr("-x3", t);
  IdentityResult r = jacobi_residual_field(pf, cfg());
  EXPECT_FALSE(r.holds);
  EXPECT_GT(r.max_residual, 1e-3);
  ASSERT_TRUE(r.witness);
}

TEST(FieldSkew, CatalogFields) {
  for (const auto& file : catalog_files(catalog_dir())) {
    CatalogEntry e = load_entry(file);
    EXPECT_TRUE(skew_residual(e.g.phase, cfg(), sample(e)).holds) << e.id;
    EXPECT_TRUE(skew_residual(e.gdual.phase, cfg(), sample(e)).holds) << e.id;
  }
}

TEST(Vielbein, IdentityGivesConstantField) {
  auto x = symbols({"x1", "x2"});
  Matrix<Rational> P = skew(2, {{1, 2, 1}});
  Vielbein vb{Matrix<Expr>::identity(2), Matrix<Expr>::identity(2)};
  PoissonField pf = push_poisson(vb, P, x, cfg());
  EXPECT_EQ(eval_exact(pf.P(0, 1), {}), 1);
  EXPECT_EQ(eval_exact(pf.P(1, 0), {}), -1);
}

TEST(Vielbein, DiagonalExponential) {
  auto x = symbols({"x1", "x2", "x3", "x4"});
  auto t = table(x);
  Vielbein vb{Matrix<Expr>::identity(4), Matrix<Expr>::identity(4)};
  vb.e(0, 0) = parse_expr("exp(x1)", t);
  vb.einv(0, 0) = parse_expr("exp(-x1)", t);
  PoissonField pf = push_poisson(vb, skew(4, {{1, 3, 1}, {2, 4, 1}}), x, cfg());
  EXPECT_TRUE(equiv_zero(pf.P(0, 2) - parse_expr("exp(x1)", t), cfg()).holds);
  EXPECT_TRUE(equiv_zero(pf.P(1, 3) - Expr(1), cfg()).holds);
}

TEST(Vielbein, BadInverseRejected) {
  auto x = symbols({"x1", "x2"});
  auto t = table(x);
  Vielbein vb{Matrix<Expr>::identity(2), Matrix<Expr>::identity(2)};
  vb.e(0, 0) = parse_expr("exp(x1)", t);
  EXPECT_THROW(push_poisson(vb, skew(2, {{1, 2, 1}}), x, cfg()), VielbeinError);
}
