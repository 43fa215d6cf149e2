#include <gtest/gtest.h>

#include "support.hpp"

using namespace bisym;
using namespace testing_support;

namespace {

SamplingConfig cfg() { return SamplingConfig{}; }

Matrix<Rational> eval_C(const CatalogEntry& e, const ExactAssignment& p) {
  return e.C.map([&](const Expr& x) { return eval_exact(x, p); });
}

ExchangeBundle bundle(const CatalogEntry& e, const ExactAssignment& p) {
  ExchangeBundle b{e.f.evaluate(p), e.ft.evaluate(p), eval_C(e, p), e.g.phase, e.gdual.phase,
                   e.g.S.coordinates, e.gdual.S.coordinates, e.map, std::nullopt, std::nullopt};
  if (e.r && e.r_algebra == "gdual") b.r_tilde = e.r->evaluate(p);
  if (e.rep && e.rep_algebra == "gdual") b.rep_tilde = e.rep->evaluate(p);
  return b;
}

}  // namespace

TEST(PhaseExchange, FirstExampleMap) {
  const CatalogEntry& e = ex1();
  EXPECT_TRUE(check_phase_exchange(e.map, e.g.phase, e.gdual.phase, cfg()).holds);
}

TEST(PhaseExchange, DroppedTermFails) {
  const CatalogEntry& e = ex1();
  CoordinateMap m = e.map;
  m.exprs[2] = parse_expr("-y2", table(e.gdual.coords()));
  IdentityResult r = check_phase_exchange(m, e.g.phase, e.gdual.phase, cfg());
  EXPECT_FALSE(r.holds);
  EXPECT_TRUE(r.witness);
}

TEST(PhaseExchange, EveryCatalogMap) {
  for (const auto& file : catalog_files(catalog_dir())) {
    CatalogEntry e = load_entry(file);
    EXPECT_TRUE(check_phase_exchange(e.map, e.g.phase, e.gdual.phase, cfg(), sample(e)).holds) << e.id;
  }
}

TEST(TransformFunctions, IdentityMapAndMatrix) {
  auto x = symbols({"x1", "x2"});
  auto t = table(x);
  std::vector<Expr> S{parse_expr("x1*exp(x2)", t), parse_expr("x2^2-x1", t)};
  CoordinateMap id = CoordinateMap::identity(x, x);
  auto out = transform_dynfuncs(Matrix<Rational>::identity(2), S, id);
  for (std::size_t i = 0; i < 2; ++i) EXPECT_TRUE(equiv_zero(out[i] - S[i], cfg()).holds);
}

TEST(TransformFunctions, DoubledMatrixHalves) {
  auto x = symbols({"x1", "x2"});
  auto t = table(x);
  std::vector<Expr> S{parse_expr("x1*exp(x2)", t), parse_expr("x2^2-x1", t)};
  Matrix<Rational> C = scaled(Matrix<Rational>::identity(2), Rational(2));
  auto out = transform_dynfuncs(C, S, CoordinateMap::identity(x, x));
  for (std::size_t i = 0; i < 2; ++i)
    EXPECT_TRUE(equiv_zero(out[i] - Expr(Rational(1, 2)) * S[i], cfg()).holds);
}

TEST(Exchange, FirstExampleFullReport) {
  const CatalogEntry& e = ex1();
  auto p = sample(e);
  Theorem1Report r = verify_theorem1(bundle(e, p), cfg(), p);
  EXPECT_TRUE(r.phase_exchange.holds);
  EXPECT_TRUE(r.tilde_symmetry.holds);
  EXPECT_TRUE(r.transformed_functions.holds);
  ASSERT_TRUE(r.q_transform);
  EXPECT_TRUE(r.q_transform->holds);
  EXPECT_TRUE(r.passed());
}

TEST(Exchange, SwappedRowsOfCFail) {
  const CatalogEntry& e = ex1();
  auto p = sample(e);
  ExchangeBundle b = bundle(e, p);
  for (std::size_t j = 0; j < 4; ++j) std::swap(b.C(0, j), b.C(1, j));
  Theorem1Report r = verify_theorem1(b, cfg(), p);
  EXPECT_TRUE(r.phase_exchange.holds);
  EXPECT_FALSE(r.transformed_functions.holds);
  EXPECT_FALSE(r.passed());
}

TEST(Exchange, ParametrizedEntries) {
  for (const CatalogEntry* e : {&ex2(), &ex3(), &ex4(), &ex5()})
    for (std::uint64_t s = 0; s < 2; ++s) {
      auto p = sample(*e, s);
      EXPECT_TRUE(verify_theorem1(bundle(*e, p), cfg(), p).passed()) << e->id << " sample " << s;
    }
}

TEST(TransformQ, FirstExample) {
  const CatalogEntry& e = ex1();
  auto p = sample(e);
  EXPECT_TRUE(transform_Q(bundle(e, p), cfg(), p).holds);
}

TEST(TransformQ, NeedsRepresentationData) {
  const CatalogEntry& e = ex1();
  ExchangeBundle b = bundle(e, sample(e));
  b.rep_tilde.reset();
  EXPECT_THROW(transform_Q_expressions(b), std::invalid_argument);
}

TEST(TransformQ, LinearInR) {
  const CatalogEntry& e = ex1();
  auto p = sample(e);
  ExchangeBundle b = bundle(e, p);
  (*b.r_tilde)(0, 3) = -2;
  (*b.r_tilde)(3, 0) = 2;
  (*b.r_tilde)(2, 3) = 5;
  (*b.r_tilde)(3, 2) = -5;
  EXPECT_TRUE(transform_Q(b, cfg(), p).holds);
}

TEST(TransformQ, SwappedRowsOfCFail) {
  const CatalogEntry& e = ex1();
  auto p = sample(e);
  ExchangeBundle b = bundle(e, p);
  for (std::size_t j = 0; j < 4; ++j) std::swap(b.C(0, j), b.C(1, j));
  EXPECT_FALSE(transform_Q(b, cfg(), p).holds);
}

TEST(Classification, FirstExampleInvariants) {
  const CatalogEntry& e = ex1();
  auto p = sample(e);
  Classification c =
      classify_transformation(e.zmap, e.g.invariants->darboux, e.gdual.invariants->darboux,
                              PoissonField::canonical(e.g.darboux), PoissonField::canonical(e.gdual.darboux), cfg(), p);
  EXPECT_TRUE(c.bracket_preserving);
  EXPECT_FALSE(c.invariant_mapping);
  EXPECT_FALSE(c.canonical());
  EXPECT_FALSE(c.coefficients);
}

TEST(Classification, ThirdExampleCoefficientsAreC) {
  const CatalogEntry& e = ex3();
  for (std::uint64_t s = 0; s < 3; ++s) {
    auto p = sample(e, s);
    Classification c = classify_transformation(e.zmap, e.g.S.darboux, e.gdual.S.darboux,
                                               PoissonField::canonical(e.g.darboux),
                                               PoissonField::canonical(e.gdual.darboux), cfg(), p);
    EXPECT_TRUE(c.canonical());
    ASSERT_TRUE(c.coefficients);
    EXPECT_EQ(*c.coefficients, eval_C(e, p));
  }
}

TEST(Classification, NonCanonicalMapIsNotBracketPreserving) {
  auto z = symbols({"z1", "z2"});
  auto t = table(z);
  CoordinateMap m{z, z, {parse_expr("2*z1", t), parse_expr("z2", t)}};
  PoissonField pf = PoissonField::canonical(z);
  std::vector<Expr> F{parse_expr("z1*z2", t)};
  Classification c = classify_transformation(m, F, F, pf, pf, cfg());
  EXPECT_FALSE(c.bracket_preserving);
  EXPECT_FALSE(c.bracket_check.holds);
}
