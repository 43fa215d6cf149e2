#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "bisym/eval.hpp"
#include "bisym/parse.hpp"
#include "bisym/sampling.hpp"

using namespace bisym;

namespace {

SymbolTable coords4() {
  SymbolTable t;
  for (const char* n : {"x1", "x2", "x3", "x4"}) t.declare(n, SymbolKind::coordinate);
  for (const char* n : {"a", "b", "c", "d", "q"}) t.declare(n, SymbolKind::parameter);
  return t;
}

}  // namespace

TEST(Parse, SumWithNegatedExp) {
  auto t = coords4();
  Expr e = parse_expr("1 - exp(-x1)", t);
  ASSERT_EQ(e.kind(), NodeKind::sum);
  ASSERT_EQ(e.args().size(), 2u);
  EXPECT_TRUE(e.args()[0].is_one());
  const Expr& neg = e.args()[1];
  ASSERT_EQ(neg.kind(), NodeKind::negate);
  ASSERT_EQ(neg.arg().kind(), NodeKind::exp);
  ASSERT_EQ(neg.arg().arg().kind(), NodeKind::negate);
  EXPECT_EQ(neg.arg().arg().arg().sym().name, "x1");
}

TEST(Parse, ParameterTimesCoordinate) {
  auto t = coords4();
  Expr e = parse_expr("q*x2", t);
  ASSERT_EQ(e.kind(), NodeKind::product);
  EXPECT_EQ(e.args()[0].sym().name, "q");
  EXPECT_EQ(e.args()[0].sym().kind, SymbolKind::parameter);
  EXPECT_EQ(e.args()[1].sym().name, "x2");
}

TEST(Parse, QuotientTree) {
  auto t = coords4();
  Expr e = parse_expr("(1 + exp(-2*x1) - 2*exp(-x1))/2", t);
  ASSERT_EQ(e.kind(), NodeKind::quotient);
  EXPECT_EQ(e.args()[0].kind(), NodeKind::sum);
  EXPECT_TRUE(e.args()[1].is_constant());
}

TEST(Parse, Errors) {
  auto t = coords4();
  try {
    parse_expr("x1 + (x2", t);
    FAIL();
  } catch (const ParseError& e) {
    EXPECT_EQ(e.position, 8u);
  }
  try {
    parse_expr("x1*zz + 1", t);
    FAIL();
  } catch (const UnknownSymbolError& e) {
    EXPECT_EQ(e.name, "zz");
    EXPECT_EQ(e.position, 3u);
  }
  EXPECT_THROW(parse_expr("x1 +", t), ParseError);
  EXPECT_THROW(parse_expr("x1 ^ x2", t), ParseError);
  EXPECT_THROW(parse_expr("3/0", t), ParseError);
}

TEST(Parse, RationalLiteralsKeepLeftToRightValue) {
  auto t = coords4();
  Assignment a{{"x1", 0.7}};
  EXPECT_NEAR(eval(parse_expr("x1/2/3", t), a), 0.7 / 6, 1e-15);
  EXPECT_NEAR(eval(parse_expr("x1*2/3", t), a), 0.7 * 2 / 3, 1e-15);
  EXPECT_NEAR(eval(parse_expr("1/2^3", t), a), 0.125, 1e-15);
  EXPECT_NEAR(eval(parse_expr("-1/2*x1", t), a), -0.35, 1e-15);
  // unary minus binds tighter than '^'
  EXPECT_NEAR(eval(parse_expr("-x1^2", t), a), 0.49, 1e-15);
  EXPECT_NEAR(eval(parse_expr("x1^-2", t), a), 1 / 0.49, 1e-12);
  Expr half = parse_expr("1/2", t);
  ASSERT_TRUE(half.is_constant());
  EXPECT_EQ(half.value(), Rational(1, 2));
}

TEST(Render, RoundTripIsStructural) {
  auto t = coords4();
  for (const char* s :
       {"1 - exp(-x1)", "q*x2", "(1 + exp(-2*x1) - 2*exp(-x1))/2", "x1/2/3", "x1*2/3", "(1)/2",
        "-x1^2", "-(x1^2)", "a - -b", "x1 - (-3)", "x1 + -3", "(x1 + x2) + x3", "x1*(x2*x3)",
        "x1/x2*x3", "(x1/x2)/x3", "x1/(x2/x3)", "x2*exp(x1)/(exp(x1) - 1)", "-(a*b) + c",
        "x1^-3/(-x2)", "(-1/2)*x1 - 1/4", "exp(-x1)^2*(x2 - x3)^3", "2^2/3", "x1/-2",
        "d*x4 + 2*x3"}) {
    Expr e = parse_expr(s, t);
    std::string r = render(e);
    Expr back = parse_expr(r, t);
    EXPECT_TRUE(structurally_equal(e, back)) << s << " -> " << r;
  }
}

TEST(Eval, SpecExamples) {
  auto t = coords4();
  EXPECT_EQ(eval(parse_expr("1 - exp(-x1)", t), {{"x1", 0.0}}), 0.0);
  double ln2 = std::log(2.0);
  EXPECT_NEAR(eval(parse_expr("exp(-x1)", t), {{"x1", ln2}}), 0.5, 1e-15);
  EXPECT_NEAR(eval(parse_expr("(1 + exp(-2*x1) - 2*exp(-x1))/2", t), {{"x1", ln2}}), 0.125, 1e-15);
}

TEST(Eval, ExactForExpFreeInput) {
  auto t = coords4();
  Expr e = parse_expr("(x1^2 - q)/(3*x2) + 1/7", t);
  ExactAssignment a{{"x1", Rational(2, 3)}, {"x2", Rational(5)}, {"q", Rational(-1, 2)}};
  Rational expect = (Rational(4, 9) + Rational(1, 2)) / 15 + Rational(1, 7);
  EXPECT_EQ(eval_exact(e, a), expect);
  EXPECT_THROW(eval_exact(parse_expr("exp(x1)", t), a), NotExactError);
  EXPECT_EQ(eval_exact(parse_expr("exp(x1 - x1)", t), a), Rational(1));
}

TEST(Eval, Errors) {
  auto t = coords4();
  EXPECT_THROW(eval(parse_expr("x1 + x2", t), {{"x1", 1.0}}), UnboundSymbolError);
  EXPECT_THROW(eval(parse_expr("1/(exp(x1) - 1)", t), {{"x1", 0.0}}), SingularPointError);
  EXPECT_THROW(eval(parse_expr("1/(exp(x1) - 1)", t), {{"x1", 1e-10}}), SingularPointError);
  EXPECT_THROW(eval_exact(parse_expr("1/(x1 - x1)", t), {{"x1", Rational(1)}}), SingularPointError);
}

TEST(Diff, Basics) {
  auto t = coords4();
  SamplingConfig cfg;
  Expr d1 = diff(parse_expr("exp(-x1)", t), "x1");
  EXPECT_TRUE(equiv_zero(d1 + parse_expr("exp(-x1)", t), cfg).holds);
  Expr d2 = diff(parse_expr("q*x2", t), "x2");
  EXPECT_EQ(d2.kind(), NodeKind::symbol);
  EXPECT_EQ(d2.sym().name, "q");
  EXPECT_TRUE(diff(parse_expr("q*x2", t), "x1").is_zero());
}

TEST(Diff, FiniteDifferenceOracle) {
  auto t = coords4();
  Expr e = parse_expr("x2*exp(x1)/(exp(x1) - 1)", t);
  Expr d = diff(e, "x1");
  double h = 1e-5;
  double fd = (eval(e, {{"x1", 1 + h}, {"x2", 1.0}}) - eval(e, {{"x1", 1 - h}, {"x2", 1.0}})) / (2 * h);
  double exact = eval(d, {{"x1", 1.0}, {"x2", 1.0}});
  EXPECT_NEAR(fd, exact, 1e-8 * std::fabs(exact));
  // closed form: -x2 e^x / (e^x - 1)^2
  double closed = -std::exp(1.0) / std::pow(std::exp(1.0) - 1, 2);
  EXPECT_NEAR(exact, closed, 1e-14);
}

TEST(EquivZero, SpecExamples) {
  auto t = coords4();
  SamplingConfig cfg;
  EXPECT_TRUE(equiv_zero(parse_expr("exp(x1)*exp(-x1) - 1", t), cfg).holds);
  IdentityResult bad = equiv_zero(parse_expr("exp(x1) - 1 - x1", t), cfg);
  EXPECT_FALSE(bad.holds);
  ASSERT_TRUE(bad.witness.has_value());
  EXPECT_TRUE(bad.witness->count("x1"));
}

TEST(EquivZero, InconclusiveWhenEverythingSingular) {
  auto t = coords4();
  SamplingConfig cfg;
  EXPECT_THROW(equiv_zero(parse_expr("1/(x1 - x1)", t), cfg), InconclusiveError);
}

TEST(EquivZero, Deterministic) {
  auto t = coords4();
  SamplingConfig cfg;
  cfg.seed = 7;
  Expr e = parse_expr("x1*a - x2", t);
  auto r1 = equiv_zero(e, cfg);
  auto r2 = equiv_zero(e, cfg);
  EXPECT_EQ(r1.max_residual, r2.max_residual);
  EXPECT_EQ(*r1.witness, *r2.witness);
}

namespace {

// Random trees over x1, x2 with small rational leaves.
Expr random_expr(std::mt19937_64& rng, int depth) {
  auto pick = [&](int n) { return static_cast<int>(rng() % static_cast<std::uint64_t>(n)); };
  if (depth == 0 || pick(4) == 0) {
    switch (pick(3)) {
      case 0: return sym("x1");
      case 1: return sym("x2");
      default: return Expr(Rational(pick(7) - 3, pick(3) + 1));
    }
  }
  Expr a = random_expr(rng, depth - 1);
  Expr b = random_expr(rng, depth - 1);
  switch (pick(6)) {
    case 0: return Expr::raw_sum({a, b});
    case 1: return Expr::raw_product({a, b});
    case 2: return Expr::raw_quotient(a, Expr::raw_sum({Expr(2), Expr::raw_exp(b)}));
    case 3: return Expr::raw_power(a, pick(4) + 1);
    case 4: return Expr::raw_exp(Expr::raw_quotient(a, Expr(4)));
    default: return Expr::raw_negate(a);
  }
}

}  // namespace

TEST(DiffProperties, Linearity) {
  std::mt19937_64 rng(11);
  SamplingConfig cfg;
  for (int k = 0; k < 25; ++k) {
    Expr e1 = random_expr(rng, 4), e2 = random_expr(rng, 4);
    Expr alpha(Rational(static_cast<long>(rng() % 9) - 4, 3)), beta(Rational(static_cast<long>(rng() % 7) + 1, 5));
    Expr lhs = diff(alpha * e1 + beta * e2, "x1");
    Expr rhs = alpha * diff(e1, "x1") + beta * diff(e2, "x1");
    EXPECT_TRUE(equiv_zero(lhs - rhs, cfg).holds) << render(e1) << " | " << render(e2);
  }
}

TEST(DiffProperties, ProductRule) {
  std::mt19937_64 rng(12);
  SamplingConfig cfg;
  for (int k = 0; k < 25; ++k) {
    Expr e1 = random_expr(rng, 4), e2 = random_expr(rng, 4);
    Expr r = diff(e1 * e2, "x2") - e1 * diff(e2, "x2") - e2 * diff(e1, "x2");
    EXPECT_TRUE(equiv_zero(r, cfg).holds) << render(e1) << " | " << render(e2);
  }
}

TEST(DiffProperties, FiniteDifferencesAtTenPoints) {
  std::mt19937_64 rng(13);
  SamplingConfig cfg;
  PointSampler sampler(cfg);
  std::vector<Symbol> xs{{"x1", SymbolKind::coordinate}, {"x2", SymbolKind::coordinate}};
  for (int k = 0; k < 20; ++k) {
    Expr e = random_expr(rng, 4);
    Expr d = diff(e, "x1");
    int checked = 0;
    for (std::uint64_t trial = 0; checked < 10 && trial < 100; ++trial) {
      Assignment p = to_double(sampler.sample(xs, {}, trial));
      double h = 1e-5;
      Assignment lo = p, hi = p;
      lo["x1"] -= h;
      hi["x1"] += h;
      double fd, exact;
      try {
        fd = (eval(e, hi) - eval(e, lo)) / (2 * h);
        exact = eval(d, p);
      } catch (const SingularPointError&) {
        continue;
      }
      ++checked;
      EXPECT_NEAR(fd, exact, 1e-6 * std::max(1.0, std::fabs(exact))) << render(e);
    }
  }
}

TEST(Render, RandomTreesRoundTrip) {
  std::mt19937_64 rng(14);
  SymbolTable t;
  t.declare("x1", SymbolKind::coordinate);
  t.declare("x2", SymbolKind::coordinate);
  for (int k = 0; k < 200; ++k) {
    Expr e = random_expr(rng, 5);
    Expr back = parse_expr(render(e), t);
    SamplingConfig cfg;
    EXPECT_TRUE(equiv_zero(Expr::raw_sum({e, Expr::raw_negate(back)}), cfg).holds) << render(e);
    Expr again = parse_expr(render(back), t);
    EXPECT_TRUE(structurally_equal(back, again)) << render(back);
  }
}
