#include <gtest/gtest.h>

#include <functional>
#include <random>

#include "oracles.hpp"
#include "pkrn/algebra.hpp"
#include "pkrn/errors.hpp"
#include "pkrn/session.hpp"
#include "pkrn/sexpr.hpp"
#include "support.hpp"

namespace pkrn {
namespace {

using oracle::Int;
using oracle::Rat;

std::string rat_text(const Rat& r) {
  const Int n = boost::multiprecision::numerator(r);
  const Int d = boost::multiprecision::denominator(r);
  return d == 1 ? n.str() : n.str() + "/" + d.str();
}

class Algebra : public ::testing::Test {
 protected:
  Session s;
  std::uint64_t x = s.intern("x").index();
  std::uint64_t y = s.intern("y").index();
  std::uint64_t z = s.intern("z").index();

  StandardForm sf(std::string_view prefix) {
    RootScope roots(s.heap().stack());
    return simp(s, roots.push(read(s.heap(), prefix).value));
  }

  std::string render(const StandardForm& f) {
    return sf_render(f, [this](std::uint64_t i) { return s.heap().symbols()[SymbolTable::by_index(i)].name; });
  }
};

TEST(RationalTest, LowestTermsWithPositiveDenominator) {
  EXPECT_EQ(Rational(BigInt(6), BigInt(-4)).to_string(), "-3/2");
  EXPECT_EQ(Rational(BigInt(0), BigInt(-5)).to_string(), "0");
  EXPECT_EQ(Rational(BigInt(10), BigInt(5)).to_string(), "2");
  EXPECT_TRUE(Rational(BigInt(10), BigInt(5)).is_integer());
  EXPECT_EQ((Rational(1) / Rational(3) + Rational(BigInt(1), BigInt(6))).to_string(), "1/2");
  EXPECT_DOUBLE_EQ(Rational(BigInt(-7), BigInt(4)).to_double(), -1.75);
}

TEST(RationalProperty, MatchesBoostRationals) {
  std::mt19937_64 rng(8);
  std::uniform_int_distribution<std::int64_t> d(-1000000, 1000000);
  for (int i = 0; i < 2000; ++i) {
    std::int64_t a = d(rng), b = d(rng), c = d(rng), e = d(rng);
    if (b == 0) b = 1;
    if (e == 0) e = -1;
    const Rational p{BigInt(a), BigInt(b)};
    const Rational q{BigInt(c), BigInt(e)};
    const Rat op = Rat(Int(a)) / Rat(Int(b));
    const Rat oq = Rat(Int(c)) / Rat(Int(e));
    ASSERT_EQ((p + q).to_string(), rat_text(op + oq));
    ASSERT_EQ((p - q).to_string(), rat_text(op - oq));
    ASSERT_EQ((p * q).to_string(), rat_text(op * oq));
    if (c != 0) {
      ASSERT_EQ((p / q).to_string(), rat_text(op / oq));
    }
  }
}

TEST_F(Algebra, SimpExamples) {
  EXPECT_EQ(sf("(times (plus x 1) (difference x 1))"), sf("(difference (expt x 2) 1)"));
  EXPECT_TRUE(sf("(plus (times 0 x) 0)").is_zero());
  EXPECT_TRUE(sf("(plus (times 0 x) 0)").is_constant());
  const StandardForm cube = sf("(expt (difference (expt x 2) 1) 3)");
  EXPECT_EQ(sf_coefficient(cube, 6).to_string(), "1");
  EXPECT_EQ(sf_coefficient(cube, 4).to_string(), "-3");
  EXPECT_EQ(sf_coefficient(cube, 2).to_string(), "3");
  EXPECT_EQ(sf_coefficient(cube, 0).to_string(), "-1");
  EXPECT_EQ(sf_coefficient(cube, 5).to_string(), "0");
  EXPECT_EQ(sf("(quotient x 2)"), sf_mul(sf("x"), sf("(quotient 1 2)")));
}

TEST_F(Algebra, SimpRejectsNonPolynomials) {
  EXPECT_THROW(sf("(expt x (minus 1))"), LispError);
  EXPECT_THROW(sf("(sin x)"), LispError);
  EXPECT_THROW(sf("(quotient 1 x)"), LispError);
  EXPECT_THROW(sf("(expt x y)"), LispError);
}

TEST_F(Algebra, PowMatchesBinomialCoefficients) {
  const StandardForm base = sf("(plus x 1)");
  for (unsigned n = 0; n <= 30; ++n) {
    const StandardForm p = sf_pow(base, n);
    Int binom = 1;
    for (unsigned k = 0; k <= n; ++k) {
      ASSERT_EQ(sf_coefficient(p, k).to_string(), binom.str()) << n << " " << k;
      binom = binom * (n - k) / (k + 1);
    }
  }
  EXPECT_EQ(render(sf_pow(base, 2)), "x^2 + 2*x + 1");
}

TEST_F(Algebra, Rendering) {
  EXPECT_EQ(render(sf("(difference (times 3 (quotient (expt x 2) 2)) (quotient 1 2))")), "3/2*x^2 - 1/2");
  EXPECT_EQ(render(sf("(minus (expt x 3))")), "-x^3");
  EXPECT_EQ(render(sf("(plus (expt x 2) (times 2 x y) (expt y 2))")), "x^2 + 2*x*y + y^2");
  EXPECT_EQ(render(sf("(times (minus 2) z (plus x 1))")), "-2*x*z - 2*z");
  EXPECT_EQ(render(sf("0")), "0");
  EXPECT_EQ(render(sf("(quotient (minus 7) 3)")), "-7/3");
}

TEST_F(Algebra, DerivativeExamples) {
  EXPECT_TRUE(sf_df(sf("17"), x).is_zero());
  EXPECT_TRUE(sf_df(sf("y"), x).is_zero());
  EXPECT_EQ(sf_df(sf("(expt x 2)"), x), sf("(times 2 x)"));
  EXPECT_EQ(sf_df(sf("(times x (expt y 3))"), y), sf("(times 3 x (expt y 2))"));
  EXPECT_EQ(sf_df(sf("(expt x 2)"), x, 0), sf("(expt x 2)"));
  EXPECT_TRUE(sf_df(sf("(expt x 2)"), x, 3).is_zero());
}

TEST_F(Algebra, SubstitutionExamples) {
  const StandardForm p = sf("(difference (expt x 2) 1)");
  EXPECT_TRUE(sf_subst(p, x, sf("1")).is_zero());
  EXPECT_EQ(sf_subst(p, x, sf("x")), p);
  EXPECT_EQ(sf_subst(p, x, sf("(plus y 1)")), sf("(plus (expt y 2) (times 2 y))"));
  // y sorts after x, z after y; substituting a smaller variable must reorder.
  EXPECT_EQ(sf_subst(sf("(times z (plus z 1))"), z, sf("x")), sf("(plus (expt x 2) x)"));
}

TEST_F(Algebra, ModularReductionLandsInRange) {
  const BigInt m(7);
  const StandardForm p = sf_reduce_mod(sf("(plus (times (minus 3) (expt x 2)) (times 15 x y) (minus 1))"), m);
  EXPECT_EQ(render(p), "4*x^2 + x*y + 6");
  EXPECT_EQ(render(sf_reduce_mod(sf("(quotient x 2)"), m)), "4*x");
  EXPECT_THROW(sf_reduce_mod(sf("(quotient x 7)"), m), LispError);
}

TEST_F(Algebra, LegendreMatchesRecurrence) {
  const auto ours = legendre_demo(x, 10);
  const auto expected = oracle::legendre(10);
  ASSERT_EQ(ours.size(), expected.size());
  for (std::size_t k = 0; k < ours.size(); ++k) {
    for (std::size_t e = 0; e < expected[k].size() + 2; ++e) {
      const Rat c = e < expected[k].size() ? expected[k][e] : Rat(0);
      ASSERT_EQ(sf_coefficient(ours[k], e).to_string(), rat_text(c)) << "k=" << k << " e=" << e;
    }
    const StandardForm at_one = sf_subst(ours[k], x, sf("1"));
    ASSERT_TRUE(at_one.is_constant());
    EXPECT_EQ(at_one.constant.to_string(), "1") << k;
  }
  EXPECT_EQ(render(ours[2]), "3/2*x^2 - 1/2");
}

// Random polynomial expressions in x, y, z with small integer leaves, paired
// with an exact evaluator over boost rationals.
struct Expr {
  std::string prefix;
  std::function<Rat(const Rat&, const Rat&, const Rat&)> value;
};

Expr random_expr(std::mt19937_64& rng, int depth) {
  if (depth == 0 || rng() % 4 == 0) {
    switch (rng() % 4) {
      case 0: return {"x", [](const Rat& a, const Rat&, const Rat&) { return a; }};
      case 1: return {"y", [](const Rat&, const Rat& b, const Rat&) { return b; }};
      case 2: return {"z", [](const Rat&, const Rat&, const Rat& c) { return c; }};
      default: {
        const int n = static_cast<int>(rng() % 11) - 5;
        return {std::to_string(n), [n](const Rat&, const Rat&, const Rat&) { return Rat(n); }};
      }
    }
  }
  Expr a = random_expr(rng, depth - 1);
  switch (rng() % 6) {
    case 0:
    case 1: {
      Expr b = random_expr(rng, depth - 1);
      return {"(plus " + a.prefix + " " + b.prefix + ")",
              [a, b](const Rat& p, const Rat& q, const Rat& r) { return a.value(p, q, r) + b.value(p, q, r); }};
    }
    case 2: {
      Expr b = random_expr(rng, depth - 1);
      return {"(difference " + a.prefix + " " + b.prefix + ")",
              [a, b](const Rat& p, const Rat& q, const Rat& r) { return a.value(p, q, r) - b.value(p, q, r); }};
    }
    case 3: {
      Expr b = random_expr(rng, depth - 1);
      return {"(times " + a.prefix + " " + b.prefix + ")",
              [a, b](const Rat& p, const Rat& q, const Rat& r) { return a.value(p, q, r) * b.value(p, q, r); }};
    }
    case 4: {
      const unsigned n = static_cast<unsigned>(rng() % 4);
      return {"(expt " + a.prefix + " " + std::to_string(n) + ")", [a, n](const Rat& p, const Rat& q, const Rat& r) {
                Rat acc = 1;
                const Rat base = a.value(p, q, r);
                for (unsigned i = 0; i < n; ++i) acc *= base;
                return acc;
              }};
    }
    default:
      return {"(minus " + a.prefix + ")", [a](const Rat& p, const Rat& q, const Rat& r) { return -a.value(p, q, r); }};
  }
}

TEST_F(Algebra, PropertySubstitutionAgreesWithDirectEvaluation) {
  std::mt19937_64 rng(11);
  for (int i = 0; i < 100; ++i) {
    const Expr e = random_expr(rng, 4);
    const int a = static_cast<int>(rng() % 9) - 4;
    const int b = static_cast<int>(rng() % 9) - 4;
    const int c = static_cast<int>(rng() % 9) - 4;
    StandardForm v = sf(e.prefix);
    v = sf_subst(v, y, sf(std::to_string(b)));
    v = sf_subst(v, x, sf(std::to_string(a)));
    v = sf_subst(v, z, sf(std::to_string(c)));
    ASSERT_TRUE(v.is_constant()) << e.prefix;
    ASSERT_EQ(v.constant.to_string(), rat_text(e.value(a, b, c))) << e.prefix;
  }
}

TEST_F(Algebra, PropertyRingLawsHoldStructurally) {
  std::mt19937_64 rng(12);
  for (int i = 0; i < 200; ++i) {
    const StandardForm a = sf(random_expr(rng, 3).prefix);
    const StandardForm b = sf(random_expr(rng, 3).prefix);
    const StandardForm c = sf(random_expr(rng, 3).prefix);
    ASSERT_EQ(sf_mul(a, sf_add(b, c)), sf_add(sf_mul(a, b), sf_mul(a, c)));
    ASSERT_EQ(sf_add(a, b), sf_add(b, a));
    ASSERT_EQ(sf_mul(a, b), sf_mul(b, a));
    ASSERT_TRUE(sf_add(a, sf_neg(a)).is_zero());
    ASSERT_EQ(sf_sub(sf_add(a, b), b), a);
    ASSERT_EQ(sf_pow(a, 3), sf_mul(a, sf_mul(a, a)));
  }
}

// Pairs of differently written but equal expressions simplify to identical forms.
TEST_F(Algebra, PropertyEqualExpressionsHaveEqualForms) {
  std::mt19937_64 rng(13);
  for (int i = 0; i < 500; ++i) {
    const std::string a = random_expr(rng, 2).prefix;
    const std::string b = random_expr(rng, 2).prefix;
    std::string lhs;
    std::string rhs;
    switch (i % 4) {
      case 0:
        lhs = "(expt (plus " + a + " " + b + ") 2)";
        rhs = "(plus (expt " + a + " 2) (times 2 " + a + " " + b + ") (expt " + b + " 2))";
        break;
      case 1:
        lhs = "(times (plus " + a + " " + b + ") (difference " + a + " " + b + "))";
        rhs = "(difference (expt " + a + " 2) (expt " + b + " 2))";
        break;
      case 2:
        lhs = "(difference " + a + " " + b + ")";
        rhs = "(minus (difference " + b + " " + a + "))";
        break;
      default:
        lhs = "(quotient (times 2 " + a + ") 4)";
        rhs = "(times " + a + " (quotient 1 2))";
        break;
    }
    ASSERT_EQ(sf(lhs), sf(rhs)) << lhs << " vs " << rhs;
  }
}

TEST_F(Algebra, PropertyRepeatedDerivatives) {
  std::mt19937_64 rng(14);
  for (int i = 0; i < 100; ++i) {
    const StandardForm p = sf(random_expr(rng, 4).prefix);
    ASSERT_EQ(sf_df(sf_df(p, x), x), sf_df(p, x, 2));
    const StandardForm q = sf(random_expr(rng, 3).prefix);
    ASSERT_EQ(sf_df(sf_mul(p, q), y), sf_add(sf_mul(sf_df(p, y), q), sf_mul(p, sf_df(q, y))));
  }
}

TEST(AlgebraSession, RlispSurface) {
  Session s;
  EXPECT_EQ(testing::run_rlisp(s, "df((x^2-1)^2, x, 2);"), "12*x^2 - 4\n");
  EXPECT_EQ(testing::run_rlisp(s, "(x+y)^2;"), "x^2 + 2*x*y + y^2\n");
  EXPECT_EQ(testing::run_rlisp(s, "x - x;"), "0\n");
  EXPECT_EQ(testing::run_rlisp(s, "sub(x^2 + y, x, 2);"), "y + 4\n");
  EXPECT_EQ(testing::run_rlisp(s, "a := (x+1)^3$ df(a, x, 3);"), "6\n");
  EXPECT_EQ(testing::run_rlisp(s, "x/y;"), "***** algebra error: division by a non-constant polynomial\n");
  EXPECT_EQ(testing::run_rlisp(s, "(x+1)^-1;"), "***** algebra error: negative exponent -1\n");
  EXPECT_EQ(testing::run_rlisp(s, "write \"p = \", (x^2)/2;"), "p = 1/2*x^2\n");
}

}  // namespace
}  // namespace pkrn
