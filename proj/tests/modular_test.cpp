#include <gtest/gtest.h>

#include <cctype>
#include <random>

#include "oracles.hpp"
#include "pkrn/algebra.hpp"
#include "pkrn/errors.hpp"
#include "pkrn/session.hpp"
#include "pkrn/sexpr.hpp"
#include "support.hpp"

namespace pkrn {
namespace {

using testing::eval_print;
using testing::run_lisp;
using testing::run_rlisp;

TEST(Modular, SmallExamples) {
  for (bool native : {false, true}) {
    SessionConfig config;
    config.native_modular = native;
    Session s(config);
    EXPECT_EQ(run_rlisp(s, "setmod 7$ modplus(5, 5);"), "3\n");
    EXPECT_EQ(run_rlisp(s, "moddifference(2, 5); modtimes(3, 5); modreduce(-3);"), "4\n1\n4\n");
    EXPECT_EQ(run_rlisp(s, "setmod 1000000007$ modtimes(1000000006, 1000000006);"), "1\n");
    EXPECT_EQ(run_rlisp(s, "setmod 7$ (x + 8)^2;"), "x^2 + 2*x + 1\n");
    EXPECT_EQ(run_rlisp(s, "setmod 0;"), "***** wrong type: expected positive integer or nil, got 0\n");
    EXPECT_EQ(run_rlisp(s, "setmod nil; modplus(1, 2);"), "7\n***** no modulus set\n");
  }
}

TEST(Modular, NativeFlagSelectsImplementation) {
  SessionConfig native_config;
  Session native(native_config);
  SessionConfig ref_config;
  ref_config.native_modular = false;
  Session reference(ref_config);
  for (const char* name : kModularNames) {
    EXPECT_TRUE(native.function(native.intern(name)).is_builtin()) << name;
    EXPECT_TRUE(native.flagp(native.intern(name), native.sym().native)) << name;
    const Value ref_fn = reference.function(reference.intern(name));
    EXPECT_FALSE(ref_fn.is_builtin()) << name;
    EXPECT_FALSE(ref_fn.is_unbound()) << name;
  }
}

TEST(Instate, SkipsExactlyTheFlaggedNames) {
  Session s;
  run_lisp(s, "(de keepme (x) 'original) (flag '(keepme ghost) 'native)");
  RootScope roots(s.heap().stack());
  const Value defs = roots.push(read(s.heap(),
                                     "((keepme (lambda (x) 'replaced)) (fresh (lambda (x) (list x x)))"
                                     " (ghost (lambda () 1)))")
                                    .value);
  const InstateReport report = instate_reference(s, defs);
  EXPECT_EQ(report.installed, std::vector<std::string>{"fresh"});
  EXPECT_EQ(report.skipped, std::vector<std::string>{"keepme"});
  EXPECT_EQ(report.skipped_undefined, std::vector<std::string>{"ghost"});
  EXPECT_EQ(eval_print(s, "(keepme 1)"), "original");
  EXPECT_EQ(eval_print(s, "(fresh 2)"), "(2 2)");
  EXPECT_EQ(run_lisp(s, "(ghost)"), "***** undefined function: ghost\n");
}

TEST(Instate, MalformedEntriesNameThemselves) {
  Session s;
  RootScope roots(s.heap().stack());
  const Value defs = roots.push(read(s.heap(), "((ok (lambda () 1)) (broken notalambda))").value);
  try {
    instate_reference(s, defs);
    FAIL();
  } catch (const LispError& e) {
    EXPECT_NE(std::string(e.what()).find("(broken notalambda)"), std::string::npos);
  }
}

// The reference definitions and the native builtins agree on random inputs,
// and both agree with boost arithmetic.
TEST(ModularProperty, ReferenceNativeAndOracleAgree) {
  SessionConfig ref_config;
  ref_config.native_modular = false;
  Session reference(ref_config);
  Session native;
  std::mt19937_64 rng(21);
  const char* moduli[] = {"7", "2147483647", "1000000007", "340282366920938463463374607431768211507"};
  for (const char* m : moduli) {
    const std::string set = std::string("(setmod ") + m + ")";
    run_lisp(reference, set);
    run_lisp(native, set);
    const oracle::Int mod(m);
    for (int i = 0; i < 500; ++i) {
      const std::string a = oracle::random_decimal(rng, 1 + rng() % 45);
      const std::string b = oracle::random_decimal(rng, 1 + rng() % 45);
      const int which = static_cast<int>(rng() % 4);
      const std::string call = std::string("(") + kModularNames[which] + " " + a + (which == 3 ? "" : " " + b) + ")";
      const std::string r = eval_print(reference, call);
      ASSERT_EQ(eval_print(native, call), r) << call;
      const oracle::Int x(a);
      const oracle::Int y(b);
      oracle::Int expected = which == 0 ? x + y : which == 1 ? x - y : which == 2 ? x * y : x;
      expected %= mod;
      if (expected < 0) expected += mod;
      ASSERT_EQ(r, expected.str()) << call << " mod " << m;
    }
  }
}

TEST(ModularProperty, PolynomialCoefficientsStayInRange) {
  Session s;
  std::mt19937_64 rng(22);
  run_rlisp(s, "setmod 13$");
  for (int i = 0; i < 100; ++i) {
    const std::string text = "(" + std::to_string(static_cast<int>(rng() % 200) - 100) + "*x + " +
                             std::to_string(static_cast<int>(rng() % 200) - 100) + "*y - 7)^" +
                             std::to_string(rng() % 5) + ";";
    const std::string out = run_rlisp(s, text);
    for (std::size_t p = 0; p < out.size();) {
      if (!std::isdigit(static_cast<unsigned char>(out[p]))) {
        ++p;
        continue;
      }
      std::size_t q = p;
      while (q < out.size() && std::isdigit(static_cast<unsigned char>(out[q]))) ++q;
      const bool exponent = p > 0 && out[p - 1] == '^';
      if (!exponent) {
        ASSERT_LT(std::stoll(out.substr(p, q - p)), 13) << text << " -> " << out;
      }
      p = q;
    }
  }
}

}  // namespace
}  // namespace pkrn
