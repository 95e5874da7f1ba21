#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "pkrn/bigint.hpp"
#include "pkrn/value.hpp"

namespace pkrn {

class Session;

/// Exact rational with a positive denominator, always in lowest terms.
class Rational {
 public:
  Rational() = default;
  Rational(BigInt n);  // NOLINT(google-explicit-constructor)
  Rational(std::int64_t n) : Rational(BigInt(n)) {}  // NOLINT(google-explicit-constructor)
  Rational(BigInt n, BigInt d);  // d != 0

  const BigInt& num() const { return num_; }
  const BigInt& den() const { return den_; }
  bool is_zero() const { return num_.is_zero(); }
  bool is_integer() const { return den_ == BigInt(1); }
  bool is_negative() const { return num_.is_negative(); }
  double to_double() const;
  std::string to_string() const;

  Rational operator-() const;
  friend Rational operator+(const Rational& a, const Rational& b);
  friend Rational operator-(const Rational& a, const Rational& b);
  friend Rational operator*(const Rational& a, const Rational& b);
  friend Rational operator/(const Rational& a, const Rational& b);
  friend bool operator==(const Rational& a, const Rational& b) = default;

 private:
  BigInt num_ = BigInt(0);
  BigInt den_ = BigInt(1);
};

struct Term;

/// Canonical recursive sparse polynomial.
///
/// Either a constant (`terms` empty) or a polynomial in the main variable
/// `var` whose coefficients only involve variables of larger symbol index.
/// Terms have strictly decreasing exponents and nonzero coefficients, and a
/// polynomial never consists of a lone exponent-0 term, so equal polynomials
/// compare equal with ==.
struct StandardForm {
  Rational constant;
  std::uint64_t var = 0;  // symbol-table index of the main variable
  std::vector<Term> terms;

  static StandardForm variable(std::uint64_t var);
  bool is_constant() const { return terms.empty(); }
  bool is_zero() const { return terms.empty() && constant.is_zero(); }

  friend bool operator==(const StandardForm& a, const StandardForm& b);
};

struct Term {
  std::uint64_t exp;
  StandardForm coeff;

  friend bool operator==(const Term& a, const Term& b) = default;
};

StandardForm sf_add(const StandardForm& a, const StandardForm& b);
StandardForm sf_neg(const StandardForm& a);
StandardForm sf_sub(const StandardForm& a, const StandardForm& b);
StandardForm sf_mul(const StandardForm& a, const StandardForm& b);
StandardForm sf_pow(const StandardForm& a, std::uint64_t n);
// n-th derivative with respect to the variable of symbol index `var`.
StandardForm sf_df(const StandardForm& a, std::uint64_t var, std::uint64_t n = 1);
// Replaces `var` by `value` and renormalizes.
StandardForm sf_subst(const StandardForm& a, std::uint64_t var, const StandardForm& value);
// Reduces every coefficient into [0, m-1]; throws LispError when a
// denominator has no inverse modulo m.
StandardForm sf_reduce_mod(const StandardForm& a, const BigInt& m);
// Numeric evaluation; `env` maps variable index to its value.
double sf_evaluate(const StandardForm& a, const std::function<double(std::uint64_t)>& env);
// Coefficient of var^e for a univariate view (0 when absent). Coefficients of
// other variables must not occur.
Rational sf_coefficient(const StandardForm& a, std::uint64_t exp);

// Infix rendering such as "3/2*x^2 - 1/2". `name` maps a variable index to text.
std::string sf_render(const StandardForm& a, const std::function<std::string(std::uint64_t)>& name);

// Lisp encodings: integers as themselves, rationals as (:rn n . d),
// polynomials as (:sf var (e . c) ...).
Value sf_to_value(Session& s, const StandardForm& a);
// nullopt when v is not an algebraic value. Symbols count as variables only
// when `symbols_are_kernels` is set.
std::optional<StandardForm> sf_from_value(Session& s, Value v, bool symbols_are_kernels);
// Converts a prefix expression built from plus, difference, times, minus,
// quotient (by constants) and expt into canonical form. Throws LispError
// (algebra) for anything else.
StandardForm simp(Session& s, Value prefix);

// Text for an evaluated value as `write` and the rlisp echo show it.
std::string render_value(Session& s, Value v);

// The (name (lambda ...)) list of portable modular arithmetic definitions.
Value modular_reference_defs(Session& s);
// Installs modplus, moddifference, modtimes and modreduce as builtins.
void install_native_modular(Session& s);
inline constexpr const char* kModularNames[] = {"modplus", "moddifference", "modtimes", "modreduce"};

// Generic arithmetic, df, sub, simp, expt, write and setmod, plus the
// modular functions per the session's native_modular setting.
void install_algebra(Session& s);

// P_k = df((x^2-1)^k, x, k) / (2^k k!) for k = 0..k_max, with x the given variable.
std::vector<StandardForm> legendre_demo(std::uint64_t x, unsigned k_max);

}  // namespace pkrn
