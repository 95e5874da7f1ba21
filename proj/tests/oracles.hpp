#pragma once

// Reference implementations used to check the kernel. None of them share
// code with the library under test.

#include <boost/multiprecision/cpp_int.hpp>
#include <cstdint>
#include <optional>
#include <random>
#include <string>
#include <utility>
#include <vector>

namespace oracle {

// Signed decimal-string arithmetic ("-123", "0"). Division truncates toward
// zero and the remainder takes the dividend's sign.
std::string dec_add(const std::string& a, const std::string& b);
std::string dec_sub(const std::string& a, const std::string& b);
std::string dec_mul(const std::string& a, const std::string& b);
std::pair<std::string, std::string> dec_divrem(const std::string& a, const std::string& b);
int dec_cmp_abs(const std::string& a, const std::string& b);

// Random signed decimal with at most `max_digits` digits.
std::string random_decimal(std::mt19937_64& rng, std::size_t max_digits);

using Rat = boost::multiprecision::cpp_rational;
using Int = boost::multiprecision::cpp_int;

// Coefficient vectors (index = power of x) from
// (k+1) P_{k+1} = (2k+1) x P_k - k P_{k-1}.
std::vector<std::vector<Rat>> legendre(unsigned k_max);

// Random infix arithmetic over small integers with + - * / ^, unary minus and
// parentheses, together with its prefix translation by shunting-yard and its
// value (nullopt on division by zero).
struct InfixCase {
  std::string text;
  std::string prefix;
  std::optional<Int> value;
};
InfixCase random_infix(std::mt19937_64& rng);

// Dense univariate polynomial with small integer coefficients.
struct Poly {
  std::vector<std::int64_t> coeffs;  // index = power
  std::string infix(const std::string& var) const;
  long double eval(long double x) const;
};
Poly random_poly(std::mt19937_64& rng, unsigned max_degree);
// Symmetric difference quotient with a step scaled to x.
long double central_difference(const Poly& p, long double x);

}  // namespace oracle
