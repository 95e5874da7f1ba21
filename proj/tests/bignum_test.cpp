#include <gtest/gtest.h>

#include <random>

#include "oracles.hpp"
#include "pkrn/bigint.hpp"
#include "pkrn/errors.hpp"
#include "pkrn/numeric.hpp"

namespace pkrn {
namespace {

BigInt big(const std::string& s) { return *BigInt::parse_decimal(s); }

TEST(DecimalOracle, SmallCasesAgreeWithMachineArithmetic) {
  std::mt19937_64 rng(5);
  std::uniform_int_distribution<std::int64_t> d(-1000000, 1000000);
  for (int i = 0; i < 2000; ++i) {
    const std::int64_t a = d(rng);
    std::int64_t b = d(rng);
    if (b == 0) b = 3;
    EXPECT_EQ(oracle::dec_add(std::to_string(a), std::to_string(b)), std::to_string(a + b));
    EXPECT_EQ(oracle::dec_sub(std::to_string(a), std::to_string(b)), std::to_string(a - b));
    EXPECT_EQ(oracle::dec_mul(std::to_string(a), std::to_string(b)), std::to_string(a * b));
    const auto [q, r] = oracle::dec_divrem(std::to_string(a), std::to_string(b));
    EXPECT_EQ(q, std::to_string(a / b));
    EXPECT_EQ(r, std::to_string(a % b));
  }
}

TEST(BigInt, DecimalConversion) {
  EXPECT_EQ(BigInt(0).to_decimal(), "0");
  EXPECT_EQ(big("-0").to_decimal(), "0");
  EXPECT_EQ(big("000123").to_decimal(), "123");
  EXPECT_EQ(big("-18446744073709551616").to_decimal(), "-18446744073709551616");
  EXPECT_FALSE(BigInt::parse_decimal("").has_value());
  EXPECT_FALSE(BigInt::parse_decimal("12a").has_value());
  EXPECT_FALSE(BigInt::parse_decimal("-").has_value());
  EXPECT_EQ(BigInt(INT64_MIN).to_decimal(), "-9223372036854775808");
}

TEST(BigInt, KnownValues) {
  EXPECT_EQ(BigInt::pow(BigInt(2), 100).to_decimal(), "1267650600228229401496703205376");
  EXPECT_EQ((big("99999999999999999999") + BigInt(1)).to_decimal(), "100000000000000000000");
  EXPECT_EQ((big("4294967296") * big("4294967296")).to_decimal(), "18446744073709551616");
  EXPECT_EQ(BigInt::gcd(big("1071"), big("462")).to_decimal(), "21");
}

TEST(BigInt, DivisionTruncatesTowardZero) {
  const std::pair<int, int> cases[] = {{7, 2}, {-7, 2}, {7, -2}, {-7, -2}};
  for (auto [a, b] : cases) {
    auto [q, r] = BigInt::divrem(BigInt(a), BigInt(b));
    EXPECT_EQ(q, BigInt(a / b)) << a << "/" << b;
    EXPECT_EQ(r, BigInt(a % b)) << a << "%" << b;
  }
}

TEST(BigInt, FixnumBoundaryNormalisation) {
  Heap h;
  Value top = make_integer(h, kFixnumMax);
  EXPECT_TRUE(top.is_fixnum());
  RootScope roots(h.stack());
  Value over = roots.push(big_add(h, top, Value::fixnum(1)));
  EXPECT_TRUE(is_bignum(h, over));
  Value back = big_sub(h, over, Value::fixnum(1));
  EXPECT_TRUE(back.is_fixnum());
  EXPECT_EQ(back.fixnum_value(), kFixnumMax);
}

TEST(BigInt, DivisionByZeroIsALispError) {
  Heap h;
  EXPECT_THROW(big_divrem(h, Value::fixnum(1), Value::fixnum(0)), LispError);
}

TEST(BigIntProperty, MatchesDecimalOracle) {
  std::mt19937_64 rng(31337);
  Heap h;
  for (int i = 0; i < 300; ++i) {
    const std::string a = oracle::random_decimal(rng, 400);
    std::string b = oracle::random_decimal(rng, 400);
    if (b == "0") b = "7";
    const BigInt x = big(a);
    const BigInt y = big(b);
    ASSERT_EQ((x + y).to_decimal(), oracle::dec_add(a, b));
    ASSERT_EQ((x - y).to_decimal(), oracle::dec_sub(a, b));
    ASSERT_EQ((x * y).to_decimal(), oracle::dec_mul(a, b));
    const auto [q, r] = BigInt::divrem(x, y);
    const auto [oq, orr] = oracle::dec_divrem(a, b);
    ASSERT_EQ(q.to_decimal(), oq) << a << " / " << b;
    ASSERT_EQ(r.to_decimal(), orr);
    ASSERT_EQ(q * y + r, x);
    ASSERT_LT(r.abs(), y.abs());
  }
}

// Divisors with a large top digit and remainders near the divisor stress the
// quotient-digit correction in long division.
TEST(BigIntProperty, AdversarialDivision) {
  std::mt19937_64 rng(2718);
  for (int i = 0; i < 500; ++i) {
    std::vector<std::uint32_t> dd(2 + rng() % 6, 0xffffffffu);
    dd.front() = static_cast<std::uint32_t>(rng());
    const BigInt divisor = BigInt::from_digits(1, dd);
    const BigInt quotient = BigInt::from_digits(1, {static_cast<std::uint32_t>(rng()), static_cast<std::uint32_t>(rng()) | 1u});
    const BigInt rem = divisor - BigInt(1 + static_cast<std::int64_t>(rng() % 3));
    const BigInt dividend = quotient * divisor + rem;
    auto [q, r] = BigInt::divrem(dividend, divisor);
    ASSERT_EQ(q, quotient);
    ASSERT_EQ(r, rem);
  }
}

TEST(BigIntProperty, AlgebraicLaws) {
  std::mt19937_64 rng(99);
  for (int i = 0; i < 300; ++i) {
    const BigInt a = big(oracle::random_decimal(rng, 60));
    const BigInt b = big(oracle::random_decimal(rng, 60));
    const BigInt c = big(oracle::random_decimal(rng, 60));
    ASSERT_EQ(a + b, b + a);
    ASSERT_EQ(a * b, b * a);
    ASSERT_EQ(a * (b + c), a * b + a * c);
    ASSERT_EQ((a + b) - b, a);
    ASSERT_EQ(-(-a), a);
  }
}

}  // namespace
}  // namespace pkrn
