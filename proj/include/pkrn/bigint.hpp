#pragma once

#include <compare>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace pkrn {

/// Arbitrary-precision signed integer: sign plus little-endian base-2^32
/// magnitude with no leading zero digit. Zero has sign 0 and no digits.
///
/// Multiplication is schoolbook and division is Knuth's algorithm D; decimal
/// conversion works in chunks of 10^9.
class BigInt {
 public:
  BigInt() = default;
  BigInt(std::int64_t v);  // NOLINT(google-explicit-constructor)

  static BigInt from_digits(int sign, std::vector<std::uint32_t> magnitude);
  // Accepts an optional '-' followed by one or more decimal digits.
  static std::optional<BigInt> parse_decimal(std::string_view text);
  std::string to_decimal() const;

  int sign() const { return sign_; }
  bool is_zero() const { return sign_ == 0; }
  bool is_negative() const { return sign_ < 0; }
  std::span<const std::uint32_t> digits() const { return mag_; }
  std::size_t bit_length() const;

  std::optional<std::int64_t> to_int64() const;
  bool fits_fixnum() const;
  double to_double() const;

  BigInt operator-() const;
  BigInt abs() const;

  friend BigInt operator+(const BigInt& a, const BigInt& b);
  friend BigInt operator-(const BigInt& a, const BigInt& b);
  friend BigInt operator*(const BigInt& a, const BigInt& b);
  friend bool operator==(const BigInt& a, const BigInt& b) = default;
  friend std::strong_ordering operator<=>(const BigInt& a, const BigInt& b);

  // Truncated division: quotient rounds toward zero, remainder takes the sign
  // of the dividend. Precondition: divisor is nonzero.
  static std::pair<BigInt, BigInt> divrem(const BigInt& a, const BigInt& b);
  static BigInt gcd(BigInt a, BigInt b);
  static BigInt pow(const BigInt& base, std::uint64_t exponent);

 private:
  void normalize();

  int sign_ = 0;
  std::vector<std::uint32_t> mag_;
};

}  // namespace pkrn
