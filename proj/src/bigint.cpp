#include "pkrn/bigint.hpp"

#include <algorithm>
#include <bit>
#include <cassert>

#include "pkrn/value.hpp"

namespace pkrn {

namespace {

using Mag = std::vector<std::uint32_t>;

constexpr std::uint32_t kDecimalChunk = 1'000'000'000;

int cmp_mag(const Mag& a, const Mag& b) {
  if (a.size() != b.size()) return a.size() < b.size() ? -1 : 1;
  for (std::size_t i = a.size(); i-- > 0;) {
    if (a[i] != b[i]) return a[i] < b[i] ? -1 : 1;
  }
  return 0;
}

Mag add_mag(const Mag& a, const Mag& b) {
  const Mag& big = a.size() >= b.size() ? a : b;
  const Mag& small = a.size() >= b.size() ? b : a;
  Mag out(big.size() + 1);
  std::uint64_t carry = 0;
  for (std::size_t i = 0; i < big.size(); ++i) {
    std::uint64_t s = std::uint64_t{big[i]} + (i < small.size() ? small[i] : 0) + carry;
    out[i] = static_cast<std::uint32_t>(s);
    carry = s >> 32;
  }
  out[big.size()] = static_cast<std::uint32_t>(carry);
  return out;
}

// Precondition: a >= b in magnitude.
Mag sub_mag(const Mag& a, const Mag& b) {
  Mag out(a.size());
  std::int64_t borrow = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    std::int64_t d = std::int64_t{a[i]} - (i < b.size() ? b[i] : 0) - borrow;
    borrow = d < 0 ? 1 : 0;
    out[i] = static_cast<std::uint32_t>(d + (borrow << 32));
  }
  return out;
}

Mag mul_mag(const Mag& a, const Mag& b) {
  if (a.empty() || b.empty()) return {};
  Mag out(a.size() + b.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    std::uint64_t carry = 0;
    const std::uint64_t ai = a[i];
    for (std::size_t j = 0; j < b.size(); ++j) {
      std::uint64_t t = ai * b[j] + out[i + j] + carry;
      out[i + j] = static_cast<std::uint32_t>(t);
      carry = t >> 32;
    }
    out[i + b.size()] = static_cast<std::uint32_t>(carry);
  }
  return out;
}

// Divides in place by a single digit and returns the remainder.
std::uint32_t divmod_small(Mag& m, std::uint32_t d) {
  std::uint64_t rem = 0;
  for (std::size_t i = m.size(); i-- > 0;) {
    std::uint64_t cur = (rem << 32) | m[i];
    m[i] = static_cast<std::uint32_t>(cur / d);
    rem = cur % d;
  }
  while (!m.empty() && m.back() == 0) m.pop_back();
  return static_cast<std::uint32_t>(rem);
}

void muladd_small(Mag& m, std::uint32_t mul, std::uint32_t add) {
  std::uint64_t carry = add;
  for (auto& d : m) {
    std::uint64_t t = std::uint64_t{d} * mul + carry;
    d = static_cast<std::uint32_t>(t);
    carry = t >> 32;
  }
  if (carry) m.push_back(static_cast<std::uint32_t>(carry));
}

void trim(Mag& m) {
  while (!m.empty() && m.back() == 0) m.pop_back();
}

// Knuth algorithm D on magnitudes; v has at least two digits and u >= v.
void divmod_knuth(const Mag& u, const Mag& v, Mag& q, Mag& r) {
  const std::size_t m = u.size();
  const std::size_t n = v.size();
  const int s = std::countl_zero(v[n - 1]);
  Mag vn(n);
  Mag un(m + 1);
  for (std::size_t i = n - 1; i > 0; --i) {
    vn[i] = (v[i] << s) | (s ? static_cast<std::uint32_t>(std::uint64_t{v[i - 1]} >> (32 - s)) : 0);
  }
  vn[0] = v[0] << s;
  un[m] = s ? static_cast<std::uint32_t>(std::uint64_t{u[m - 1]} >> (32 - s)) : 0;
  for (std::size_t i = m - 1; i > 0; --i) {
    un[i] = (u[i] << s) | (s ? static_cast<std::uint32_t>(std::uint64_t{u[i - 1]} >> (32 - s)) : 0);
  }
  un[0] = u[0] << s;

  constexpr std::uint64_t kBase = std::uint64_t{1} << 32;
  q.assign(m - n + 1, 0);
  for (std::size_t j = m - n + 1; j-- > 0;) {
    const std::uint64_t num = (std::uint64_t{un[j + n]} << 32) | un[j + n - 1];
    std::uint64_t qhat = num / vn[n - 1];
    std::uint64_t rhat = num % vn[n - 1];
    while (qhat >= kBase || qhat * vn[n - 2] > ((rhat << 32) | un[j + n - 2])) {
      --qhat;
      rhat += vn[n - 1];
      if (rhat >= kBase) break;
    }
    std::int64_t k = 0;
    std::int64_t t = 0;
    for (std::size_t i = 0; i < n; ++i) {
      const std::uint64_t p = qhat * vn[i];
      t = static_cast<std::int64_t>(un[i + j]) - k - static_cast<std::int64_t>(p & 0xffffffffu);
      un[i + j] = static_cast<std::uint32_t>(t);
      k = static_cast<std::int64_t>(p >> 32) - (t >> 32);
    }
    t = static_cast<std::int64_t>(un[j + n]) - k;
    un[j + n] = static_cast<std::uint32_t>(t);
    q[j] = static_cast<std::uint32_t>(qhat);
    if (t < 0) {
      --q[j];
      std::uint64_t c = 0;
      for (std::size_t i = 0; i < n; ++i) {
        const std::uint64_t sum = std::uint64_t{un[i + j]} + vn[i] + c;
        un[i + j] = static_cast<std::uint32_t>(sum);
        c = sum >> 32;
      }
      un[j + n] = static_cast<std::uint32_t>(un[j + n] + c);
    }
  }
  r.assign(n, 0);
  for (std::size_t i = 0; i < n; ++i) {
    r[i] = (un[i] >> s) | (s ? static_cast<std::uint32_t>(std::uint64_t{un[i + 1]} << (32 - s)) : 0);
  }
  trim(q);
  trim(r);
}

}  // namespace

BigInt::BigInt(std::int64_t v) {
  if (v == 0) return;
  sign_ = v < 0 ? -1 : 1;
  std::uint64_t m = v < 0 ? ~static_cast<std::uint64_t>(v) + 1 : static_cast<std::uint64_t>(v);
  mag_.push_back(static_cast<std::uint32_t>(m));
  if (m >> 32) mag_.push_back(static_cast<std::uint32_t>(m >> 32));
}

BigInt BigInt::from_digits(int sign, std::vector<std::uint32_t> magnitude) {
  BigInt b;
  b.mag_ = std::move(magnitude);
  b.sign_ = sign < 0 ? -1 : 1;
  b.normalize();
  return b;
}

void BigInt::normalize() {
  trim(mag_);
  if (mag_.empty()) sign_ = 0;
}

std::optional<BigInt> BigInt::parse_decimal(std::string_view text) {
  bool negative = false;
  if (!text.empty() && (text[0] == '-' || text[0] == '+')) {
    negative = text[0] == '-';
    text.remove_prefix(1);
  }
  if (text.empty()) return std::nullopt;
  Mag mag;
  std::size_t first = text.size() % 9;
  if (first == 0) first = 9;
  std::size_t pos = 0;
  std::size_t len = first;
  while (pos < text.size()) {
    std::uint32_t chunk = 0;
    std::uint32_t scale = 1;
    for (std::size_t i = 0; i < len; ++i) {
      const char c = text[pos + i];
      if (c < '0' || c > '9') return std::nullopt;
      chunk = chunk * 10 + static_cast<std::uint32_t>(c - '0');
      scale *= 10;
    }
    muladd_small(mag, scale, chunk);
    pos += len;
    len = 9;
  }
  return from_digits(negative ? -1 : 1, std::move(mag));
}

std::string BigInt::to_decimal() const {
  if (is_zero()) return "0";
  Mag m = mag_;
  std::vector<std::uint32_t> chunks;
  while (!m.empty()) chunks.push_back(divmod_small(m, kDecimalChunk));
  std::string out = sign_ < 0 ? "-" : "";
  out += std::to_string(chunks.back());
  for (std::size_t i = chunks.size() - 1; i-- > 0;) {
    std::string part = std::to_string(chunks[i]);
    out.append(9 - part.size(), '0');
    out += part;
  }
  return out;
}

std::size_t BigInt::bit_length() const {
  if (mag_.empty()) return 0;
  return (mag_.size() - 1) * 32 + (32 - static_cast<std::size_t>(std::countl_zero(mag_.back())));
}

std::optional<std::int64_t> BigInt::to_int64() const {
  if (mag_.size() > 2) return std::nullopt;
  std::uint64_t m = 0;
  if (!mag_.empty()) m = mag_[0];
  if (mag_.size() == 2) m |= std::uint64_t{mag_[1]} << 32;
  if (sign_ >= 0) {
    if (m > static_cast<std::uint64_t>(INT64_MAX)) return std::nullopt;
    return static_cast<std::int64_t>(m);
  }
  if (m > std::uint64_t{1} << 63) return std::nullopt;
  return static_cast<std::int64_t>(~m + 1);
}

bool BigInt::fits_fixnum() const {
  auto v = to_int64();
  return v && pkrn::fits_fixnum(*v);
}

double BigInt::to_double() const {
  double d = 0;
  for (std::size_t i = mag_.size(); i-- > 0;) d = d * 4294967296.0 + mag_[i];
  return sign_ < 0 ? -d : d;
}

BigInt BigInt::operator-() const {
  BigInt r = *this;
  r.sign_ = -r.sign_;
  return r;
}

BigInt BigInt::abs() const {
  BigInt r = *this;
  if (r.sign_ < 0) r.sign_ = 1;
  return r;
}

BigInt operator+(const BigInt& a, const BigInt& b) {
  if (a.is_zero()) return b;
  if (b.is_zero()) return a;
  if (a.sign_ == b.sign_) return BigInt::from_digits(a.sign_, add_mag(a.mag_, b.mag_));
  const int c = cmp_mag(a.mag_, b.mag_);
  if (c == 0) return {};
  if (c > 0) return BigInt::from_digits(a.sign_, sub_mag(a.mag_, b.mag_));
  return BigInt::from_digits(b.sign_, sub_mag(b.mag_, a.mag_));
}

BigInt operator-(const BigInt& a, const BigInt& b) { return a + (-b); }

BigInt operator*(const BigInt& a, const BigInt& b) {
  if (a.is_zero() || b.is_zero()) return {};
  return BigInt::from_digits(a.sign_ * b.sign_, mul_mag(a.mag_, b.mag_));
}

std::strong_ordering operator<=>(const BigInt& a, const BigInt& b) {
  if (a.sign_ != b.sign_) return a.sign_ <=> b.sign_;
  int c = cmp_mag(a.mag_, b.mag_);
  if (a.sign_ < 0) c = -c;
  return c <=> 0;
}

std::pair<BigInt, BigInt> BigInt::divrem(const BigInt& a, const BigInt& b) {
  assert(!b.is_zero());
  if (cmp_mag(a.mag_, b.mag_) < 0) return {BigInt{}, a};
  Mag q;
  Mag r;
  if (b.mag_.size() == 1) {
    q = a.mag_;
    const std::uint32_t rem = divmod_small(q, b.mag_[0]);
    if (rem) r.push_back(rem);
  } else {
    divmod_knuth(a.mag_, b.mag_, q, r);
  }
  BigInt quotient = from_digits(a.sign_ * b.sign_, std::move(q));
  BigInt remainder = from_digits(a.sign_, std::move(r));
  return {std::move(quotient), std::move(remainder)};
}

BigInt BigInt::gcd(BigInt a, BigInt b) {
  a = a.abs();
  b = b.abs();
  while (!b.is_zero()) {
    BigInt r = divrem(a, b).second;
    a = std::move(b);
    b = std::move(r);
  }
  return a;
}

BigInt BigInt::pow(const BigInt& base, std::uint64_t exponent) {
  BigInt result{1};
  BigInt sq = base;
  while (exponent) {
    if (exponent & 1) result = result * sq;
    exponent >>= 1;
    if (exponent) sq = sq * sq;
  }
  return result;
}

}  // namespace pkrn
