#include "pkrn/numeric.hpp"

#include <cmath>

#include "pkrn/errors.hpp"
#include "pkrn/sexpr.hpp"

namespace pkrn {

namespace {

constexpr std::int64_t kSmallFactor = std::int64_t{1} << 30;

[[noreturn]] void not_an_integer(const Heap& heap, Value v) {
  throw LispError(ErrorKind::wrong_type, "wrong type: expected integer, got " + print(heap, v));
}

}  // namespace

Value make_integer(Heap& heap, std::int64_t i) {
  if (fits_fixnum(i)) return Value::fixnum(i);
  return make_integer(heap, BigInt(i));
}

Value make_integer(Heap& heap, const BigInt& b) {
  if (auto small = b.to_int64(); small && fits_fixnum(*small)) return Value::fixnum(*small);
  const auto digits = b.digits();
  const std::size_t n = digits.size();
  Value obj = heap.alloc_object(ObjectKind::bigint, 1 + (n + 1) / 2);
  heap.set_payload(obj, 0, (static_cast<Word>(n) << 1) | (b.is_negative() ? 1 : 0));
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t w = 1 + i / 2;
    heap.set_payload(obj, w, heap.payload(obj, w) | (Word{digits[i]} << (32 * (i % 2))));
  }
  return obj;
}

bool is_bignum(const Heap& heap, Value v) { return heap.is_kind(v, ObjectKind::bigint); }

bool is_integer(const Heap& heap, Value v) { return v.is_fixnum() || is_bignum(heap, v); }

bool is_number(const Heap& heap, Value v) {
  return is_integer(heap, v) || heap.is_kind(v, ObjectKind::flonum);
}

BigInt to_bigint(const Heap& heap, Value v) {
  if (v.is_fixnum()) return BigInt(v.fixnum_value());
  if (!is_bignum(heap, v)) not_an_integer(heap, v);
  const Word head = heap.payload(v, 0);
  const std::size_t n = static_cast<std::size_t>(head >> 1);
  std::vector<std::uint32_t> mag(n);
  for (std::size_t i = 0; i < n; ++i) {
    mag[i] = static_cast<std::uint32_t>(heap.payload(v, 1 + i / 2) >> (32 * (i % 2)));
  }
  return BigInt::from_digits((head & 1) ? -1 : 1, std::move(mag));
}

Value big_from_decimal(Heap& heap, std::string_view text) {
  auto parsed = BigInt::parse_decimal(text);
  if (!parsed) throw ParseError("malformed integer '" + std::string(text) + "'", 1, 1);
  return make_integer(heap, *parsed);
}

std::string big_to_decimal(const Heap& heap, Value v) {
  if (v.is_fixnum()) return std::to_string(v.fixnum_value());
  return to_bigint(heap, v).to_decimal();
}

Value big_add(Heap& heap, Value a, Value b) {
  if (a.is_fixnum() && b.is_fixnum()) return make_integer(heap, a.fixnum_value() + b.fixnum_value());
  return make_integer(heap, to_bigint(heap, a) + to_bigint(heap, b));
}

Value big_sub(Heap& heap, Value a, Value b) {
  if (a.is_fixnum() && b.is_fixnum()) return make_integer(heap, a.fixnum_value() - b.fixnum_value());
  return make_integer(heap, to_bigint(heap, a) - to_bigint(heap, b));
}

Value big_mul(Heap& heap, Value a, Value b) {
  if (a.is_fixnum() && b.is_fixnum()) {
    const std::int64_t x = a.fixnum_value();
    const std::int64_t y = b.fixnum_value();
    if (x > -kSmallFactor && x < kSmallFactor && y > -kSmallFactor && y < kSmallFactor) {
      return make_integer(heap, x * y);
    }
  }
  return make_integer(heap, to_bigint(heap, a) * to_bigint(heap, b));
}

std::pair<Value, Value> big_divrem(Heap& heap, Value a, Value b) {
  if (!is_integer(heap, a)) not_an_integer(heap, a);
  if (!is_integer(heap, b)) not_an_integer(heap, b);
  if (b == Value::fixnum(0)) throw LispError(ErrorKind::division_by_zero, "division by zero");
  if (a.is_fixnum() && b.is_fixnum()) {
    const std::int64_t x = a.fixnum_value();
    const std::int64_t y = b.fixnum_value();
    return {make_integer(heap, x / y), Value::fixnum(x % y)};
  }
  auto [q, r] = BigInt::divrem(to_bigint(heap, a), to_bigint(heap, b));
  RootScope roots(heap.stack());
  Value qv = roots.push(make_integer(heap, q));
  Value rv = make_integer(heap, r);
  return {qv, rv};
}

int big_cmp(const Heap& heap, Value a, Value b) {
  if (a.is_fixnum() && b.is_fixnum()) {
    return a.fixnum_value() < b.fixnum_value() ? -1 : (a.fixnum_value() > b.fixnum_value() ? 1 : 0);
  }
  const auto c = to_bigint(heap, a) <=> to_bigint(heap, b);
  return c < 0 ? -1 : (c > 0 ? 1 : 0);
}

bool is_float(const Heap& heap, Value v) { return heap.is_kind(v, ObjectKind::flonum); }

namespace {

double to_double(const Heap& heap, Value v) {
  if (is_float(heap, v)) return heap.float_value(v);
  if (v.is_fixnum()) return static_cast<double>(v.fixnum_value());
  if (is_bignum(heap, v)) return to_bigint(heap, v).to_double();
  throw LispError(ErrorKind::wrong_type, "wrong type: expected number, got " + print(heap, v));
}

bool any_float(const Heap& heap, Value a, Value b) {
  if (!is_number(heap, a)) to_double(heap, a);
  if (!is_number(heap, b)) to_double(heap, b);
  return is_float(heap, a) || is_float(heap, b);
}

}  // namespace

Value num_add(Heap& heap, Value a, Value b) {
  if (any_float(heap, a, b)) return heap.make_float(to_double(heap, a) + to_double(heap, b));
  return big_add(heap, a, b);
}

Value num_sub(Heap& heap, Value a, Value b) {
  if (any_float(heap, a, b)) return heap.make_float(to_double(heap, a) - to_double(heap, b));
  return big_sub(heap, a, b);
}

Value num_mul(Heap& heap, Value a, Value b) {
  if (any_float(heap, a, b)) return heap.make_float(to_double(heap, a) * to_double(heap, b));
  return big_mul(heap, a, b);
}

Value num_quotient(Heap& heap, Value a, Value b) {
  if (any_float(heap, a, b)) {
    const double d = to_double(heap, b);
    if (d == 0) throw LispError(ErrorKind::division_by_zero, "division by zero");
    return heap.make_float(to_double(heap, a) / d);
  }
  return big_divrem(heap, a, b).first;
}

Value num_remainder(Heap& heap, Value a, Value b) {
  if (any_float(heap, a, b)) {
    const double d = to_double(heap, b);
    if (d == 0) throw LispError(ErrorKind::division_by_zero, "division by zero");
    return heap.make_float(std::fmod(to_double(heap, a), d));
  }
  return big_divrem(heap, a, b).second;
}

Value num_negate(Heap& heap, Value a) { return num_sub(heap, Value::fixnum(0), a); }

int num_cmp(const Heap& heap, Value a, Value b) {
  if (any_float(heap, a, b)) {
    const double x = to_double(heap, a);
    const double y = to_double(heap, b);
    return x < y ? -1 : (x > y ? 1 : 0);
  }
  return big_cmp(heap, a, b);
}

}  // namespace pkrn
