#pragma once

#include <string>
#include <string_view>
#include <utility>

#include "pkrn/bigint.hpp"
#include "pkrn/heap.hpp"

namespace pkrn {

// Integers are fixnums when they fit in 61 bits and BIGINT heap objects
// otherwise; no BIGINT ever holds a fixnum-range value.

Value make_integer(Heap& heap, std::int64_t i);
Value make_integer(Heap& heap, const BigInt& b);

bool is_bignum(const Heap& heap, Value v);
bool is_integer(const Heap& heap, Value v);
bool is_number(const Heap& heap, Value v);

// Throws LispError(wrong_type) when v is not an integer.
BigInt to_bigint(const Heap& heap, Value v);

// Throws ParseError on malformed text.
Value big_from_decimal(Heap& heap, std::string_view text);
std::string big_to_decimal(const Heap& heap, Value v);

Value big_add(Heap& heap, Value a, Value b);
Value big_sub(Heap& heap, Value a, Value b);
Value big_mul(Heap& heap, Value a, Value b);
// Truncated division. Throws LispError(division_by_zero) when b is zero.
std::pair<Value, Value> big_divrem(Heap& heap, Value a, Value b);
int big_cmp(const Heap& heap, Value a, Value b);

// Mixed integer/float arithmetic: a float operand makes the result a float.
// Non-numbers raise LispError(wrong_type).
bool is_float(const Heap& heap, Value v);
Value num_add(Heap& heap, Value a, Value b);
Value num_sub(Heap& heap, Value a, Value b);
Value num_mul(Heap& heap, Value a, Value b);
Value num_quotient(Heap& heap, Value a, Value b);
Value num_remainder(Heap& heap, Value a, Value b);
Value num_negate(Heap& heap, Value a);
int num_cmp(const Heap& heap, Value a, Value b);

}  // namespace pkrn
