#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>

#include "pkrn/heap.hpp"

namespace pkrn {

/// Reads S-expressions from text.
///
/// Grammar: integers, decimal floats (`1.5`, `2.0e3`), strings in double quotes
/// with `""` standing for one quote, symbols (`!` escapes the next character),
/// proper and dotted lists, `[a b]` vectors and the `'x` shorthand for
/// `(quote x)`. `%` and `;` start a comment running to end of line.
class Reader {
 public:
  Reader(Heap& heap, std::string_view text, std::size_t pos = 0);

  // Next datum, or nullopt at end of input. The caller must root the result
  // before reading again.
  std::optional<Value> next();
  std::size_t position() const { return pos_; }

 private:
  Value read_datum(int depth);
  Value read_list(char close, int depth);
  Value read_string();
  Value read_atom();
  void skip_space();
  [[noreturn]] void fail(const std::string& message, bool incomplete = false) const;
  std::size_t line_at(std::size_t pos) const;
  std::size_t column_at(std::size_t pos) const;

  Heap& heap_;
  std::string_view text_;
  std::size_t pos_;
};

struct ReadResult {
  Value value;
  std::size_t next;
};

// Reads the first datum at or after `pos`; throws ParseError if there is none.
ReadResult read(Heap& heap, std::string_view text, std::size_t pos = 0);

// Canonical single-line rendering. Cycles print as `<cycle>`.
std::string print(const Heap& heap, Value v);
void print_to(std::string& out, const Heap& heap, Value v);

// Structural equality: numbers by value, strings by content, conses and
// vectors element-wise, everything else by identity. Acyclic inputs only.
bool equal(const Heap& heap, Value a, Value b);

}  // namespace pkrn
