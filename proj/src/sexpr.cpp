#include "pkrn/sexpr.hpp"

#include <charconv>
#include <cmath>
#include <unordered_set>
#include <vector>

#include "pkrn/errors.hpp"
#include "pkrn/numeric.hpp"

namespace pkrn {

namespace {

constexpr int kMaxDepth = 10000;

bool is_delimiter(char c) {
  switch (c) {
    case ' ': case '\t': case '\n': case '\r': case '\f': case '\v':
    case '(': case ')': case '[': case ']': case '\'': case '"': case '%': case ';':
      return true;
    default:
      return false;
  }
}

bool is_digit(char c) { return c >= '0' && c <= '9'; }

bool looks_like_integer(std::string_view s) {
  std::size_t i = (!s.empty() && (s[0] == '-' || s[0] == '+')) ? 1 : 0;
  if (i == s.size()) return false;
  for (; i < s.size(); ++i) {
    if (!is_digit(s[i])) return false;
  }
  return true;
}

// digits '.' digits [('e'|'E') [sign] digits], optional leading sign.
bool looks_like_float(std::string_view s) {
  std::size_t i = (!s.empty() && (s[0] == '-' || s[0] == '+')) ? 1 : 0;
  const std::size_t int_start = i;
  while (i < s.size() && is_digit(s[i])) ++i;
  if (i == int_start || i == s.size() || s[i] != '.') return false;
  const std::size_t frac_start = ++i;
  while (i < s.size() && is_digit(s[i])) ++i;
  if (i == frac_start) return false;
  if (i == s.size()) return true;
  if (s[i] != 'e' && s[i] != 'E') return false;
  ++i;
  if (i < s.size() && (s[i] == '-' || s[i] == '+')) ++i;
  const std::size_t exp_start = i;
  while (i < s.size() && is_digit(s[i])) ++i;
  return i != exp_start && i == s.size();
}

}  // namespace

Reader::Reader(Heap& heap, std::string_view text, std::size_t pos) : heap_(heap), text_(text), pos_(pos) {}

std::size_t Reader::line_at(std::size_t pos) const {
  std::size_t line = 1;
  for (std::size_t i = 0; i < pos && i < text_.size(); ++i) {
    if (text_[i] == '\n') ++line;
  }
  return line;
}

std::size_t Reader::column_at(std::size_t pos) const {
  std::size_t col = 1;
  for (std::size_t i = 0; i < pos && i < text_.size(); ++i) col = text_[i] == '\n' ? 1 : col + 1;
  return col;
}

void Reader::fail(const std::string& message, bool incomplete) const {
  throw ParseError(message, line_at(pos_), column_at(pos_), incomplete);
}

void Reader::skip_space() {
  while (pos_ < text_.size()) {
    const char c = text_[pos_];
    if (c == '%' || c == ';') {
      while (pos_ < text_.size() && text_[pos_] != '\n') ++pos_;
    } else if (c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f' || c == '\v') {
      ++pos_;
    } else {
      return;
    }
  }
}

std::optional<Value> Reader::next() {
  skip_space();
  if (pos_ >= text_.size()) return std::nullopt;
  return read_datum(0);
}

Value Reader::read_datum(int depth) {
  if (depth > kMaxDepth) fail("nesting too deep");
  skip_space();
  if (pos_ >= text_.size()) fail("unexpected end of input", true);
  const char c = text_[pos_];
  switch (c) {
    case '(':
      ++pos_;
      return read_list(')', depth);
    case '[':
      ++pos_;
      return read_list(']', depth);
    case ')':
    case ']':
      fail(std::string("unbalanced '") + c + "'");
    case '\'': {
      ++pos_;
      RootScope roots(heap_.stack());
      Value quoted = roots.push(read_datum(depth + 1));
      Value tail = roots.push(heap_.alloc_cons(quoted, kNil));
      return heap_.alloc_cons(heap_.intern("quote"), tail);
    }
    case '"':
      return read_string();
    default:
      return read_atom();
  }
}

Value Reader::read_list(char close, int depth) {
  RootScope roots(heap_.stack());
  const std::size_t first = heap_.stack().size();
  Value tail = kNil;
  bool dotted = false;
  const bool is_vector = close == ']';
  for (;;) {
    skip_space();
    if (pos_ >= text_.size()) fail("unexpected end of input: missing '" + std::string(1, close) + "'", true);
    const char c = text_[pos_];
    if (c == close) {
      ++pos_;
      break;
    }
    if (c == ')' || c == ']') fail(std::string("mismatched '") + c + "'");
    if (!is_vector && c == '.' && pos_ + 1 <= text_.size() &&
        (pos_ + 1 == text_.size() || is_delimiter(text_[pos_ + 1]))) {
      if (heap_.stack().size() == first) fail("dot with no preceding element");
      ++pos_;
      tail = roots.push(read_datum(depth + 1));
      dotted = true;
      skip_space();
      if (pos_ >= text_.size()) fail("unexpected end of input after dotted tail", true);
      if (text_[pos_] != close) fail("expected ')' after dotted tail");
      ++pos_;
      break;
    }
    roots.push(read_datum(depth + 1));
  }
  ShadowStack& st = heap_.stack();
  const std::size_t end = dotted ? st.size() - 1 : st.size();
  if (is_vector) {
    Value vec = heap_.make_vector(end - first);
    for (std::size_t i = first; i < end; ++i) heap_.vector_set(vec, i - first, st[i]);
    return vec;
  }
  Value& acc = roots.push(tail);
  for (std::size_t i = end; i-- > first;) acc = heap_.alloc_cons(st[i], acc);
  return acc;
}

Value Reader::read_string() {
  ++pos_;
  std::string out;
  for (;;) {
    if (pos_ >= text_.size()) fail("unterminated string", true);
    const char c = text_[pos_++];
    if (c == '"') {
      if (pos_ < text_.size() && text_[pos_] == '"') {
        out += '"';
        ++pos_;
        continue;
      }
      break;
    }
    out += c;
  }
  return heap_.make_string(out);
}

Value Reader::read_atom() {
  std::string name;
  bool escaped = false;
  const std::size_t start = pos_;
  while (pos_ < text_.size() && !is_delimiter(text_[pos_])) {
    if (text_[pos_] == '!') {
      if (pos_ + 1 >= text_.size()) fail("'!' at end of input", true);
      escaped = true;
      name += text_[pos_ + 1];
      pos_ += 2;
      continue;
    }
    name += text_[pos_++];
  }
  if (name.empty()) {
    pos_ = start;
    fail("unexpected character");
  }
  if (!escaped) {
    if (looks_like_integer(name)) return big_from_decimal(heap_, name);
    if (looks_like_float(name)) {
      double d = 0;
      const char* b = name.data() + (name[0] == '+' ? 1 : 0);
      std::from_chars(b, name.data() + name.size(), d);
      return heap_.make_float(d);
    }
    if (name == ".") fail("unexpected '.'");
  }
  return heap_.intern(name);
}

ReadResult read(Heap& heap, std::string_view text, std::size_t pos) {
  Reader reader(heap, text, pos);
  auto v = reader.next();
  if (!v) throw ParseError("no expression in input", 1, 1, true);
  return {*v, reader.position()};
}

namespace {

class Printer {
 public:
  Printer(std::string& out, const Heap& heap) : out_(out), heap_(heap) {}

  void print(Value v, int depth) {
    switch (v.tag()) {
      case TypeTag::fixnum:
        out_ += std::to_string(v.fixnum_value());
        return;
      case TypeTag::symbol:
        print_symbol(heap_.symbols()[v].name);
        return;
      case TypeTag::cons:
        print_list(v, depth);
        return;
      case TypeTag::immediate:
        print_immediate(v);
        return;
      case TypeTag::heapobj:
        print_object(v, depth);
        return;
    }
    out_ += "#<invalid>";
  }

 private:
  void print_symbol(const std::string& name) {
    const bool numeric = looks_like_integer(name) || looks_like_float(name) || name == ".";
    for (std::size_t i = 0; i < name.size(); ++i) {
      const char c = name[i];
      if (is_delimiter(c) || c == '!' || (i == 0 && numeric)) out_ += '!';
      out_ += c;
    }
  }

  void print_immediate(Value v) {
    switch (v.immediate_kind()) {
      case ImmediateKind::character:
        out_ += "#\\";
        out_ += static_cast<char>(v.immediate_payload());
        return;
      case ImmediateKind::unbound:
        out_ += "#<unbound>";
        return;
      case ImmediateKind::builtin: {
        const auto idx = static_cast<std::uint32_t>(v.immediate_payload());
        out_ += "#<builtin ";
        out_ += idx < heap_.symbols().builtin_count()
                    ? heap_.symbols()[heap_.symbols().builtin_name(idx)].name
                    : std::to_string(idx);
        out_ += '>';
        return;
      }
      case ImmediateKind::free_cell:
        out_ += "#<free>";
        return;
    }
  }

  void print_object(Value v, int depth) {
    switch (heap_.kind(v)) {
      case ObjectKind::bigint:
        out_ += big_to_decimal(heap_, v);
        return;
      case ObjectKind::string: {
        out_ += '"';
        for (char c : heap_.string_value(v)) {
          if (c == '"') out_ += '"';
          out_ += c;
        }
        out_ += '"';
        return;
      }
      case ObjectKind::flonum:
        print_float(heap_.float_value(v));
        return;
      case ObjectKind::vector: {
        out_ += '[';
        const std::size_t n = heap_.vector_size(v);
        for (std::size_t i = 0; i < n; ++i) {
          if (i) out_ += ' ';
          print(heap_.vector_ref(v, i), depth + 1);
        }
        out_ += ']';
        return;
      }
      case ObjectKind::chunk: {
        Value name = Value::from_word(heap_.payload(v, chunk_layout::kName));
        out_ += "#<chunk ";
        out_ += name.is_symbol() && !name.is_nil() ? heap_.symbols()[name].name : "lambda";
        out_ += '>';
        return;
      }
      case ObjectKind::free_block:
        out_ += "#<free>";
        return;
    }
  }

  void print_float(double d) {
    if (!std::isfinite(d)) {
      out_ += std::isnan(d) ? "#<float nan>" : (d > 0 ? "#<float inf>" : "#<float -inf>");
      return;
    }
    char buf[64];
    auto res = std::to_chars(buf, buf + sizeof buf, d);
    std::string s(buf, res.ptr);
    const auto e = s.find_first_of("eE");
    const std::string mantissa = s.substr(0, e);
    if (mantissa.find('.') == std::string::npos) {
      s.insert(e == std::string::npos ? s.size() : e, ".0");
    }
    out_ += s;
  }

  void print_list(Value v, int depth) {
    if (on_path_.contains(v.word())) {
      out_ += "<cycle>";
      return;
    }
    if (depth > kMaxDepth) {
      out_ += "(...)";
      return;
    }
    out_ += '(';
    std::vector<std::uint64_t> added;
    Value cur = v;
    bool first = true;
    for (;;) {
      on_path_.insert(cur.word());
      added.push_back(cur.word());
      if (!first) out_ += ' ';
      first = false;
      print(heap_.car(cur), depth + 1);
      Value next = heap_.cdr(cur);
      if (next.is_nil()) break;
      if (next.is_cons()) {
        if (on_path_.contains(next.word())) {
          out_ += " . <cycle>";
          break;
        }
        cur = next;
        continue;
      }
      out_ += " . ";
      print(next, depth + 1);
      break;
    }
    out_ += ')';
    for (auto w : added) on_path_.erase(w);
  }

  std::string& out_;
  const Heap& heap_;
  std::unordered_set<std::uint64_t> on_path_;
};

}  // namespace

void print_to(std::string& out, const Heap& heap, Value v) {
  Printer p(out, heap);
  p.print(v, 0);
}

std::string print(const Heap& heap, Value v) {
  std::string out;
  print_to(out, heap, v);
  return out;
}

bool equal(const Heap& heap, Value a, Value b) {
  for (;;) {
    if (a == b) return true;
    if (a.tag() != b.tag()) return false;
    if (a.is_cons()) {
      if (!equal(heap, heap.car(a), heap.car(b))) return false;
      a = heap.cdr(a);
      b = heap.cdr(b);
      continue;
    }
    if (!a.is_heapobj()) return false;
    const ObjectKind k = heap.kind(a);
    if (k != heap.kind(b)) return false;
    switch (k) {
      case ObjectKind::bigint:
        return to_bigint(heap, a) == to_bigint(heap, b);
      case ObjectKind::flonum:
        return heap.float_value(a) == heap.float_value(b);
      case ObjectKind::string:
        return heap.string_value(a) == heap.string_value(b);
      case ObjectKind::vector: {
        const std::size_t n = heap.vector_size(a);
        if (n != heap.vector_size(b)) return false;
        for (std::size_t i = 0; i < n; ++i) {
          if (!equal(heap, heap.vector_ref(a, i), heap.vector_ref(b, i))) return false;
        }
        return true;
      }
      default:
        return false;
    }
  }
}

}  // namespace pkrn
