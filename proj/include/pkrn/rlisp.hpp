#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "pkrn/value.hpp"

namespace pkrn {

class Session;

enum class TokenKind { identifier, integer, floating, string, op, keyword, quoted, end };

struct Token {
  TokenKind kind;
  std::string text;  // for `quoted`, the source of the datum after the quote
  std::size_t line;
  std::size_t column;
};

// Throws ParseError on an illegal character or an unterminated string/datum.
std::vector<Token> tokenize(std::string_view text);

// Argument order the source assumes for mapcar and map.
enum class Dialect { fn_first, list_first };

// Rewrites calls listed in the adaptation table into canonical
// (function, list) order. Identity for fn_first; quoted data is untouched.
Value dialect_adapt(Session& s, Value form, Dialect dialect);

struct Statement {
  Value form;
  bool echo;  // expression statements ended by ';' print their value
};

/// Parses rlisp source one statement at a time, translating each into a core
/// form. Statements end with ';' (value echoed when it is an expression) or
/// '$' (never echoed).
class RlispParser {
 public:
  // When `eof_terminates` is false, a final statement without a terminator
  // raises an incomplete ParseError instead of being accepted.
  RlispParser(Session& s, std::string_view text, Dialect dialect = Dialect::fn_first, bool eof_terminates = true);

  // Next statement, or nullopt at end of input. The form is unrooted.
  std::optional<Statement> next();

 private:
  Session& session_;
  std::vector<Token> tokens_;
  std::size_t pos_ = 0;
  Dialect dialect_;
  bool eof_terminates_;
};

// Translates a whole program into a list of core forms.
Value translate_program(Session& s, std::string_view text, Dialect dialect = Dialect::fn_first);

}  // namespace pkrn
