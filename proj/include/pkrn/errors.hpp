#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace pkrn {

enum class ErrorKind {
  unbound_variable,
  undefined_function,
  wrong_arity,
  wrong_type,
  division_by_zero,
  stack_overflow,
  user,
  algebra,
  syntax,
  other,
};

// Evaluation-time error. Non-resumable: the top level unwinds and reports it.
class LispError : public std::runtime_error {
 public:
  LispError(ErrorKind kind, const std::string& message)
      : std::runtime_error(message), kind_(kind) {}
  ErrorKind kind() const { return kind_; }

 private:
  ErrorKind kind_;
};

// Reader / rlisp front-end error carrying a 1-based source position.
class ParseError : public std::runtime_error {
 public:
  ParseError(const std::string& message, std::size_t line, std::size_t column, bool incomplete = false)
      : std::runtime_error(message + " at line " + std::to_string(line) + ", column " +
                           std::to_string(column)),
        line_(line),
        column_(column),
        incomplete_(incomplete) {}
  std::size_t line() const { return line_; }
  std::size_t column() const { return column_; }
  // True when more input could complete the text (used by the REPL).
  bool incomplete() const { return incomplete_; }

 private:
  std::size_t line_;
  std::size_t column_;
  bool incomplete_;
};

class AllocationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Misuse of an API contract, e.g. releasing a root ticket twice.
class ContractError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

class CompileError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class ImageError : public std::runtime_error {
 public:
  ImageError(const std::string& message, std::size_t offset)
      : std::runtime_error(message + " (byte offset " + std::to_string(offset) + ")"),
        offset_(offset) {}
  std::size_t offset() const { return offset_; }

 private:
  std::size_t offset_;
};

}  // namespace pkrn
