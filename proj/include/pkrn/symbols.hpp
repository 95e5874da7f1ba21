#pragma once

#include <cstddef>
#include <deque>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "pkrn/value.hpp"

namespace pkrn {

struct Symbol {
  std::string name;
  Value value = Value::unbound();
  Value function = Value::unbound();
  Value plist;  // list of (key . value)
  Value flags;  // list of marker symbols
};

// Interned symbols. Names are case-sensitive; index 0 is nil and index 1 is t.
// Symbols are never collected.
class SymbolTable {
 public:
  SymbolTable();

  Value intern(std::string_view name);
  std::optional<Value> find(std::string_view name) const;

  Symbol& operator[](Value sym) { return symbols_[sym.index()]; }
  const Symbol& operator[](Value sym) const { return symbols_[sym.index()]; }
  Symbol& at(std::size_t index) { return symbols_[index]; }
  const Symbol& at(std::size_t index) const { return symbols_[index]; }

  std::size_t size() const { return symbols_.size(); }
  static Value by_index(std::size_t index) { return Value::handle(TypeTag::symbol, index); }

  Value t() const { return t_; }

  // Names of builtin functions, indexed by the payload of a builtin immediate.
  std::uint32_t add_builtin_name(Value sym);
  Value builtin_name(std::uint32_t index) const { return builtin_names_.at(index); }
  std::size_t builtin_count() const { return builtin_names_.size(); }

 private:
  std::deque<Symbol> symbols_;
  std::unordered_map<std::string, std::size_t> index_;
  Value t_;
  std::vector<Value> builtin_names_;
};

}  // namespace pkrn
