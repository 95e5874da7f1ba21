#include "pkrn/symbols.hpp"

namespace pkrn {

SymbolTable::SymbolTable() {
  Value nil = intern("nil");
  symbols_[nil.index()].value = nil;
  t_ = intern("t");
  symbols_[t_.index()].value = t_;
}

Value SymbolTable::intern(std::string_view name) {
  if (auto it = index_.find(std::string(name)); it != index_.end()) return by_index(it->second);
  std::size_t idx = symbols_.size();
  symbols_.emplace_back().name = std::string(name);
  index_.emplace(std::string(name), idx);
  return by_index(idx);
}

std::optional<Value> SymbolTable::find(std::string_view name) const {
  if (auto it = index_.find(std::string(name)); it != index_.end()) return by_index(it->second);
  return std::nullopt;
}

std::uint32_t SymbolTable::add_builtin_name(Value sym) {
  builtin_names_.push_back(sym);
  return static_cast<std::uint32_t>(builtin_names_.size() - 1);
}

}  // namespace pkrn
