#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "pkrn/heap.hpp"

namespace pkrn {

class Session;
class Vm;

using BuiltinFn = Value (*)(Session&, std::span<const Value>);

inline constexpr int kVariadic = -1;

struct Builtin {
  Value name;
  BuiltinFn fn = nullptr;
  int min_args = 0;
  int max_args = 0;  // kVariadic for no upper bound
};

// In algebraic mode unbound identifiers evaluate to themselves and arithmetic
// accepts them as polynomial kernels.
enum class EvalMode { symbolic, algebraic };

// How top-level forms and `de` bodies are executed.
enum class Engine { tree, bytecode };

struct SessionConfig {
  HeapConfig heap;
  std::size_t max_depth = 10000;
  EvalMode mode = EvalMode::symbolic;
  Engine engine = Engine::tree;
  // Install native modular arithmetic and flag it 'native before the
  // reference definitions are instated.
  bool native_modular = true;
  // Line source for read-value; null means end of input.
  std::function<std::optional<std::string>()> read_line;
};

// Symbols the evaluator dispatches on, interned once per session.
struct WellKnown {
  Value quote, cond, prog, setq, lambda, de, go, ret, progn, and_, or_;
  Value t, native, modulus;
};

/// One interpreter instance: heap, symbol table, builtins, dynamic bindings
/// and the bytecode VM.
class Session : private RootProvider {
 public:
  explicit Session(SessionConfig config = {});
  ~Session() override;
  Session(const Session&) = delete;
  Session& operator=(const Session&) = delete;

  Heap& heap() { return heap_; }
  const Heap& heap() const { return heap_; }
  Value intern(std::string_view name) { return heap_.intern(name); }
  const WellKnown& sym() const { return sym_; }
  const SessionConfig& config() const { return config_; }

  EvalMode mode() const { return mode_; }
  void set_mode(EvalMode m) { mode_ = m; }
  Engine engine() const { return engine_; }
  void set_engine(Engine e) { engine_ = e; }

  // Evaluates one top-level form with the configured engine. Bytecode mode
  // compiles the form and falls back to the tree-walker if it cannot.
  Value run(Value form);
  // Tree-walking evaluation.
  Value eval(Value form);
  // fn is a symbol, builtin, lambda form or chunk.
  Value apply(Value fn, std::span<const Value> args);
  // Installs `(lambda params . body)` as the function of `name`, compiled
  // when the engine is bytecode.
  void define_function(Value name, Value params, Value body);

  Value define_builtin(std::string_view name, BuiltinFn fn, int min_args, int max_args);
  const Builtin& builtin(std::uint32_t index) const { return builtins_.at(index); }
  std::size_t builtin_count() const { return builtins_.size(); }
  std::optional<Value> find_builtin(std::string_view name) const;

  // Shallow binding: the old value is saved and restored by unbind_to.
  void bind(Value sym, Value v);
  std::size_t binding_mark() const { return bindings_.size(); }
  void unbind_to(std::size_t mark);

  // Counts nested function and prog frames; throws past max_depth.
  class DepthGuard {
   public:
    explicit DepthGuard(Session& s);
    ~DepthGuard() { --session_.depth_; }
    DepthGuard(const DepthGuard&) = delete;
    DepthGuard& operator=(const DepthGuard&) = delete;

   private:
    Session& session_;
  };

  Value value(Value sym) const { return heap_.symbols()[sym].value; }
  void set_value(Value sym, Value v) { heap_.symbols()[sym].value = v; }
  Value function(Value sym) const { return heap_.symbols()[sym].function; }
  void set_function(Value sym, Value v) { heap_.symbols()[sym].function = v; }
  const std::string& name(Value sym) const { return heap_.symbols()[sym].name; }

  Value get(Value sym, Value key) const;
  void put(Value sym, Value key, Value val);
  void flag(Value sym, Value key);
  bool flagp(Value sym, Value key) const;

  void write(std::string_view text) { output_ += text; }
  std::string take_output();
  std::optional<std::string> read_line();
  // Text read by read-value but not yet consumed.
  std::string& pending_input() { return pending_input_; }

  std::string print(Value v) const;
  Value boolean(bool b) const { return b ? sym_.t : kNil; }
  Value list(std::span<const Value> items);
  std::vector<Value> list_items(Value list) const;

  [[noreturn]] void wrong_type(std::string_view expected, Value got) const;
  Value check_symbol(Value v) const;

  Vm& vm() { return *vm_; }

 private:
  friend class DepthGuard;
  struct ProgSignal;
  enum class Flow { normal, go, ret };

  void trace_roots(const std::function<void(Value)>& visit) const override;

  Value eval_form(Value form);
  Value eval_call(Value form);
  Value eval_special(int id, Value form);
  Value eval_cond(Value clauses);
  Value eval_prog(Value form);
  Value eval_stmt(Value form, Flow& flow, Value& carry);
  Value apply_lambda(Value lambda, std::span<const Value> args, Value name);
  Value call_builtin(Value fn, std::span<const Value> args);
  int special_id(Value head) const;
  [[noreturn]] void malformed(std::string_view what, Value form) const;

  SessionConfig config_;
  Heap heap_;
  WellKnown sym_{};
  EvalMode mode_;
  Engine engine_;
  std::vector<Builtin> builtins_;
  std::vector<std::pair<Value, Value>> bindings_;
  std::vector<std::uint8_t> special_ids_;
  std::size_t depth_ = 0;
  std::string output_;
  std::string pending_input_;
  std::unique_ptr<Vm> vm_;
};

// Definitions installed by instate_reference: (name lambda-form) pairs.
struct InstateReport {
  std::vector<std::string> installed;
  std::vector<std::string> skipped;
  std::vector<std::string> skipped_undefined;
};

// For each (name (lambda params . body)) entry, installs the lambda unless
// `name` is flagged 'native. Malformed entries raise an error naming them.
InstateReport instate_reference(Session& session, Value defs);

void install_core_builtins(Session& session);

}  // namespace pkrn
