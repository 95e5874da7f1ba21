#include "pkrn/session.hpp"

#include "pkrn/algebra.hpp"
#include "pkrn/bytecode.hpp"
#include "pkrn/errors.hpp"
#include "pkrn/sexpr.hpp"

namespace pkrn {

namespace {

enum Special : std::uint8_t {
  kNone = 0,
  kQuote,
  kCond,
  kProg,
  kSetq,
  kLambda,
  kDe,
  kGo,
  kReturn,
  kProgn,
  kAnd,
  kOr,
};

class BindingGuard {
 public:
  explicit BindingGuard(Session& s) : session_(s), mark_(s.binding_mark()) {}
  ~BindingGuard() { session_.unbind_to(mark_); }
  BindingGuard(const BindingGuard&) = delete;
  BindingGuard& operator=(const BindingGuard&) = delete;

 private:
  Session& session_;
  std::size_t mark_;
};

const char* kOutsideProg = "go or return outside prog";

}  // namespace

// Thrown by go/return in expression position; caught by the nearest prog.
struct Session::ProgSignal {
  bool is_go;
  Value payload;
};

Session::DepthGuard::DepthGuard(Session& s) : session_(s) {
  if (++s.depth_ > s.config_.max_depth) {
    --s.depth_;
    throw LispError(ErrorKind::stack_overflow,
                    "stack overflow: more than " + std::to_string(s.config_.max_depth) + " nested calls");
  }
}

Session::Session(SessionConfig config)
    : config_(std::move(config)), heap_(config_.heap), mode_(config_.mode), engine_(config_.engine) {
  heap_.add_root_provider(this);
  sym_.quote = intern("quote");
  sym_.cond = intern("cond");
  sym_.prog = intern("prog");
  sym_.setq = intern("setq");
  sym_.lambda = intern("lambda");
  sym_.de = intern("de");
  sym_.go = intern("go");
  sym_.ret = intern("return");
  sym_.progn = intern("progn");
  sym_.and_ = intern("and");
  sym_.or_ = intern("or");
  sym_.t = heap_.symbols().t();
  sym_.native = intern("native");
  sym_.modulus = intern("*modulus*");

  const std::pair<Value, Special> specials[] = {
      {sym_.quote, kQuote}, {sym_.cond, kCond},   {sym_.prog, kProg}, {sym_.setq, kSetq},
      {sym_.lambda, kLambda}, {sym_.de, kDe},     {sym_.go, kGo},     {sym_.ret, kReturn},
      {sym_.progn, kProgn}, {sym_.and_, kAnd},    {sym_.or_, kOr},
  };
  for (auto [s, id] : specials) {
    if (s.index() >= special_ids_.size()) special_ids_.resize(s.index() + 1, kNone);
    special_ids_[s.index()] = id;
  }

  install_core_builtins(*this);
  vm_ = std::make_unique<Vm>(*this);
  install_algebra(*this);
}

Session::~Session() { heap_.remove_root_provider(this); }

void Session::trace_roots(const std::function<void(Value)>& visit) const {
  for (const auto& [sym, old] : bindings_) visit(old);
}

int Session::special_id(Value head) const {
  return head.is_symbol() && head.index() < special_ids_.size() ? special_ids_[head.index()] : int{kNone};
}

Value Session::define_builtin(std::string_view name, BuiltinFn fn, int min_args, int max_args) {
  Value s = intern(name);
  for (std::size_t i = 0; i < builtins_.size(); ++i) {
    if (builtins_[i].name == s) {
      builtins_[i] = Builtin{s, fn, min_args, max_args};
      set_function(s, Value::builtin(static_cast<std::uint32_t>(i)));
      return s;
    }
  }
  const std::uint32_t idx = heap_.symbols().add_builtin_name(s);
  builtins_.push_back(Builtin{s, fn, min_args, max_args});
  set_function(s, Value::builtin(idx));
  return s;
}

std::optional<Value> Session::find_builtin(std::string_view name) const {
  for (std::size_t i = 0; i < builtins_.size(); ++i) {
    if (this->name(builtins_[i].name) == name) return Value::builtin(static_cast<std::uint32_t>(i));
  }
  return std::nullopt;
}

void Session::bind(Value sym, Value v) {
  Symbol& s = heap_.symbols()[sym];
  bindings_.emplace_back(sym, s.value);
  s.value = v;
}

void Session::unbind_to(std::size_t mark) {
  while (bindings_.size() > mark) {
    auto [sym, old] = bindings_.back();
    heap_.symbols()[sym].value = old;
    bindings_.pop_back();
  }
}

Value Session::get(Value sym, Value key) const {
  for (Value p = heap_.symbols()[check_symbol(sym)].plist; p.is_cons(); p = heap_.cdr(p)) {
    Value pair = heap_.car(p);
    if (heap_.car(pair) == key) return heap_.cdr(pair);
  }
  return kNil;
}

void Session::put(Value sym, Value key, Value val) {
  check_symbol(sym);
  for (Value p = heap_.symbols()[sym].plist; p.is_cons(); p = heap_.cdr(p)) {
    Value pair = heap_.car(p);
    if (heap_.car(pair) == key) {
      heap_.set_cdr(pair, val);
      return;
    }
  }
  RootScope roots(heap_.stack());
  roots.push(key);
  roots.push(val);
  Value pair = roots.push(heap_.alloc_cons(key, val));
  Value cell = heap_.alloc_cons(pair, heap_.symbols()[sym].plist);
  heap_.symbols()[sym].plist = cell;
}

void Session::flag(Value sym, Value key) {
  if (flagp(sym, key)) return;
  Value cell = heap_.alloc_cons(key, heap_.symbols()[sym].flags);
  heap_.symbols()[sym].flags = cell;
}

bool Session::flagp(Value sym, Value key) const {
  for (Value p = heap_.symbols()[check_symbol(sym)].flags; p.is_cons(); p = heap_.cdr(p)) {
    if (heap_.car(p) == key) return true;
  }
  return false;
}

std::string Session::take_output() {
  std::string out;
  out.swap(output_);
  return out;
}

std::optional<std::string> Session::read_line() {
  if (!config_.read_line) return std::nullopt;
  return config_.read_line();
}

std::string Session::print(Value v) const { return pkrn::print(heap_, v); }

Value Session::list(std::span<const Value> items) {
  RootScope roots(heap_.stack());
  Value& acc = roots.push(kNil);
  for (std::size_t i = items.size(); i-- > 0;) acc = heap_.alloc_cons(items[i], acc);
  return acc;
}

std::vector<Value> Session::list_items(Value list) const {
  std::vector<Value> out;
  for (; list.is_cons(); list = heap_.cdr(list)) out.push_back(heap_.car(list));
  return out;
}

void Session::wrong_type(std::string_view expected, Value got) const {
  throw LispError(ErrorKind::wrong_type,
                  "wrong type: expected " + std::string(expected) + ", got " + print(got));
}

Value Session::check_symbol(Value v) const {
  if (!v.is_symbol()) wrong_type("symbol", v);
  return v;
}

void Session::malformed(std::string_view what, Value form) const {
  throw LispError(ErrorKind::syntax, "malformed " + std::string(what) + ": " + print(form));
}

Value Session::run(Value form) {
  if (engine_ == Engine::bytecode) {
    RootScope roots(heap_.stack());
    roots.push(form);
    Value chunk;
    try {
      chunk = roots.push(compile(*this, form));
    } catch (const CompileError&) {
      return eval(form);
    }
    return vm_->execute(chunk, {}, true);
  }
  return eval(form);
}

Value Session::eval(Value form) {
  try {
    return eval_form(form);
  } catch (const ProgSignal&) {
    throw LispError(ErrorKind::other, kOutsideProg);
  }
}

Value Session::eval_form(Value form) {
  switch (form.tag()) {
    case TypeTag::symbol: {
      Value v = value(form);
      if (v.is_unbound()) {
        if (mode_ == EvalMode::algebraic) return form;
        throw LispError(ErrorKind::unbound_variable, "unbound variable: " + name(form));
      }
      return v;
    }
    case TypeTag::cons: {
      const int id = special_id(heap_.car(form));
      return id == kNone ? eval_call(form) : eval_special(id, form);
    }
    default:
      return form;
  }
}

Value Session::eval_call(Value form) {
  RootScope roots(heap_.stack());
  ShadowStack& st = heap_.stack();
  const std::size_t base = st.size();
  for (Value a = heap_.cdr(form); a.is_cons(); a = heap_.cdr(a)) roots.push(eval_form(heap_.car(a)));
  const auto args = st.range(base, st.size());
  Value head = heap_.car(form);
  if (head.is_symbol()) return apply(head, args);
  if (head.is_cons() && heap_.car(head) == sym_.lambda) return apply_lambda(head, args, kNil);
  throw LispError(ErrorKind::undefined_function, "undefined function: " + print(head));
}

Value Session::apply(Value fn, std::span<const Value> args) {
  Value f = fn;
  if (fn.is_symbol()) {
    f = function(fn);
    if (f.is_unbound()) throw LispError(ErrorKind::undefined_function, "undefined function: " + name(fn));
  }
  if (f.is_builtin()) return call_builtin(f, args);
  if (f.is_cons() && heap_.car(f) == sym_.lambda) return apply_lambda(f, args, fn.is_symbol() ? fn : kNil);
  if (is_chunk(heap_, f)) return vm_->execute(f, args);
  throw LispError(ErrorKind::undefined_function, "undefined function: " + print(fn));
}

namespace {

std::string arity_text(int min_args, int max_args) {
  if (max_args == kVariadic) return "at least " + std::to_string(min_args);
  if (min_args == max_args) return std::to_string(min_args);
  return std::to_string(min_args) + " to " + std::to_string(max_args);
}

}  // namespace

Value Session::call_builtin(Value fn, std::span<const Value> args) {
  const Builtin& b = builtins_.at(fn.immediate_payload());
  const auto n = static_cast<int>(args.size());
  if (n < b.min_args || (b.max_args != kVariadic && n > b.max_args)) {
    throw LispError(ErrorKind::wrong_arity, "wrong number of arguments to " + name(b.name) + ": expected " +
                                                arity_text(b.min_args, b.max_args) + ", got " +
                                                std::to_string(n));
  }
  return b.fn(*this, args);
}

Value Session::apply_lambda(Value lambda, std::span<const Value> args, Value fname) {
  RootScope roots(heap_.stack());
  roots.push(lambda);
  Value rest = heap_.cdr(lambda);
  if (!rest.is_cons()) malformed("lambda", lambda);
  Value params = heap_.car(rest);
  std::size_t nparams = 0;
  for (Value p = params; !p.is_nil(); p = heap_.cdr(p)) {
    if (!p.is_cons() || !heap_.car(p).is_symbol()) malformed("lambda", lambda);
    ++nparams;
  }
  if (nparams != args.size()) {
    throw LispError(ErrorKind::wrong_arity, "wrong number of arguments to " +
                                                (fname.is_symbol() && !fname.is_nil() ? name(fname) : "lambda") +
                                                ": expected " + std::to_string(nparams) + ", got " +
                                                std::to_string(args.size()));
  }
  DepthGuard depth(*this);
  BindingGuard guard(*this);
  std::size_t i = 0;
  for (Value p = params; p.is_cons(); p = heap_.cdr(p)) bind(heap_.car(p), args[i++]);
  Value result = kNil;
  try {
    for (Value b = heap_.cdr(rest); b.is_cons(); b = heap_.cdr(b)) result = eval_form(heap_.car(b));
  } catch (const ProgSignal&) {
    throw LispError(ErrorKind::other, kOutsideProg);
  }
  return result;
}

void Session::define_function(Value fname, Value params, Value body) {
  check_symbol(fname);
  RootScope roots(heap_.stack());
  Value tail = roots.push(heap_.alloc_cons(params, body));
  Value lambda = roots.push(heap_.alloc_cons(sym_.lambda, tail));
  if (engine_ == Engine::bytecode) {
    try {
      set_function(fname, compile_function(*this, fname, params, body));
      return;
    } catch (const CompileError&) {
    }
  }
  set_function(fname, lambda);
}

Value Session::eval_special(int id, Value form) {
  Value args = heap_.cdr(form);
  const auto nargs = [&] {
    std::size_t n = 0;
    for (Value a = args; a.is_cons(); a = heap_.cdr(a)) ++n;
    return n;
  };
  switch (id) {
    case kQuote:
      if (nargs() != 1) malformed("quote", form);
      return heap_.car(args);
    case kCond:
      return eval_cond(args);
    case kProg:
      return eval_prog(form);
    case kSetq: {
      if (nargs() != 2) malformed("setq", form);
      Value target = heap_.car(args);
      if (!target.is_symbol() || target.is_nil() || target == sym_.t) malformed("setq", form);
      Value v = eval_form(heap_.car(heap_.cdr(args)));
      set_value(target, v);
      return v;
    }
    case kLambda:
      return form;
    case kDe: {
      if (nargs() < 2 || !heap_.car(args).is_symbol()) malformed("de", form);
      Value rest = heap_.cdr(args);
      define_function(heap_.car(args), heap_.car(rest), heap_.cdr(rest));
      return heap_.car(args);
    }
    case kGo:
      if (nargs() != 1 || !heap_.car(args).is_symbol()) malformed("go", form);
      throw ProgSignal{true, heap_.car(args)};
    case kReturn: {
      const std::size_t n = nargs();
      if (n > 1) malformed("return", form);
      throw ProgSignal{false, n == 0 ? kNil : eval_form(heap_.car(args))};
    }
    case kProgn: {
      Value result = kNil;
      for (Value a = args; a.is_cons(); a = heap_.cdr(a)) result = eval_form(heap_.car(a));
      return result;
    }
    case kAnd: {
      Value result = sym_.t;
      for (Value a = args; a.is_cons(); a = heap_.cdr(a)) {
        result = eval_form(heap_.car(a));
        if (result.is_nil()) return kNil;
      }
      return result;
    }
    case kOr:
      for (Value a = args; a.is_cons(); a = heap_.cdr(a)) {
        Value v = eval_form(heap_.car(a));
        if (!v.is_nil()) return v;
      }
      return kNil;
    default:
      break;
  }
  malformed("special form", form);
}

Value Session::eval_cond(Value clauses) {
  for (; clauses.is_cons(); clauses = heap_.cdr(clauses)) {
    Value clause = heap_.car(clauses);
    if (!clause.is_cons()) malformed("cond clause", clause);
    Value test = eval_form(heap_.car(clause));
    if (test.is_nil()) continue;
    Value result = test;
    for (Value b = heap_.cdr(clause); b.is_cons(); b = heap_.cdr(b)) result = eval_form(heap_.car(b));
    return result;
  }
  return kNil;
}

Value Session::eval_stmt(Value form, Flow& flow, Value& carry) {
  if (form.is_cons()) {
    Value args = heap_.cdr(form);
    switch (special_id(heap_.car(form))) {
      case kGo:
        if (!args.is_cons() || !heap_.cdr(args).is_nil() || !heap_.car(args).is_symbol()) malformed("go", form);
        carry = heap_.car(args);
        flow = Flow::go;
        return kNil;
      case kReturn:
        if (args.is_cons() && !heap_.cdr(args).is_nil()) malformed("return", form);
        carry = args.is_cons() ? eval_form(heap_.car(args)) : kNil;
        flow = Flow::ret;
        return kNil;
      case kCond:
        for (Value c = args; c.is_cons(); c = heap_.cdr(c)) {
          Value clause = heap_.car(c);
          if (!clause.is_cons()) malformed("cond clause", clause);
          if (eval_form(heap_.car(clause)).is_nil()) continue;
          for (Value b = heap_.cdr(clause); b.is_cons(); b = heap_.cdr(b)) {
            eval_stmt(heap_.car(b), flow, carry);
            if (flow != Flow::normal) break;
          }
          return kNil;
        }
        return kNil;
      case kProgn:
        for (Value b = args; b.is_cons(); b = heap_.cdr(b)) {
          eval_stmt(heap_.car(b), flow, carry);
          if (flow != Flow::normal) break;
        }
        return kNil;
      default:
        break;
    }
  }
  return eval_form(form);
}

Value Session::eval_prog(Value form) {
  Value rest = heap_.cdr(form);
  if (!rest.is_cons()) malformed("prog", form);
  Value vars = heap_.car(rest);
  Value body = heap_.cdr(rest);
  for (Value v = vars; !v.is_nil(); v = heap_.cdr(v)) {
    if (!v.is_cons() || !heap_.car(v).is_symbol()) malformed("prog", form);
  }
  DepthGuard depth(*this);
  BindingGuard guard(*this);
  for (Value v = vars; v.is_cons(); v = heap_.cdr(v)) bind(heap_.car(v), kNil);

  Value cursor = body;
  while (cursor.is_cons()) {
    Value stmt = heap_.car(cursor);
    cursor = heap_.cdr(cursor);
    if (!stmt.is_cons()) continue;  // labels and other atoms
    Flow flow = Flow::normal;
    Value carry = kNil;
    try {
      eval_stmt(stmt, flow, carry);
    } catch (const ProgSignal& signal) {
      flow = signal.is_go ? Flow::go : Flow::ret;
      carry = signal.payload;
    }
    if (flow == Flow::ret) return carry;
    if (flow == Flow::go) {
      cursor = body;
      while (cursor.is_cons() && heap_.car(cursor) != carry) cursor = heap_.cdr(cursor);
      if (!cursor.is_cons()) throw LispError(ErrorKind::other, "undefined label: " + print(carry));
      cursor = heap_.cdr(cursor);
    }
  }
  return kNil;
}

}  // namespace pkrn
