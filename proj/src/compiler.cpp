#include <optional>
#include <unordered_map>

#include "pkrn/bytecode.hpp"
#include "pkrn/errors.hpp"
#include "pkrn/session.hpp"
#include "pkrn/sexpr.hpp"

namespace pkrn {

namespace {

constexpr std::size_t kMaxOperand = 0xffff;

class Builder {
 public:
  Builder(Session& s, std::vector<Value> params, Value name, bool is_prog)
      : s_(s), h_(s.heap()), roots_(s.heap().stack()), is_prog_(is_prog) {
    data_.name = name;
    for (Value p : params) {
      const_index_.emplace(p.word(), data_.constants.size());
      data_.constants.push_back(p);
    }
    data_.arity = static_cast<std::uint16_t>(params.size());
    params_ = std::move(params);
  }

  // Body of a prog: labels, statements and an implicit nil result.
  Value finish_prog(Value body) {
    for (Value b = body; b.is_cons(); b = h_.cdr(b)) {
      Value item = h_.car(b);
      if (item.is_symbol() && !labels_.contains(item.word())) labels_.emplace(item.word(), std::nullopt);
    }
    for (Value b = body; b.is_cons(); b = h_.cdr(b)) {
      Value item = h_.car(b);
      if (item.is_symbol()) {
        auto& slot = labels_[item.word()];
        if (!slot) slot = data_.code.size();
      } else if (item.is_cons()) {
        stmt(item);
      }
    }
    emit_const(kNil);
    emit(Op::ret);
    for (auto [at, label] : patches_) patch(at, *labels_.at(label));
    return build();
  }

  // Returns the value of the single expression compiled so far.
  Value finish() {
    emit(Op::ret);
    return build();
  }

  // Body of a lambda: forms evaluated in order, last one returned.
  Value finish_body(Value body) {
    progn(body);
    emit(Op::ret);
    return build();
  }

  void expr(Value form) {
    if (form.is_symbol()) {
      if (form.is_nil() || form == s_.sym().t) {
        emit_const(form);
      } else if (auto p = param_index(form)) {
        emit_index(Op::loadlocal, *p);
      } else {
        emit_index(Op::loadglobal, constant(form));
      }
      return;
    }
    if (!form.is_cons()) {
      emit_const(form);
      return;
    }
    Value head = h_.car(form);
    Value args = h_.cdr(form);
    const WellKnown& k = s_.sym();
    if (head == k.quote) {
      if (count(args) != 1) unsupported("malformed quote");
      emit_const(h_.car(args));
    } else if (head == k.cond) {
      cond(args);
    } else if (head == k.progn) {
      progn(args);
    } else if (head == k.and_) {
      logical_and(args);
    } else if (head == k.or_) {
      logical_or(args);
    } else if (head == k.setq) {
      setq(form);
    } else if (head == k.prog) {
      prog(form);
    } else if (head == k.lambda) {
      emit_const(form);
    } else if (head == k.de || head == k.go || head == k.ret) {
      unsupported(s_.name(head) + " in expression position");
    } else if (head.is_symbol()) {
      call(head, args);
    } else if (head.is_cons() && h_.car(head) == k.lambda) {
      Value rest = h_.cdr(head);
      if (!rest.is_cons()) unsupported("malformed lambda");
      const std::size_t n = count(args);
      Value chunk;
      {
        Builder inner(s_, param_list(h_.car(rest)), kNil, false);
        chunk = inner.finish_body(h_.cdr(rest));
      }
      emit_const(chunk);
      for (Value a = args; a.is_cons(); a = h_.cdr(a)) expr(h_.car(a));
      emit_index(Op::call, n);
    } else {
      unsupported("non-function head " + s_.print(head));
    }
  }

 private:
  [[noreturn]] void unsupported(const std::string& what) const { throw CompileError("cannot compile: " + what); }

  std::size_t count(Value list) const {
    std::size_t n = 0;
    for (; list.is_cons(); list = h_.cdr(list)) ++n;
    if (!list.is_nil()) unsupported("dotted argument list");
    return n;
  }

  std::vector<Value> param_list(Value params) const {
    std::vector<Value> out;
    for (Value p = params; !p.is_nil(); p = h_.cdr(p)) {
      if (!p.is_cons() || !h_.car(p).is_symbol()) unsupported("malformed parameter list");
      out.push_back(h_.car(p));
    }
    if (out.size() > 0xff) unsupported("too many parameters");
    return out;
  }

  std::optional<std::size_t> param_index(Value sym) const {
    for (std::size_t i = params_.size(); i-- > 0;) {
      if (params_[i] == sym) return i;
    }
    return std::nullopt;
  }

  std::size_t constant(Value v) {
    if (auto it = const_index_.find(v.word()); it != const_index_.end()) return it->second;
    const std::size_t i = data_.constants.size();
    if (i > kMaxOperand) unsupported("constant pool overflow");
    data_.constants.push_back(v);
    const_index_.emplace(v.word(), i);
    if (v.is_heapobj() || v.is_cons()) roots_.push(v);
    return i;
  }

  std::size_t temp() {
    data_.local_slots = static_cast<std::uint16_t>(data_.arity + 1);
    return data_.arity;
  }

  void emit(Op op) { data_.code.push_back(static_cast<std::uint8_t>(op)); }

  void emit_index(Op op, std::size_t operand) {
    if (operand > kMaxOperand) unsupported("operand out of range");
    if (operand > 0xff) {
      data_.code.push_back(kExtPrefix);
      emit(op);
      data_.code.push_back(static_cast<std::uint8_t>(operand & 0xff));
      data_.code.push_back(static_cast<std::uint8_t>(operand >> 8));
    } else {
      emit(op);
      data_.code.push_back(static_cast<std::uint8_t>(operand));
    }
  }

  void emit_const(Value v) { emit_index(Op::loadconst, constant(v)); }

  // Emits a jump with a placeholder target and returns the operand offset.
  std::size_t emit_jump(Op op) {
    emit(op);
    data_.code.push_back(0);
    data_.code.push_back(0);
    return data_.code.size() - 2;
  }

  void patch(std::size_t at, std::size_t target) {
    if (target > kMaxOperand) unsupported("code too large");
    data_.code[at] = static_cast<std::uint8_t>(target & 0xff);
    data_.code[at + 1] = static_cast<std::uint8_t>(target >> 8);
  }

  void patch_here(std::size_t at) { patch(at, data_.code.size()); }

  Value build() {
    if (data_.local_slots < data_.arity) data_.local_slots = data_.arity;
    if (data_.code.size() > kMaxOperand) unsupported("code too large");
    return make_chunk(h_, data_);
  }

  void progn(Value forms) {
    if (count(forms) == 0) {
      emit_const(kNil);
      return;
    }
    for (Value f = forms; f.is_cons(); f = h_.cdr(f)) {
      expr(h_.car(f));
      if (h_.cdr(f).is_cons()) emit(Op::pop);
    }
  }

  void cond(Value clauses) {
    count(clauses);
    std::vector<std::size_t> to_end;
    for (Value c = clauses; c.is_cons(); c = h_.cdr(c)) {
      Value clause = h_.car(c);
      if (!clause.is_cons()) unsupported("malformed cond clause");
      count(clause);
      expr(h_.car(clause));
      std::size_t next;
      if (h_.cdr(clause).is_nil()) {
        const std::size_t t = temp();
        emit_index(Op::storelocal, t);
        next = emit_jump(Op::jumpnil);
        emit_index(Op::loadlocal, t);
      } else {
        next = emit_jump(Op::jumpnil);
        progn(h_.cdr(clause));
      }
      to_end.push_back(emit_jump(Op::jump));
      patch_here(next);
    }
    emit_const(kNil);
    for (auto at : to_end) patch_here(at);
  }

  void logical_and(Value args) {
    if (count(args) == 0) {
      emit_const(s_.sym().t);
      return;
    }
    std::vector<std::size_t> to_false;
    for (Value a = args; a.is_cons(); a = h_.cdr(a)) {
      expr(h_.car(a));
      if (h_.cdr(a).is_cons()) to_false.push_back(emit_jump(Op::jumpnil));
    }
    if (to_false.empty()) return;
    const std::size_t to_end = emit_jump(Op::jump);
    for (auto at : to_false) patch_here(at);
    emit_const(kNil);
    patch_here(to_end);
  }

  void logical_or(Value args) {
    if (count(args) == 0) {
      emit_const(kNil);
      return;
    }
    std::vector<std::size_t> to_end;
    for (Value a = args; a.is_cons(); a = h_.cdr(a)) {
      expr(h_.car(a));
      if (!h_.cdr(a).is_cons()) break;
      const std::size_t t = temp();
      emit_index(Op::storelocal, t);
      const std::size_t next = emit_jump(Op::jumpnil);
      emit_index(Op::loadlocal, t);
      to_end.push_back(emit_jump(Op::jump));
      patch_here(next);
    }
    for (auto at : to_end) patch_here(at);
  }

  void setq(Value form) {
    Value args = h_.cdr(form);
    if (count(args) != 2) unsupported("malformed setq");
    Value target = h_.car(args);
    if (!target.is_symbol() || target.is_nil() || target == s_.sym().t) unsupported("malformed setq");
    expr(h_.car(h_.cdr(args)));
    if (auto p = param_index(target)) {
      emit_index(Op::storelocal, *p);
    } else {
      emit_index(Op::storeglobal, constant(target));
    }
  }

  void prog(Value form) {
    Value rest = h_.cdr(form);
    if (!rest.is_cons()) unsupported("malformed prog");
    count(rest);
    std::vector<Value> vars = param_list(h_.car(rest));
    Value chunk;
    {
      Builder inner(s_, vars, s_.sym().prog, true);
      chunk = inner.finish_prog(h_.cdr(rest));
    }
    emit_const(chunk);
    for (std::size_t i = 0; i < vars.size(); ++i) emit_const(kNil);
    emit_index(Op::call, vars.size());
  }

  bool inline_op(Value head, std::size_t n, Op& op) const {
    struct Entry {
      const char* name;
      std::size_t arity;
      Op op;
    };
    static constexpr Entry kInline[] = {
        {"car", 1, Op::car},          {"cdr", 1, Op::cdr},        {"cons", 2, Op::cons},
        {"eq", 2, Op::eq},            {"plus", 2, Op::add},       {"difference", 2, Op::sub},
        {"times", 2, Op::mul},        {"quotient", 2, Op::div},   {"remainder", 2, Op::rem},
    };
    const std::string& name = s_.name(head);
    for (const auto& e : kInline) {
      if (name == e.name && n == e.arity) {
        op = e.op;
        return true;
      }
    }
    return false;
  }

  void call(Value head, Value args) {
    const std::size_t n = count(args);
    if (n > 0xff) unsupported("too many arguments");
    Op op;
    if (inline_op(head, n, op)) {
      for (Value a = args; a.is_cons(); a = h_.cdr(a)) expr(h_.car(a));
      emit(op);
      return;
    }
    emit_const(head);
    for (Value a = args; a.is_cons(); a = h_.cdr(a)) expr(h_.car(a));
    emit_index(Op::call, n);
  }

  // Statement position inside a prog chunk, where go and return are allowed.
  void stmt(Value form) {
    if (!is_prog_) unsupported("statement outside prog");
    Value head = h_.car(form);
    Value args = h_.cdr(form);
    const WellKnown& k = s_.sym();
    if (head == k.go) {
      if (count(args) != 1 || !h_.car(args).is_symbol()) unsupported("malformed go");
      Value label = h_.car(args);
      if (!labels_.contains(label.word())) unsupported("go to unknown label " + s_.print(label));
      patches_.emplace_back(emit_jump(Op::jump), label.word());
    } else if (head == k.ret) {
      const std::size_t n = count(args);
      if (n > 1) unsupported("malformed return");
      if (n == 1) {
        expr(h_.car(args));
      } else {
        emit_const(kNil);
      }
      emit(Op::ret);
    } else if (head == k.cond) {
      count(args);
      std::vector<std::size_t> to_end;
      for (Value c = args; c.is_cons(); c = h_.cdr(c)) {
        Value clause = h_.car(c);
        if (!clause.is_cons()) unsupported("malformed cond clause");
        count(clause);
        expr(h_.car(clause));
        const std::size_t next = emit_jump(Op::jumpnil);
        for (Value b = h_.cdr(clause); b.is_cons(); b = h_.cdr(b)) stmt_or_skip(h_.car(b));
        to_end.push_back(emit_jump(Op::jump));
        patch_here(next);
      }
      for (auto at : to_end) patch_here(at);
    } else if (head == k.progn) {
      count(args);
      for (Value b = args; b.is_cons(); b = h_.cdr(b)) stmt_or_skip(h_.car(b));
    } else {
      expr(form);
      emit(Op::pop);
    }
  }

  // Atoms nested in statement-level cond/progn are evaluated, not labels.
  void stmt_or_skip(Value form) {
    if (form.is_cons()) {
      stmt(form);
    } else {
      expr(form);
      emit(Op::pop);
    }
  }

  Session& s_;
  Heap& h_;
  RootScope roots_;
  bool is_prog_;
  ChunkData data_;
  std::vector<Value> params_;
  std::unordered_map<std::uint64_t, std::size_t> const_index_;
  std::unordered_map<std::uint64_t, std::optional<std::size_t>> labels_;
  std::vector<std::pair<std::size_t, std::uint64_t>> patches_;
};

}  // namespace

Value compile(Session& session, Value form) {
  Builder b(session, {}, kNil, false);
  b.expr(form);
  return b.finish();
}

Value compile_function(Session& session, Value name, Value params, Value body) {
  std::vector<Value> ps;
  Heap& h = session.heap();
  for (Value p = params; !p.is_nil(); p = h.cdr(p)) {
    if (!p.is_cons() || !h.car(p).is_symbol()) throw CompileError("cannot compile: malformed parameter list");
    ps.push_back(h.car(p));
  }
  Builder b(session, ps, name, false);
  return b.finish_body(body);
}

}  // namespace pkrn
