#include <optional>

#include "pkrn/bytecode.hpp"
#include "pkrn/errors.hpp"
#include "pkrn/numeric.hpp"
#include "pkrn/session.hpp"

namespace pkrn {

namespace {

constexpr const char* kInlineNames[kOpCount] = {
    nullptr, nullptr, nullptr, nullptr, nullptr,      nullptr, nullptr, nullptr, nullptr, "cons",
    "car",   "cdr",   "plus",  "difference", "times", "quotient", "remainder", "eq", nullptr,
};

}  // namespace

Vm::Vm(Session& session) : session_(session) {
  for (std::size_t i = 0; i < kOpCount; ++i) {
    if (!kInlineNames[i]) continue;
    op_symbol_[i] = session.intern(kInlineNames[i]);
    fast_[i] = session.function(op_symbol_[i]);
  }
}

Value Vm::execute(Value chunk, std::span<const Value> args, bool toplevel) {
  Heap& h = session_.heap();
  const Word shape = h.payload(chunk, chunk_layout::kShape);
  const std::size_t arity = shape & 0xffff;
  const std::size_t local_slots = (shape >> 16) & 0xffff;
  const std::size_t nconsts = static_cast<std::size_t>(shape >> 32);
  if (args.size() != arity) {
    Value name = Value::from_word(h.payload(chunk, chunk_layout::kName));
    throw LispError(ErrorKind::wrong_arity,
                    "wrong number of arguments to " +
                        (name.is_symbol() && !name.is_nil() ? session_.name(name) : std::string("lambda")) +
                        ": expected " + std::to_string(arity) + ", got " + std::to_string(args.size()));
  }
  std::optional<Session::DepthGuard> depth;
  if (!toplevel) depth.emplace(session_);
  RootScope roots(h.stack());
  roots.push(chunk);
  const std::size_t mark = session_.binding_mark();
  try {
    for (std::size_t i = 0; i < arity; ++i) {
      session_.bind(Value::from_word(h.payload(chunk, chunk_layout::kConstants + i)), args[i]);
    }
    Value result = run(chunk, arity, local_slots, nconsts);
    session_.unbind_to(mark);
    return result;
  } catch (...) {
    session_.unbind_to(mark);
    throw;
  }
}

Value Vm::run(Value chunk, std::size_t arity, std::size_t local_slots, std::size_t nconsts) {
  Heap& h = session_.heap();
  ShadowStack& st = h.stack();
  const std::size_t temps = st.size();
  for (std::size_t i = arity; i < local_slots; ++i) st.push(kNil);
  const std::size_t code_base = chunk_layout::kConstants + nconsts;
  const std::size_t code_size = static_cast<std::size_t>(h.payload(chunk, chunk_layout::kCodeSize));

  const auto byte = [&](std::size_t pc) -> std::size_t {
    if (pc >= code_size) throw ContractError("bytecode: execution ran past the end of the chunk");
    return (h.payload(chunk, code_base + pc / 8) >> (8 * (pc % 8))) & 0xff;
  };
  const auto constant = [&](std::size_t k) {
    return Value::from_word(h.payload(chunk, chunk_layout::kConstants + k));
  };
  const auto pop = [&] {
    Value v = st.top();
    st.truncate(st.size() - 1);
    return v;
  };

  std::size_t pc = 0;
  for (;;) {
    bool wide = false;
    std::size_t opcode = byte(pc++);
    if (opcode == kExtPrefix) {
      wide = true;
      opcode = byte(pc++);
    }
    const auto index_operand = [&] {
      std::size_t v = byte(pc++);
      if (wide) v |= byte(pc++) << 8;
      return v;
    };
    switch (static_cast<Op>(opcode)) {
      case Op::loadconst:
        st.push(constant(index_operand()));
        break;
      case Op::loadlocal: {
        const std::size_t n = index_operand();
        if (n < arity) {
          st.push(session_.value(constant(n)));
        } else {
          st.push(st[temps + n - arity]);
        }
        break;
      }
      case Op::storelocal: {
        const std::size_t n = index_operand();
        if (n < arity) {
          session_.set_value(constant(n), st.top());
        } else {
          st[temps + n - arity] = st.top();
        }
        break;
      }
      case Op::loadglobal: {
        Value s = constant(index_operand());
        Value v = session_.value(s);
        if (v.is_unbound()) {
          if (session_.mode() != EvalMode::algebraic) {
            throw LispError(ErrorKind::unbound_variable, "unbound variable: " + session_.name(s));
          }
          v = s;
        }
        st.push(v);
        break;
      }
      case Op::storeglobal:
        session_.set_value(constant(index_operand()), st.top());
        break;
      case Op::call: {
        const std::size_t n = index_operand();
        const std::size_t base = st.size() - n;
        Value r = session_.apply(st[base - 1], st.range(base, st.size()));
        st.truncate(base - 1);
        st.push(r);
        break;
      }
      case Op::jump: {
        const std::size_t lo = byte(pc);
        pc = lo | (byte(pc + 1) << 8);
        break;
      }
      case Op::jumpnil: {
        const std::size_t target = byte(pc) | (byte(pc + 1) << 8);
        pc += 2;
        if (pop().is_nil()) pc = target;
        break;
      }
      case Op::ret:
        return st.top();
      case Op::pop:
        pop();
        break;
      case Op::car:
      case Op::cdr: {
        const Op op = static_cast<Op>(opcode);
        Value& top = st.top();
        if (session_.function(op_symbol_[opcode]) == fast_[opcode] && (top.is_cons() || top.is_nil())) {
          top = top.is_nil() ? kNil : (op == Op::car ? h.car(top) : h.cdr(top));
        } else {
          top = session_.apply(op_symbol_[opcode], st.last(1));
        }
        break;
      }
      case Op::cons:
      case Op::add:
      case Op::sub:
      case Op::mul:
      case Op::div:
      case Op::rem:
      case Op::eq: {
        Value r = inline_op(static_cast<Op>(opcode), st[st.size() - 2], st.top());
        st.truncate(st.size() - 2);
        st.push(r);
        break;
      }
      default:
        throw ContractError("bytecode: invalid opcode " + std::to_string(opcode));
    }
  }
}

// Operands are still on the stack, so they stay rooted across allocation.
Value Vm::inline_op(Op op, Value a, Value b) {
  const auto i = static_cast<std::size_t>(op);
  if (session_.function(op_symbol_[i]) == fast_[i]) {
    switch (op) {
      case Op::cons:
        return session_.heap().alloc_cons(a, b);
      case Op::eq:
        return session_.boolean(a == b);
      default:
        break;
    }
    if (a.is_fixnum() && b.is_fixnum()) {
      const std::int64_t x = a.fixnum_value();
      const std::int64_t y = b.fixnum_value();
      std::int64_t r = 0;
      switch (op) {
        case Op::add:
          return make_integer(session_.heap(), x + y);
        case Op::sub:
          return make_integer(session_.heap(), x - y);
        case Op::mul:
          if (!__builtin_mul_overflow(x, y, &r)) return make_integer(session_.heap(), r);
          break;
        case Op::div:
          if (y != 0) return Value::fixnum(x / y);
          break;
        case Op::rem:
          if (y != 0) return Value::fixnum(x % y);
          break;
        default:
          break;
      }
    }
  }
  ShadowStack& st = session_.heap().stack();
  return session_.apply(op_symbol_[i], st.last(2));
}

}  // namespace pkrn
