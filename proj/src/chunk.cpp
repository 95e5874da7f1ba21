#include <cstdio>
#include <deque>
#include <optional>
#include <unordered_set>

#include "pkrn/bytecode.hpp"
#include "pkrn/errors.hpp"
#include "pkrn/sexpr.hpp"

namespace pkrn {

namespace {

constexpr std::string_view kOpNames[kOpCount] = {
    "LOADCONST", "LOADLOCAL", "STORELOCAL", "LOADGLOBAL", "STOREGLOBAL", "CALL", "JUMP",
    "JUMPNIL",   "RETURN",    "CONS",       "CAR",        "CDR",         "ADD",  "SUB",
    "MUL",       "DIV",       "REM",        "EQ",         "POP",
};

bool has_index_operand(Op op) {
  switch (op) {
    case Op::loadconst:
    case Op::loadlocal:
    case Op::storelocal:
    case Op::loadglobal:
    case Op::storeglobal:
    case Op::call:
      return true;
    default:
      return false;
  }
}

bool is_jump(Op op) { return op == Op::jump || op == Op::jumpnil; }

struct Decoded {
  std::size_t offset;
  std::size_t size;
  Op op;
  std::size_t operand;
};

// Decodes the instruction at `pc`; nullopt if it runs off the end or the
// opcode is unknown.
std::optional<Decoded> decode(const std::vector<std::uint8_t>& code, std::size_t pc) {
  std::size_t p = pc;
  bool wide = false;
  if (p < code.size() && code[p] == kExtPrefix) {
    wide = true;
    ++p;
  }
  if (p >= code.size() || code[p] >= kOpCount) return std::nullopt;
  const Op op = static_cast<Op>(code[p++]);
  std::size_t operand = 0;
  if (is_jump(op) || (wide && has_index_operand(op))) {
    if (p + 2 > code.size()) return std::nullopt;
    operand = code[p] | (std::size_t{code[p + 1]} << 8);
    p += 2;
  } else if (has_index_operand(op)) {
    if (p + 1 > code.size()) return std::nullopt;
    operand = code[p++];
  } else if (wide) {
    return std::nullopt;
  }
  if (wide && is_jump(op)) return std::nullopt;
  return Decoded{pc, p - pc, op, operand};
}

std::string hex4(std::size_t n) {
  char buf[16];
  std::snprintf(buf, sizeof buf, "%04zx", n);
  return buf;
}

}  // namespace

std::string_view op_name(Op op) {
  const auto i = static_cast<std::size_t>(op);
  return i < kOpCount ? kOpNames[i] : "???";
}

bool is_chunk(const Heap& heap, Value v) { return heap.is_kind(v, ObjectKind::chunk); }

Value make_chunk(Heap& heap, const ChunkData& data) {
  const std::size_t n = data.constants.size();
  const std::size_t code_words = (data.code.size() + 7) / 8;
  std::vector<Value> children(data.constants);
  children.push_back(data.name);
  Value obj = heap.alloc_object(ObjectKind::chunk, chunk_layout::kConstants + n + code_words, children);
  heap.set_payload(obj, chunk_layout::kShape,
                   Word{data.arity} | (Word{data.local_slots} << 16) | (static_cast<Word>(n) << 32));
  heap.set_payload(obj, chunk_layout::kCodeSize, data.code.size());
  heap.set_payload(obj, chunk_layout::kName, data.name.word());
  for (std::size_t i = 0; i < n; ++i) heap.set_payload(obj, chunk_layout::kConstants + i, data.constants[i].word());
  for (std::size_t i = 0; i < data.code.size(); ++i) {
    const std::size_t w = chunk_layout::kConstants + n + i / 8;
    heap.set_payload(obj, w, heap.payload(obj, w) | (Word{data.code[i]} << (8 * (i % 8))));
  }
  return obj;
}

ChunkData read_chunk(const Heap& heap, Value chunk) {
  ChunkData d;
  const Word shape = heap.payload(chunk, chunk_layout::kShape);
  d.arity = static_cast<std::uint16_t>(shape & 0xffff);
  d.local_slots = static_cast<std::uint16_t>((shape >> 16) & 0xffff);
  const std::size_t n = static_cast<std::size_t>(shape >> 32);
  d.name = Value::from_word(heap.payload(chunk, chunk_layout::kName));
  for (std::size_t i = 0; i < n; ++i) {
    d.constants.push_back(Value::from_word(heap.payload(chunk, chunk_layout::kConstants + i)));
  }
  const std::size_t size = static_cast<std::size_t>(heap.payload(chunk, chunk_layout::kCodeSize));
  for (std::size_t i = 0; i < size; ++i) {
    const Word w = heap.payload(chunk, chunk_layout::kConstants + n + i / 8);
    d.code.push_back(static_cast<std::uint8_t>(w >> (8 * (i % 8))));
  }
  return d;
}

void verify(const Heap& heap, Value chunk) {
  if (!is_chunk(heap, chunk)) throw CompileError("verify: not a chunk");
  const ChunkData d = read_chunk(heap, chunk);
  const auto fail = [](std::size_t pc, const std::string& what) {
    throw CompileError("verify: " + what + " at offset " + hex4(pc));
  };
  if (d.arity > d.local_slots) fail(0, "arity exceeds local slot count");
  if (d.constants.size() < d.arity) fail(0, "missing parameter constants");
  for (std::size_t i = 0; i < d.arity; ++i) {
    if (!d.constants[i].is_symbol()) fail(0, "parameter constant is not a symbol");
  }

  std::vector<std::optional<Decoded>> at(d.code.size());
  for (std::size_t pc = 0; pc < d.code.size();) {
    auto ins = decode(d.code, pc);
    if (!ins) fail(pc, "malformed instruction");
    at[pc] = ins;
    pc += ins->size;
  }
  if (d.code.empty()) fail(0, "empty code");

  std::vector<long> depth_at(d.code.size(), -1);
  std::deque<std::pair<std::size_t, long>> work{{0, 0}};
  while (!work.empty()) {
    auto [pc, depth] = work.front();
    work.pop_front();
    for (;;) {
      if (pc >= d.code.size()) fail(pc, "execution falls off the end");
      if (!at[pc]) fail(pc, "jump into the middle of an instruction");
      if (depth_at[pc] >= 0) {
        if (depth_at[pc] != depth) fail(pc, "inconsistent stack depth");
        break;
      }
      depth_at[pc] = depth;
      const Decoded& ins = *at[pc];
      long need = 0;
      long effect = 0;
      switch (ins.op) {
        case Op::loadconst:
          if (ins.operand >= d.constants.size()) fail(pc, "constant index out of range");
          effect = 1;
          break;
        case Op::loadglobal:
        case Op::storeglobal:
          if (ins.operand >= d.constants.size()) fail(pc, "constant index out of range");
          if (!d.constants[ins.operand].is_symbol()) fail(pc, "global operand is not a symbol");
          need = ins.op == Op::storeglobal ? 1 : 0;
          effect = ins.op == Op::storeglobal ? 0 : 1;
          break;
        case Op::loadlocal:
        case Op::storelocal:
          if (ins.operand >= d.local_slots) fail(pc, "local slot out of range");
          need = ins.op == Op::storelocal ? 1 : 0;
          effect = ins.op == Op::storelocal ? 0 : 1;
          break;
        case Op::call:
          need = static_cast<long>(ins.operand) + 1;
          effect = -static_cast<long>(ins.operand);
          break;
        case Op::jump:
        case Op::ret:
          break;
        case Op::jumpnil:
        case Op::pop:
          need = 1;
          effect = -1;
          break;
        case Op::car:
        case Op::cdr:
          need = 1;
          break;
        default:  // binary operators
          need = 2;
          effect = -1;
          break;
      }
      if (depth < need) fail(pc, "stack underflow");
      if (ins.op == Op::ret) {
        if (depth != 1) fail(pc, "return with extra values on the stack");
        break;
      }
      depth += effect;
      if (is_jump(ins.op)) {
        if (ins.operand >= d.code.size() || !at[ins.operand]) fail(pc, "jump target off an instruction boundary");
        if (ins.op == Op::jump) {
          pc = ins.operand;
          continue;
        }
        work.emplace_back(ins.operand, depth);
      }
      pc += ins.size;
    }
  }
}

std::string disassemble(const Heap& heap, Value chunk) {
  const ChunkData d = read_chunk(heap, chunk);
  std::string out;
  for (std::size_t pc = 0; pc < d.code.size();) {
    auto ins = decode(d.code, pc);
    if (!ins) {
      out += hex4(pc) + " ??? " + std::to_string(d.code[pc]) + "\n";
      ++pc;
      continue;
    }
    std::string line = hex4(pc) + " " + std::string(op_name(ins->op));
    std::string comment;
    switch (ins->op) {
      case Op::loadconst:
      case Op::loadglobal:
      case Op::storeglobal:
        line += " " + std::to_string(ins->operand);
        if (ins->operand < d.constants.size()) {
          comment = print(heap, d.constants[ins->operand]);
          if (comment.size() > 40) comment = comment.substr(0, 37) + "...";
        }
        break;
      case Op::loadlocal:
      case Op::storelocal:
        line += " " + std::to_string(ins->operand);
        comment = ins->operand < d.arity ? print(heap, d.constants[ins->operand]) : "temp";
        break;
      case Op::call:
        line += " " + std::to_string(ins->operand);
        break;
      case Op::jump:
      case Op::jumpnil:
        line += " " + hex4(ins->operand);
        break;
      default:
        break;
    }
    if (!comment.empty()) line += " ; " + comment;
    out += line + "\n";
    pc += ins->size;
  }
  return out;
}

std::string disassemble_all(const Heap& heap, Value chunk) {
  std::string out;
  std::vector<Value> pending{chunk};
  std::unordered_set<std::uint64_t> seen;
  for (std::size_t i = 0; i < pending.size(); ++i) {
    Value c = pending[i];
    if (!seen.insert(c.word()).second) continue;
    const ChunkData d = read_chunk(heap, c);
    if (i) out += "\n";
    out += "== " + print(heap, c) + " arity " + std::to_string(d.arity) + " locals " +
           std::to_string(d.local_slots) + "\n";
    out += disassemble(heap, c);
    for (Value k : d.constants) {
      if (is_chunk(heap, k)) pending.push_back(k);
    }
  }
  return out;
}

}  // namespace pkrn
