#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "pkrn/heap.hpp"

namespace pkrn {

class Session;

// Opcode numbering is part of the image format.
enum class Op : std::uint8_t {
  loadconst = 0,
  loadlocal = 1,
  storelocal = 2,
  loadglobal = 3,
  storeglobal = 4,
  call = 5,
  jump = 6,
  jumpnil = 7,
  ret = 8,
  cons = 9,
  car = 10,
  cdr = 11,
  add = 12,
  sub = 13,
  mul = 14,
  div = 15,
  rem = 16,
  eq = 17,
  pop = 18,
};

inline constexpr std::size_t kOpCount = 19;

// Prefix that widens the following instruction's index operand to two bytes.
inline constexpr std::uint8_t kExtPrefix = 0xFF;

std::string_view op_name(Op op);

/// Decoded form of a CHUNK heap object.
///
/// Local slots below `arity` are the parameters, which are the symbols
/// constants[0..arity) bound dynamically for the call. Slots from `arity` to
/// `local_slots` are anonymous temporaries.
struct ChunkData {
  std::uint16_t arity = 0;
  std::uint16_t local_slots = 0;
  Value name;
  std::vector<Value> constants;
  std::vector<std::uint8_t> code;
};

Value make_chunk(Heap& heap, const ChunkData& data);
ChunkData read_chunk(const Heap& heap, Value chunk);
bool is_chunk(const Heap& heap, Value v);

// Compiles a top-level form into an arity-0 chunk. Throws CompileError for
// forms the compiler does not handle; the caller falls back to the evaluator.
Value compile(Session& session, Value form);
// Compiles `(lambda params . body)` for the function `name`.
Value compile_function(Session& session, Value name, Value params, Value body);

// Throws CompileError describing the first defect: operands out of range,
// jumps off instruction boundaries, or inconsistent stack depth.
void verify(const Heap& heap, Value chunk);

// One instruction per line: "offset OPCODE operands ; comment".
std::string disassemble(const Heap& heap, Value chunk);
// Disassembles `chunk` followed by every chunk in its constant pool.
std::string disassemble_all(const Heap& heap, Value chunk);

/// Stack machine executing chunks. The operand stack is the heap's shadow
/// stack, so every intermediate value is a collector root.
class Vm {
 public:
  explicit Vm(Session& session);

  // A top-level chunk does not count toward the session's depth limit.
  Value execute(Value chunk, std::span<const Value> args, bool toplevel = false);

 private:
  Value run(Value chunk, std::size_t arity, std::size_t local_slots, std::size_t nconsts);
  Value inline_op(Op op, Value a, Value b);

  Session& session_;
  Value fast_[kOpCount] = {};  // function cell each inline opcode assumes
  Value op_symbol_[kOpCount] = {};
};

}  // namespace pkrn
