#pragma once

#include <cstdint>

namespace pkrn {

// Low three bits of every word. The numbering is part of the image format.
enum class TypeTag : std::uint8_t {
  fixnum = 0,
  cons = 1,
  symbol = 2,
  immediate = 3,
  heapobj = 4,
};

// Discriminates IMMEDIATE words (bits 3..7).
enum class ImmediateKind : std::uint8_t {
  character = 0,
  unbound = 1,
  builtin = 2,
  free_cell = 3,  // marks a cons cell sitting on the free list
};

// Header subtype of HEAPOBJ storage.
enum class ObjectKind : std::uint8_t {
  free_block = 0,
  string = 1,
  vector = 2,
  bigint = 3,
  flonum = 4,
  chunk = 5,
};

inline constexpr std::int64_t kFixnumMin = -(std::int64_t{1} << 60);
inline constexpr std::int64_t kFixnumMax = (std::int64_t{1} << 60) - 1;

constexpr bool fits_fixnum(std::int64_t i) { return i >= kFixnumMin && i <= kFixnumMax; }

/// One tagged machine word.
///
/// Fixnums keep a signed 61-bit integer in the upper bits. CONS and HEAPOBJ
/// words carry the byte offset of the object inside its space, which is always
/// a multiple of 8. SYMBOL words carry the symbol-table index.
class Value {
 public:
  constexpr Value() = default;  // NIL

  static constexpr Value from_word(std::uint64_t w) {
    Value v;
    v.word_ = w;
    return v;
  }

  // Precondition: fits_fixnum(i). Use make_integer() when promotion may be needed.
  static constexpr Value fixnum(std::int64_t i) {
    return from_word(static_cast<std::uint64_t>(i) << 3);
  }

  static constexpr Value handle(TypeTag tag, std::uint64_t slot_index) {
    return from_word((slot_index << 3) | static_cast<std::uint64_t>(tag));
  }

  static constexpr Value immediate(ImmediateKind kind, std::uint64_t payload) {
    return from_word((payload << 8) | (static_cast<std::uint64_t>(kind) << 3) |
                     static_cast<std::uint64_t>(TypeTag::immediate));
  }

  static constexpr Value character(unsigned char c) { return immediate(ImmediateKind::character, c); }
  static constexpr Value unbound() { return immediate(ImmediateKind::unbound, 0); }
  static constexpr Value builtin(std::uint32_t index) { return immediate(ImmediateKind::builtin, index); }

  constexpr std::uint64_t word() const { return word_; }
  constexpr TypeTag tag() const { return static_cast<TypeTag>(word_ & 7); }

  constexpr bool is_fixnum() const { return tag() == TypeTag::fixnum; }
  constexpr bool is_cons() const { return tag() == TypeTag::cons; }
  constexpr bool is_symbol() const { return tag() == TypeTag::symbol; }
  constexpr bool is_immediate() const { return tag() == TypeTag::immediate; }
  constexpr bool is_heapobj() const { return tag() == TypeTag::heapobj; }
  constexpr bool is_nil() const { return word_ == kNilWord; }
  constexpr bool is_unbound() const { return word_ == unbound().word_; }
  constexpr bool is_builtin() const {
    return is_immediate() && immediate_kind() == ImmediateKind::builtin;
  }

  constexpr std::int64_t fixnum_value() const { return static_cast<std::int64_t>(word_) >> 3; }
  // Slot index for CONS/HEAPOBJ, table index for SYMBOL.
  constexpr std::uint64_t index() const { return word_ >> 3; }
  constexpr ImmediateKind immediate_kind() const {
    return static_cast<ImmediateKind>((word_ >> 3) & 0x1f);
  }
  constexpr std::uint64_t immediate_payload() const { return word_ >> 8; }

  friend constexpr bool operator==(Value a, Value b) { return a.word_ == b.word_; }

 private:
  static constexpr std::uint64_t kNilWord = static_cast<std::uint64_t>(TypeTag::symbol);
  std::uint64_t word_ = kNilWord;
};

inline constexpr Value kNil{};

constexpr TypeTag tag_of(Value v) { return v.tag(); }

}  // namespace pkrn
