#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "pkrn/symbols.hpp"
#include "pkrn/value.hpp"

namespace pkrn {

using Word = std::uint64_t;

struct HeapConfig {
  std::size_t initial_bytes = std::size_t{8} << 20;
  std::size_t cap_bytes = std::size_t{512} << 20;
  std::size_t shadow_stack_entries = std::size_t{1} << 18;
  // Monotonic nanosecond clock, injected by the host layer. Null means durations read 0.
  std::function<std::uint64_t()> clock;
};

struct CollectStats {
  std::size_t live_slots = 0;
  std::size_t reclaimed_slots = 0;
  std::uint64_t duration_ns = 0;
};

struct HeapCounters {
  std::uint64_t allocations = 0;
  std::uint64_t cons_allocations = 0;
  std::uint64_t collections = 0;
  std::uint64_t reclaimed_slots = 0;
};

struct RootTicket {
  std::uint64_t id = 0;
};

// Fixed-capacity stack of Values treated as collector roots. Its storage never
// moves, so spans into it stay valid while more values are pushed.
class ShadowStack {
 public:
  explicit ShadowStack(std::size_t capacity);

  std::size_t push(Value v);
  void truncate(std::size_t size) { size_ = size; }
  std::size_t size() const { return size_; }
  std::size_t capacity() const { return capacity_; }
  Value& operator[](std::size_t i) { return data_[i]; }
  Value operator[](std::size_t i) const { return data_[i]; }
  Value& top() { return data_[size_ - 1]; }
  std::span<const Value> last(std::size_t n) const { return {data_.get() + size_ - n, n}; }
  std::span<const Value> range(std::size_t from, std::size_t to) const {
    return {data_.get() + from, to - from};
  }

 private:
  std::unique_ptr<Value[]> data_;
  std::size_t size_ = 0;
  std::size_t capacity_;
};

// Pushes values on the shadow stack and pops them all when it goes out of scope.
class RootScope {
 public:
  explicit RootScope(ShadowStack& stack) : stack_(stack), mark_(stack.size()) {}
  ~RootScope() { stack_.truncate(mark_); }
  RootScope(const RootScope&) = delete;
  RootScope& operator=(const RootScope&) = delete;

  Value& push(Value v) { return stack_[stack_.push(v)]; }

 private:
  ShadowStack& stack_;
  std::size_t mark_;
};

class RootProvider {
 public:
  virtual ~RootProvider() = default;
  virtual void trace_roots(const std::function<void(Value)>& visit) const = 0;
};

// Payload layout of a CHUNK object, in words.
namespace chunk_layout {
inline constexpr std::size_t kShape = 0;  // arity | local_slots << 16 | nconsts << 32
inline constexpr std::size_t kCodeSize = 1;
inline constexpr std::size_t kName = 2;
inline constexpr std::size_t kConstants = 3;
}  // namespace chunk_layout

/// Managed storage for conses and header-carrying objects.
///
/// Conses live in a two-word cell space with no header. Everything else lives
/// in an object space where each object starts with a header word holding its
/// kind, a mark bit and its payload length. Collection is precise mark-sweep;
/// nothing moves, so handles are stable for the lifetime of the object.
class Heap {
 public:
  explicit Heap(HeapConfig config = {});
  Heap(const Heap&) = delete;
  Heap& operator=(const Heap&) = delete;

  SymbolTable& symbols() { return symbols_; }
  const SymbolTable& symbols() const { return symbols_; }
  Value intern(std::string_view name) { return symbols_.intern(name); }
  ShadowStack& stack() { return stack_; }

  // Conses.
  Value alloc_cons(Value car, Value cdr);
  Value car(Value cons) const { return Value::from_word(cons_[cons.index()]); }
  Value cdr(Value cons) const { return Value::from_word(cons_[cons.index() + 1]); }
  void set_car(Value cons, Value v) { cons_[cons.index()] = v.word(); }
  void set_cdr(Value cons, Value v) { cons_[cons.index() + 1] = v.word(); }

  // Header objects. The payload is zero-filled; `children` are rooted while
  // a collection triggered by this allocation runs.
  Value alloc_object(ObjectKind kind, std::size_t payload_words, std::span<const Value> children = {});
  ObjectKind kind(Value obj) const;
  bool is_kind(Value v, ObjectKind k) const { return v.is_heapobj() && kind(v) == k; }
  std::size_t payload_size(Value obj) const;
  Word payload(Value obj, std::size_t i) const { return objects_[obj.index() + 1 + i]; }
  void set_payload(Value obj, std::size_t i, Word w) { objects_[obj.index() + 1 + i] = w; }
  // Valid only until the next allocation.
  const std::uint8_t* payload_bytes(Value obj, std::size_t word_offset) const;
  std::uint8_t* payload_bytes(Value obj, std::size_t word_offset);

  Value make_string(std::string_view text);
  std::string string_value(Value str) const;
  Value make_vector(std::size_t n, Value fill = kNil);
  std::size_t vector_size(Value vec) const { return payload_size(vec); }
  Value vector_ref(Value vec, std::size_t i) const { return Value::from_word(payload(vec, i)); }
  void vector_set(Value vec, std::size_t i, Value v) { set_payload(vec, i, v.word()); }
  Value make_float(double d);
  double float_value(Value f) const;

  // Roots.
  RootTicket protect(Value v);
  void release(RootTicket ticket);
  void add_root_provider(const RootProvider* provider);
  void remove_root_provider(const RootProvider* provider);

  CollectStats collect();

  // Suppresses collection for its lifetime; the arena grows instead.
  class NoCollectScope {
   public:
    explicit NoCollectScope(Heap& heap) : heap_(heap) { ++heap_.inhibit_; }
    ~NoCollectScope() { --heap_.inhibit_; }
    NoCollectScope(const NoCollectScope&) = delete;
    NoCollectScope& operator=(const NoCollectScope&) = delete;

   private:
    Heap& heap_;
  };

  const HeapCounters& counters() const { return counters_; }
  std::size_t used_slots() const { return used_slots_; }
  std::size_t capacity_slots() const { return capacity_slots_; }
  std::size_t cap_slots() const { return cap_slots_; }

 private:
  void reserve_for(std::size_t slots, std::span<const Value> pending);
  void mark_from(Value v);
  void drain_mark_stack();
  std::size_t sweep_conses();
  std::size_t sweep_objects();
  static Word make_header(ObjectKind kind, std::size_t payload_words);

  SymbolTable symbols_;
  ShadowStack stack_;
  HeapConfig config_;

  std::vector<Word> cons_;
  std::vector<std::uint64_t> cons_marks_;
  std::size_t cons_free_ = SIZE_MAX;  // first free cell's slot index

  std::vector<Word> objects_;
  std::multimap<std::size_t, std::size_t> free_blocks_;  // total words -> header slot

  std::size_t used_slots_ = 0;
  std::size_t capacity_slots_;
  std::size_t cap_slots_;
  int inhibit_ = 0;

  std::unordered_map<std::uint64_t, Value> registry_;
  std::uint64_t next_ticket_ = 1;
  std::vector<const RootProvider*> providers_;
  std::vector<Value> pending_;
  std::vector<Value> mark_stack_;
  HeapCounters counters_;
};

}  // namespace pkrn
