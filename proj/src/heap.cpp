#include "pkrn/heap.hpp"

#include <algorithm>
#include <bit>
#include <cstring>

#include "pkrn/errors.hpp"

namespace pkrn {

namespace {

constexpr Word kMarkBit = Word{1} << 8;
constexpr Value kFreeCell = Value::immediate(ImmediateKind::free_cell, 0);

ObjectKind header_kind(Word h) { return static_cast<ObjectKind>(h & 0xff); }
std::size_t header_length(Word h) { return static_cast<std::size_t>(h >> 16); }

}  // namespace

ShadowStack::ShadowStack(std::size_t capacity)
    : data_(std::make_unique<Value[]>(capacity)), capacity_(capacity) {}

std::size_t ShadowStack::push(Value v) {
  if (size_ == capacity_) throw LispError(ErrorKind::stack_overflow, "stack overflow: shadow stack exhausted");
  data_[size_] = v;
  return size_++;
}

Heap::Heap(HeapConfig config)
    : stack_(config.shadow_stack_entries),
      config_(std::move(config)),
      capacity_slots_(std::max<std::size_t>(config_.initial_bytes / sizeof(Word), 1024)),
      cap_slots_(std::max(config_.cap_bytes / sizeof(Word), capacity_slots_)) {}

Word Heap::make_header(ObjectKind kind, std::size_t payload_words) {
  return static_cast<Word>(kind) | (static_cast<Word>(payload_words) << 16);
}

void Heap::reserve_for(std::size_t slots, std::span<const Value> pending) {
  const auto over_threshold = [&] { return (used_slots_ + slots) * 5 > capacity_slots_ * 4; };
  if (!over_threshold()) return;
  if (inhibit_ == 0) {
    pending_.assign(pending.begin(), pending.end());
    collect();
    pending_.clear();
    // Grow until the post-collection occupancy is at most one half, which keeps
    // a nearly-full live set from collecting on every allocation.
    while ((used_slots_ + slots) * 2 > capacity_slots_ && capacity_slots_ < cap_slots_) {
      capacity_slots_ = std::min(cap_slots_, capacity_slots_ * 2);
    }
  } else {
    while (over_threshold() && capacity_slots_ < cap_slots_) {
      capacity_slots_ = std::min(cap_slots_, capacity_slots_ * 2);
    }
  }
  if (used_slots_ + slots > capacity_slots_) {
    throw AllocationError("heap exhausted: " + std::to_string(used_slots_ + slots) +
                          " slots requested with a cap of " + std::to_string(cap_slots_));
  }
}

Value Heap::alloc_cons(Value car, Value cdr) {
  const Value args[2] = {car, cdr};
  reserve_for(2, args);
  std::size_t slot;
  if (cons_free_ != SIZE_MAX) {
    slot = cons_free_;
    Word next = cons_[slot + 1];
    cons_free_ = next == SIZE_MAX ? SIZE_MAX : static_cast<std::size_t>(next);
  } else {
    slot = cons_.size();
    cons_.resize(slot + 2);
    if ((slot / 2) / 64 >= cons_marks_.size()) cons_marks_.push_back(0);
  }
  cons_[slot] = car.word();
  cons_[slot + 1] = cdr.word();
  used_slots_ += 2;
  ++counters_.allocations;
  ++counters_.cons_allocations;
  return Value::handle(TypeTag::cons, slot);
}

Value Heap::alloc_object(ObjectKind kind, std::size_t payload_words, std::span<const Value> children) {
  const std::size_t total = payload_words + 1;
  reserve_for(total, children);
  std::size_t at;
  if (auto it = free_blocks_.lower_bound(total); it != free_blocks_.end()) {
    at = it->second;
    const std::size_t block = it->first;
    free_blocks_.erase(it);
    if (block > total) {
      const std::size_t rest = at + total;
      objects_[rest] = make_header(ObjectKind::free_block, block - total - 1);
      free_blocks_.emplace(block - total, rest);
    }
  } else {
    at = objects_.size();
    objects_.resize(at + total);
  }
  objects_[at] = make_header(kind, payload_words);
  std::fill_n(objects_.begin() + static_cast<std::ptrdiff_t>(at + 1), payload_words, Word{0});
  used_slots_ += total;
  ++counters_.allocations;
  return Value::handle(TypeTag::heapobj, at);
}

ObjectKind Heap::kind(Value obj) const { return header_kind(objects_[obj.index()]); }

std::size_t Heap::payload_size(Value obj) const { return header_length(objects_[obj.index()]); }

const std::uint8_t* Heap::payload_bytes(Value obj, std::size_t word_offset) const {
  return reinterpret_cast<const std::uint8_t*>(objects_.data() + obj.index() + 1 + word_offset);
}

std::uint8_t* Heap::payload_bytes(Value obj, std::size_t word_offset) {
  return reinterpret_cast<std::uint8_t*>(objects_.data() + obj.index() + 1 + word_offset);
}

Value Heap::make_string(std::string_view text) {
  Value s = alloc_object(ObjectKind::string, 1 + (text.size() + 7) / 8);
  set_payload(s, 0, text.size());
  if (!text.empty()) std::memcpy(payload_bytes(s, 1), text.data(), text.size());
  return s;
}

std::string Heap::string_value(Value str) const {
  const auto n = static_cast<std::size_t>(payload(str, 0));
  return std::string(reinterpret_cast<const char*>(payload_bytes(str, 1)), n);
}

Value Heap::make_vector(std::size_t n, Value fill) {
  const Value kids[1] = {fill};
  Value v = alloc_object(ObjectKind::vector, n, kids);
  for (std::size_t i = 0; i < n; ++i) set_payload(v, i, fill.word());
  return v;
}

Value Heap::make_float(double d) {
  Value f = alloc_object(ObjectKind::flonum, 1);
  set_payload(f, 0, std::bit_cast<Word>(d));
  return f;
}

double Heap::float_value(Value f) const { return std::bit_cast<double>(payload(f, 0)); }

RootTicket Heap::protect(Value v) {
  RootTicket t{next_ticket_++};
  registry_.emplace(t.id, v);
  return t;
}

void Heap::release(RootTicket ticket) {
  if (registry_.erase(ticket.id) == 0) {
    throw ContractError("root ticket " + std::to_string(ticket.id) + " released twice or never issued");
  }
}

void Heap::add_root_provider(const RootProvider* provider) { providers_.push_back(provider); }

void Heap::remove_root_provider(const RootProvider* provider) {
  std::erase(providers_, provider);
}

void Heap::mark_from(Value v) {
  if (v.is_cons()) {
    const std::size_t cell = v.index() / 2;
    std::uint64_t& bits = cons_marks_[cell / 64];
    const std::uint64_t bit = std::uint64_t{1} << (cell % 64);
    if (bits & bit) return;
    bits |= bit;
    mark_stack_.push_back(v);
  } else if (v.is_heapobj()) {
    Word& h = objects_[v.index()];
    if (h & kMarkBit) return;
    h |= kMarkBit;
    const ObjectKind k = header_kind(h);
    if (k == ObjectKind::vector || k == ObjectKind::chunk) mark_stack_.push_back(v);
  }
}

void Heap::drain_mark_stack() {
  while (!mark_stack_.empty()) {
    Value v = mark_stack_.back();
    mark_stack_.pop_back();
    if (v.is_cons()) {
      mark_from(car(v));
      mark_from(cdr(v));
      continue;
    }
    if (kind(v) == ObjectKind::vector) {
      const std::size_t n = payload_size(v);
      for (std::size_t i = 0; i < n; ++i) mark_from(Value::from_word(payload(v, i)));
    } else {  // chunk
      const std::size_t nconsts = static_cast<std::size_t>(payload(v, chunk_layout::kShape) >> 32);
      mark_from(Value::from_word(payload(v, chunk_layout::kName)));
      for (std::size_t i = 0; i < nconsts; ++i) {
        mark_from(Value::from_word(payload(v, chunk_layout::kConstants + i)));
      }
    }
  }
}

std::size_t Heap::sweep_conses() {
  std::size_t reclaimed = 0;
  cons_free_ = SIZE_MAX;
  const std::size_t cells = cons_.size() / 2;
  for (std::size_t cell = cells; cell-- > 0;) {
    std::uint64_t& bits = cons_marks_[cell / 64];
    const std::uint64_t bit = std::uint64_t{1} << (cell % 64);
    const std::size_t slot = cell * 2;
    if (bits & bit) {
      bits &= ~bit;
      continue;
    }
    if (cons_[slot] != kFreeCell.word()) {
      reclaimed += 2;
      cons_[slot] = kFreeCell.word();
    }
    cons_[slot + 1] = cons_free_ == SIZE_MAX ? SIZE_MAX : cons_free_;
    cons_free_ = slot;
  }
  return reclaimed;
}

std::size_t Heap::sweep_objects() {
  std::size_t reclaimed = 0;
  free_blocks_.clear();
  std::size_t i = 0;
  const std::size_t end = objects_.size();
  while (i < end) {
    Word& h = objects_[i];
    if ((h & kMarkBit) != 0) {
      h &= ~kMarkBit;
      i += header_length(h) + 1;
      continue;
    }
    // Coalesce a run of dead or free blocks.
    const std::size_t run_start = i;
    while (i < end && (objects_[i] & kMarkBit) == 0) {
      const Word hi = objects_[i];
      const std::size_t total = header_length(hi) + 1;
      if (header_kind(hi) != ObjectKind::free_block) reclaimed += total;
      i += total;
    }
    if (i == end) {
      objects_.resize(run_start);
      break;
    }
    objects_[run_start] = make_header(ObjectKind::free_block, i - run_start - 1);
    free_blocks_.emplace(i - run_start, run_start);
  }
  return reclaimed;
}

CollectStats Heap::collect() {
  const std::uint64_t t0 = config_.clock ? config_.clock() : 0;
  for (std::size_t i = 0; i < symbols_.size(); ++i) {
    const Symbol& s = symbols_.at(i);
    mark_from(s.value);
    mark_from(s.function);
    mark_from(s.plist);
    mark_from(s.flags);
  }
  for (std::size_t i = 0; i < stack_.size(); ++i) mark_from(stack_[i]);
  for (const auto& [id, v] : registry_) mark_from(v);
  for (Value v : pending_) mark_from(v);
  drain_mark_stack();
  for (const RootProvider* p : providers_) {
    p->trace_roots([this](Value v) { mark_from(v); });
    drain_mark_stack();
  }

  const std::size_t reclaimed = sweep_conses() + sweep_objects();
  used_slots_ -= reclaimed;
  ++counters_.collections;
  counters_.reclaimed_slots += reclaimed;

  CollectStats stats;
  stats.live_slots = used_slots_;
  stats.reclaimed_slots = reclaimed;
  stats.duration_ns = config_.clock ? config_.clock() - t0 : 0;
  return stats;
}

}  // namespace pkrn
