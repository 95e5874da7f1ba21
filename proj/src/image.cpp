#include "pkrn/image.hpp"

#include <bit>
#include <cstring>
#include <string>
#include <unordered_map>

#include "pkrn/bigint.hpp"
#include "pkrn/bytecode.hpp"
#include "pkrn/errors.hpp"
#include "pkrn/numeric.hpp"

namespace pkrn {

namespace {

// Record tags. Frozen with the format version.
enum Record : std::uint8_t {
  kFixnum = 0,
  kList = 1,
  kSymbol = 2,
  kChar = 3,
  kUnbound = 4,
  kBuiltin = 5,
  kBigint = 6,
  kString = 7,
  kVector = 8,
  kFloat = 9,
  kChunk = 10,
  kBackref = 11,
};

constexpr std::uint8_t kMagic[4] = {'P', 'K', 'R', 'N'};

class Writer {
 public:
  explicit Writer(const Session& s) : s_(s), h_(s.heap()) {}

  std::vector<std::uint8_t> run() {
    out_.insert(out_.end(), std::begin(kMagic), std::end(kMagic));
    u32(kImageVersion);
    u32(s_.mode() == EvalMode::algebraic ? kImageAlgebraic : 0);
    const SymbolTable& table = h_.symbols();
    varint(table.size());
    for (std::size_t i = 0; i < table.size(); ++i) {
      const std::string& name = table.at(i).name;
      varint(name.size());
      out_.insert(out_.end(), name.begin(), name.end());
    }
    for (std::size_t i = 0; i < table.size(); ++i) {
      const Symbol& sym = table.at(i);
      for (Value cell : {sym.value, sym.function, sym.plist, sym.flags}) emit(cell);
    }
    return std::move(out_);
  }

 private:
  void u32(std::uint32_t v) {
    for (int i = 0; i < 4; ++i) out_.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
  }

  void u64(std::uint64_t v) {
    for (int i = 0; i < 8; ++i) out_.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
  }

  void varint(std::uint64_t v) {
    while (v >= 0x80) {
      out_.push_back(static_cast<std::uint8_t>(v | 0x80));
      v >>= 7;
    }
    out_.push_back(static_cast<std::uint8_t>(v));
  }

  // Returns true after writing a back-reference for an object already seen.
  bool shared(Value v) {
    auto it = ids_.find(v.word());
    if (it == ids_.end()) return false;
    out_.push_back(kBackref);
    varint(it->second);
    return true;
  }

  void remember(Value v) { ids_.emplace(v.word(), static_cast<std::uint32_t>(ids_.size())); }

  // Pre-order walk with an explicit stack so long lists and deep nesting do
  // not recurse.
  void emit(Value root) {
    work_.push_back(root);
    while (!work_.empty()) {
      Value v = work_.back();
      work_.pop_back();
      record(v);
    }
  }

  void push_reversed(const std::vector<Value>& children) { work_.insert(work_.end(), children.rbegin(), children.rend()); }

  void record(Value v) {
    switch (v.tag()) {
      case TypeTag::fixnum: {
        const std::int64_t i = v.fixnum_value();
        out_.push_back(kFixnum);
        varint((static_cast<std::uint64_t>(i) << 1) ^ static_cast<std::uint64_t>(i >> 63));
        return;
      }
      case TypeTag::symbol:
        out_.push_back(kSymbol);
        varint(v.index());
        return;
      case TypeTag::immediate:
        switch (v.immediate_kind()) {
          case ImmediateKind::character:
            out_.push_back(kChar);
            out_.push_back(static_cast<std::uint8_t>(v.immediate_payload()));
            return;
          case ImmediateKind::unbound:
            out_.push_back(kUnbound);
            return;
          case ImmediateKind::builtin:
            out_.push_back(kBuiltin);
            varint(s_.builtin(static_cast<std::uint32_t>(v.immediate_payload())).name.index());
            return;
          case ImmediateKind::free_cell:
            break;
        }
        throw ContractError("free cell reachable from the symbol table");
      case TypeTag::cons:
        list(v);
        return;
      case TypeTag::heapobj:
        object(v);
        return;
    }
    throw ContractError("invalid tag in image writer");
  }

  void list(Value v) {
    if (shared(v)) return;
    std::vector<Value> cars;
    Value cell = v;
    while (cell.is_cons() && !ids_.contains(cell.word())) {
      remember(cell);
      cars.push_back(h_.car(cell));
      cell = h_.cdr(cell);
    }
    out_.push_back(kList);
    varint(cars.size());
    work_.push_back(cell);
    push_reversed(cars);
  }

  void object(Value v) {
    if (shared(v)) return;
    remember(v);
    switch (h_.kind(v)) {
      case ObjectKind::string: {
        const std::string text = h_.string_value(v);
        out_.push_back(kString);
        varint(text.size());
        out_.insert(out_.end(), text.begin(), text.end());
        return;
      }
      case ObjectKind::vector: {
        const std::size_t n = h_.vector_size(v);
        out_.push_back(kVector);
        varint(n);
        std::vector<Value> items;
        for (std::size_t i = 0; i < n; ++i) items.push_back(h_.vector_ref(v, i));
        push_reversed(items);
        return;
      }
      case ObjectKind::bigint: {
        const BigInt b = to_bigint(h_, v);
        out_.push_back(kBigint);
        out_.push_back(b.is_negative() ? 1 : 0);
        varint(b.digits().size());
        for (std::uint32_t d : b.digits()) u32(d);
        return;
      }
      case ObjectKind::flonum:
        out_.push_back(kFloat);
        u64(std::bit_cast<std::uint64_t>(h_.float_value(v)));
        return;
      case ObjectKind::chunk: {
        const ChunkData d = read_chunk(h_, v);
        out_.push_back(kChunk);
        varint(d.arity);
        varint(d.local_slots);
        varint(d.constants.size());
        varint(d.code.size());
        out_.insert(out_.end(), d.code.begin(), d.code.end());
        std::vector<Value> children{d.name};
        children.insert(children.end(), d.constants.begin(), d.constants.end());
        push_reversed(children);
        return;
      }
      case ObjectKind::free_block:
        break;
    }
    throw ContractError("free block reachable from the symbol table");
  }

  const Session& s_;
  const Heap& h_;
  std::vector<std::uint8_t> out_;
  std::vector<Value> work_;
  std::unordered_map<std::uint64_t, std::uint32_t> ids_;
};

class Loader {
 public:
  Loader(Session& s, std::span<const std::uint8_t> in) : s_(s), h_(s.heap()), in_(in) {}

  void run() {
    Heap::NoCollectScope no_gc(h_);
    if (in_.size() < 4 || std::memcmp(in_.data(), kMagic, 4) != 0) fail("bad magic, not an image");
    pos_ = 4;
    const std::uint32_t version = u32();
    if (version != kImageVersion) {
      fail_at("unsupported image version " + std::to_string(version) + ", expected " +
                  std::to_string(kImageVersion),
              4);
    }
    const std::uint32_t flags = u32();
    if (flags & ~kImageAlgebraic) fail_at("unknown header flags", 8);
    s_.set_mode(flags & kImageAlgebraic ? EvalMode::algebraic : EvalMode::symbolic);

    const std::uint64_t count = varint();
    if (count > in_.size()) fail("symbol count exceeds image size");
    for (std::uint64_t i = 0; i < count; ++i) {
      const std::uint64_t len = varint();
      need(len);
      symbols_.push_back(s_.intern(std::string_view(reinterpret_cast<const char*>(in_.data() + pos_), len)));
      pos_ += len;
    }
    SymbolTable& table = h_.symbols();
    for (Value sym : symbols_) {
      Symbol& cell = table[sym];
      for (Value* slot : {&cell.value, &cell.function, &cell.plist, &cell.flags}) read_into(Target{Target::raw, slot, kNil, 0});
    }
    if (pos_ != in_.size()) fail("trailing bytes after image body");
    for (auto [chunk, offset] : chunks_) {
      try {
        verify(h_, chunk);
      } catch (const CompileError& e) {
        fail_at(std::string("invalid chunk: ") + e.what(), offset);
      }
    }
  }

 private:
  struct Target {
    enum Kind { raw, car, cdr, payload } kind;
    Value* slot;
    Value obj;
    std::size_t index;
  };

  [[noreturn]] void fail(const std::string& msg) const { throw ImageError(msg, pos_); }
  [[noreturn]] void fail_at(const std::string& msg, std::size_t offset) const { throw ImageError(msg, offset); }

  void need(std::uint64_t n) const {
    if (n > in_.size() - pos_) fail("truncated image");
  }

  std::uint8_t byte() {
    need(1);
    return in_[pos_++];
  }

  std::uint32_t u32() {
    need(4);
    std::uint32_t v = 0;
    for (int i = 0; i < 4; ++i) v |= std::uint32_t{in_[pos_++]} << (8 * i);
    return v;
  }

  std::uint64_t u64() {
    need(8);
    std::uint64_t v = 0;
    for (int i = 0; i < 8; ++i) v |= std::uint64_t{in_[pos_++]} << (8 * i);
    return v;
  }

  std::uint64_t varint() {
    std::uint64_t v = 0;
    for (int shift = 0;; shift += 7) {
      if (shift > 63) fail("overlong varint");
      const std::uint8_t b = byte();
      v |= std::uint64_t{b & 0x7fu} << shift;
      if (!(b & 0x80)) return v;
    }
  }

  Value symbol(std::uint64_t index) const {
    if (index >= symbols_.size()) fail("symbol index " + std::to_string(index) + " out of range");
    return symbols_[index];
  }

  void store(const Target& t, Value v) {
    switch (t.kind) {
      case Target::raw:
        *t.slot = v;
        return;
      case Target::car:
        h_.set_car(t.obj, v);
        return;
      case Target::cdr:
        h_.set_cdr(t.obj, v);
        return;
      case Target::payload:
        h_.set_payload(t.obj, t.index, v.word());
        return;
    }
  }

  void read_into(Target root) {
    work_.push_back(root);
    while (!work_.empty()) {
      const Target t = work_.back();
      work_.pop_back();
      store(t, record());
    }
  }

  // Children are queued so that the first one is read next.
  Value record() {
    const std::size_t start = pos_;
    const std::uint8_t tag = byte();
    switch (tag) {
      case kFixnum: {
        const std::uint64_t z = varint();
        const auto i = static_cast<std::int64_t>((z >> 1) ^ (~(z & 1) + 1));
        if (!fits_fixnum(i)) fail_at("fixnum out of range", start);
        return Value::fixnum(i);
      }
      case kSymbol:
        return symbol(varint());
      case kChar:
        return Value::character(byte());
      case kUnbound:
        return Value::unbound();
      case kBuiltin: {
        const std::string& name = s_.name(symbol(varint()));
        auto fn = s_.find_builtin(name);
        if (!fn) fail_at("missing builtin: " + name, start);
        return *fn;
      }
      case kList: {
        const std::uint64_t n = varint();
        if (n == 0 || n > in_.size() - pos_) fail_at("bad list length", start);
        std::vector<Value> cells(n);
        for (auto& c : cells) {
          c = h_.alloc_cons(kNil, kNil);
          objects_.push_back(c);
        }
        for (std::size_t i = 0; i + 1 < n; ++i) h_.set_cdr(cells[i], cells[i + 1]);
        work_.push_back(Target{Target::cdr, nullptr, cells.back(), 0});
        for (std::size_t i = n; i-- > 0;) work_.push_back(Target{Target::car, nullptr, cells[i], 0});
        return cells.front();
      }
      case kBackref: {
        const std::uint64_t id = varint();
        if (id >= objects_.size()) fail_at("dangling back-reference " + std::to_string(id), start);
        return objects_[id];
      }
      case kString: {
        const std::uint64_t len = varint();
        need(len);
        Value str = h_.make_string(std::string_view(reinterpret_cast<const char*>(in_.data() + pos_), len));
        pos_ += len;
        objects_.push_back(str);
        return str;
      }
      case kVector: {
        const std::uint64_t n = varint();
        if (n > in_.size() - pos_) fail_at("bad vector length", start);
        Value vec = h_.make_vector(n);
        objects_.push_back(vec);
        for (std::size_t i = n; i-- > 0;) work_.push_back(Target{Target::payload, nullptr, vec, i});
        return vec;
      }
      case kBigint: {
        const std::uint8_t negative = byte();
        if (negative > 1) fail_at("bad bignum sign", start);
        const std::uint64_t n = varint();
        need(n * 4);
        std::vector<std::uint32_t> digits(n);
        for (auto& d : digits) d = u32();
        Value big = make_integer(h_, BigInt::from_digits(negative ? -1 : 1, std::move(digits)));
        if (!big.is_heapobj()) fail_at("bignum in fixnum range", start);
        objects_.push_back(big);
        return big;
      }
      case kFloat: {
        Value f = h_.make_float(std::bit_cast<double>(u64()));
        objects_.push_back(f);
        return f;
      }
      case kChunk: {
        ChunkData d;
        const std::uint64_t arity = varint();
        const std::uint64_t locals = varint();
        const std::uint64_t nconsts = varint();
        const std::uint64_t size = varint();
        if (arity > 0xffff || locals > 0xffff || nconsts > in_.size() - pos_) fail_at("bad chunk shape", start);
        need(size);
        d.arity = static_cast<std::uint16_t>(arity);
        d.local_slots = static_cast<std::uint16_t>(locals);
        d.constants.assign(nconsts, kNil);
        d.code.assign(in_.begin() + static_cast<std::ptrdiff_t>(pos_), in_.begin() + static_cast<std::ptrdiff_t>(pos_ + size));
        pos_ += size;
        Value chunk = make_chunk(h_, d);
        objects_.push_back(chunk);
        chunks_.emplace_back(chunk, start);
        for (std::size_t i = nconsts; i-- > 0;) {
          work_.push_back(Target{Target::payload, nullptr, chunk, chunk_layout::kConstants + i});
        }
        work_.push_back(Target{Target::payload, nullptr, chunk, chunk_layout::kName});
        return chunk;
      }
      default:
        fail_at("unknown record tag " + std::to_string(tag), start);
    }
  }

  Session& s_;
  Heap& h_;
  std::span<const std::uint8_t> in_;
  std::size_t pos_ = 0;
  std::vector<Value> symbols_;
  std::vector<Value> objects_;
  std::vector<Target> work_;
  std::vector<std::pair<Value, std::size_t>> chunks_;
};

}  // namespace

std::vector<std::uint8_t> save_image(const Session& session) { return Writer(session).run(); }

std::unique_ptr<Session> load_image(std::span<const std::uint8_t> bytes, SessionConfig config) {
  auto session = std::make_unique<Session>(std::move(config));
  Loader(*session, bytes).run();
  return session;
}

}  // namespace pkrn
