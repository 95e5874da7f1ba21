#include "pkrn/errors.hpp"
#include "pkrn/numeric.hpp"
#include "pkrn/session.hpp"
#include "pkrn/sexpr.hpp"

namespace pkrn {

namespace {

using Args = std::span<const Value>;

Value check_list(Session& s, Value v) {
  if (!v.is_nil() && !v.is_cons()) s.wrong_type("list", v);
  return v;
}

Value check_cons(Session& s, Value v) {
  if (!v.is_cons()) s.wrong_type("pair", v);
  return v;
}

Value b_car(Session& s, Args a) {
  Value v = check_list(s, a[0]);
  return v.is_nil() ? kNil : s.heap().car(v);
}

Value b_cdr(Session& s, Args a) {
  Value v = check_list(s, a[0]);
  return v.is_nil() ? kNil : s.heap().cdr(v);
}

Value b_cons(Session& s, Args a) { return s.heap().alloc_cons(a[0], a[1]); }
Value b_atom(Session& s, Args a) { return s.boolean(!a[0].is_cons()); }
Value b_eq(Session& s, Args a) { return s.boolean(a[0] == a[1]); }
Value b_null(Session& s, Args a) { return s.boolean(a[0].is_nil()); }
Value b_numberp(Session& s, Args a) { return s.boolean(is_number(s.heap(), a[0])); }
Value b_equal(Session& s, Args a) { return s.boolean(equal(s.heap(), a[0], a[1])); }

Value b_eqn(Session& s, Args a) {
  Heap& h = s.heap();
  if (is_number(h, a[0]) && is_number(h, a[1])) return s.boolean(num_cmp(h, a[0], a[1]) == 0);
  return s.boolean(a[0] == a[1]);
}

// Left fold keeping the running value on the shadow stack.
template <Value (*Op)(Heap&, Value, Value)>
Value fold(Session& s, Value init, Args a) {
  RootScope roots(s.heap().stack());
  Value& acc = roots.push(init);
  for (Value v : a) acc = Op(s.heap(), acc, v);
  return acc;
}

Value b_plus(Session& s, Args a) {
  if (a.empty()) return Value::fixnum(0);
  return fold<num_add>(s, a[0], a.subspan(1));
}

Value b_times(Session& s, Args a) {
  if (a.empty()) return Value::fixnum(1);
  return fold<num_mul>(s, a[0], a.subspan(1));
}

Value b_difference(Session& s, Args a) {
  if (a.size() == 1) return num_negate(s.heap(), a[0]);
  return fold<num_sub>(s, a[0], a.subspan(1));
}

Value b_minus(Session& s, Args a) { return num_negate(s.heap(), a[0]); }
Value b_quotient(Session& s, Args a) { return num_quotient(s.heap(), a[0], a[1]); }
Value b_remainder(Session& s, Args a) { return num_remainder(s.heap(), a[0], a[1]); }
Value b_greaterp(Session& s, Args a) { return s.boolean(num_cmp(s.heap(), a[0], a[1]) > 0); }
Value b_lessp(Session& s, Args a) { return s.boolean(num_cmp(s.heap(), a[0], a[1]) < 0); }
Value b_geq(Session& s, Args a) { return s.boolean(num_cmp(s.heap(), a[0], a[1]) >= 0); }
Value b_leq(Session& s, Args a) { return s.boolean(num_cmp(s.heap(), a[0], a[1]) <= 0); }

Value b_get(Session& s, Args a) { return s.get(a[0], s.check_symbol(a[1])); }

Value b_put(Session& s, Args a) {
  s.put(a[0], s.check_symbol(a[1]), a[2]);
  return a[2];
}

Value b_flag(Session& s, Args a) {
  s.check_symbol(a[1]);
  for (Value l = check_list(s, a[0]); l.is_cons(); l = s.heap().cdr(l)) s.check_symbol(s.heap().car(l));
  for (Value l = a[0]; l.is_cons(); l = s.heap().cdr(l)) s.flag(s.heap().car(l), a[1]);
  return kNil;
}

Value b_flagp(Session& s, Args a) { return s.boolean(s.flagp(a[0], s.check_symbol(a[1]))); }

Value b_list(Session& s, Args a) { return s.list(a); }

Value b_reverse(Session& s, Args a) {
  RootScope roots(s.heap().stack());
  Value& acc = roots.push(kNil);
  for (Value l = check_list(s, a[0]); l.is_cons(); l = s.heap().cdr(l)) {
    acc = s.heap().alloc_cons(s.heap().car(l), acc);
  }
  return acc;
}

// Copies every list but the last, which is shared.
Value b_append(Session& s, Args a) {
  if (a.empty()) return kNil;
  Heap& h = s.heap();
  RootScope roots(h.stack());
  ShadowStack& st = h.stack();
  const std::size_t base = st.size();
  for (std::size_t i = 0; i + 1 < a.size(); ++i) {
    for (Value l = check_list(s, a[i]); l.is_cons(); l = h.cdr(l)) roots.push(h.car(l));
  }
  const std::size_t end = st.size();
  Value& acc = roots.push(a.back());
  for (std::size_t i = end; i-- > base;) acc = h.alloc_cons(st[i], acc);
  return acc;
}

Value b_length(Session& s, Args a) {
  std::int64_t n = 0;
  Value l = check_list(s, a[0]);
  for (; l.is_cons(); l = s.heap().cdr(l)) ++n;
  if (!l.is_nil()) s.wrong_type("list", a[0]);
  return Value::fixnum(n);
}

Value b_mapcar(Session& s, Args a) {
  Heap& h = s.heap();
  RootScope roots(h.stack());
  ShadowStack& st = h.stack();
  Value fn = a[0];
  const std::size_t base = st.size();
  for (Value l = check_list(s, a[1]); l.is_cons(); l = h.cdr(l)) {
    Value& item = roots.push(h.car(l));
    Value r = s.apply(fn, std::span<const Value>(&item, 1));
    item = r;
  }
  const std::size_t end = st.size();
  Value& acc = roots.push(kNil);
  for (std::size_t i = end; i-- > base;) acc = h.alloc_cons(st[i], acc);
  return acc;
}

// Applies the function to the list and each of its tails.
Value b_map(Session& s, Args a) {
  Heap& h = s.heap();
  RootScope roots(h.stack());
  for (Value l = check_list(s, a[1]); l.is_cons(); l = h.cdr(l)) {
    Value& tail = roots.push(l);
    s.apply(a[0], std::span<const Value>(&tail, 1));
  }
  return kNil;
}

Value b_print_value(Session& s, Args a) {
  s.write(s.print(a[0]));
  s.write("\n");
  return a[0];
}

Value b_read_value(Session& s, Args) {
  std::string& pending = s.pending_input();
  for (;;) {
    Reader reader(s.heap(), pending);
    try {
      if (auto v = reader.next()) {
        pending.erase(0, reader.position());
        return *v;
      }
    } catch (const ParseError& e) {
      if (!e.incomplete()) {
        pending.clear();
        throw LispError(ErrorKind::syntax, e.what());
      }
    }
    auto line = s.read_line();
    if (!line) {
      pending.clear();
      return s.intern("$eof$");
    }
    pending += *line;
    pending += '\n';
  }
}

Value b_error(Session& s, Args a) {
  std::string msg;
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (i) msg += ' ';
    msg += s.heap().is_kind(a[i], ObjectKind::string) ? s.heap().string_value(a[i]) : s.print(a[i]);
  }
  throw LispError(ErrorKind::user, msg.empty() ? "error" : msg);
}

Value b_rplaca(Session& s, Args a) {
  s.heap().set_car(check_cons(s, a[0]), a[1]);
  return a[0];
}

Value b_rplacd(Session& s, Args a) {
  s.heap().set_cdr(check_cons(s, a[0]), a[1]);
  return a[0];
}

}  // namespace

void install_core_builtins(Session& s) {
  s.define_builtin("car", b_car, 1, 1);
  s.define_builtin("cdr", b_cdr, 1, 1);
  s.define_builtin("cons", b_cons, 2, 2);
  s.define_builtin("atom", b_atom, 1, 1);
  s.define_builtin("eq", b_eq, 2, 2);
  s.define_builtin("null", b_null, 1, 1);
  s.define_builtin("not", b_null, 1, 1);
  s.define_builtin("numberp", b_numberp, 1, 1);
  s.define_builtin("plus", b_plus, 0, kVariadic);
  s.define_builtin("difference", b_difference, 1, kVariadic);
  s.define_builtin("times", b_times, 0, kVariadic);
  s.define_builtin("quotient", b_quotient, 2, 2);
  s.define_builtin("remainder", b_remainder, 2, 2);
  s.define_builtin("minus", b_minus, 1, 1);
  s.define_builtin("greaterp", b_greaterp, 2, 2);
  s.define_builtin("lessp", b_lessp, 2, 2);
  s.define_builtin("geq", b_geq, 2, 2);
  s.define_builtin("leq", b_leq, 2, 2);
  s.define_builtin("eqn", b_eqn, 2, 2);
  s.define_builtin("equal", b_equal, 2, 2);
  s.define_builtin("get", b_get, 2, 2);
  s.define_builtin("put", b_put, 3, 3);
  s.define_builtin("flag", b_flag, 2, 2);
  s.define_builtin("flagp", b_flagp, 2, 2);
  s.define_builtin("list", b_list, 0, kVariadic);
  s.define_builtin("reverse", b_reverse, 1, 1);
  s.define_builtin("append", b_append, 0, kVariadic);
  s.define_builtin("length", b_length, 1, 1);
  s.define_builtin("mapcar", b_mapcar, 2, 2);
  s.define_builtin("map", b_map, 2, 2);
  s.define_builtin("print-value", b_print_value, 1, 1);
  s.define_builtin("print", b_print_value, 1, 1);
  s.define_builtin("read-value", b_read_value, 0, 0);
  s.define_builtin("error", b_error, 0, kVariadic);
  s.define_builtin("rplaca", b_rplaca, 2, 2);
  s.define_builtin("rplacd", b_rplacd, 2, 2);
}

InstateReport instate_reference(Session& s, Value defs) {
  Heap& h = s.heap();
  RootScope roots(h.stack());
  roots.push(defs);
  InstateReport report;
  for (Value d = defs; d.is_cons(); d = h.cdr(d)) {
    Value entry = h.car(d);
    const auto bad = [&] { throw LispError(ErrorKind::syntax, "malformed reference definition: " + s.print(entry)); };
    if (!entry.is_cons() || !h.car(entry).is_symbol() || !h.cdr(entry).is_cons()) bad();
    Value fname = h.car(entry);
    Value lambda = h.car(h.cdr(entry));
    if (!lambda.is_cons() || h.car(lambda) != s.sym().lambda || !h.cdr(lambda).is_cons()) bad();
    if (s.flagp(fname, s.sym().native)) {
      (s.function(fname).is_unbound() ? report.skipped_undefined : report.skipped).push_back(s.name(fname));
      continue;
    }
    Value rest = h.cdr(lambda);
    s.define_function(fname, h.car(rest), h.cdr(rest));
    report.installed.push_back(s.name(fname));
  }
  return report;
}

}  // namespace pkrn
