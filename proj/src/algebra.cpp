#include "pkrn/algebra.hpp"

#include "pkrn/errors.hpp"
#include "pkrn/numeric.hpp"
#include "pkrn/session.hpp"
#include "pkrn/sexpr.hpp"

namespace pkrn {

namespace {

using Args = std::span<const Value>;

constexpr const char* kReferenceModular = R"(
((modreduce (lambda (a)
   (cond ((null *modulus*) (error "no modulus set"))
         ((lessp (remainder a *modulus*) 0) (plus (remainder a *modulus*) *modulus*))
         (t (remainder a *modulus*)))))
 (modplus (lambda (a b) (modreduce (plus a b))))
 (moddifference (lambda (a b) (modreduce (difference a b))))
 (modtimes (lambda (a b) (modreduce (times a b)))))
)";

StandardForm constant_sf(Rational r) {
  StandardForm f;
  f.constant = std::move(r);
  return f;
}

[[noreturn]] void algebra_error(const std::string& msg) { throw LispError(ErrorKind::algebra, "algebra error: " + msg); }

bool is_kernel(Session& s, Value v) { return v.is_symbol() && !v.is_nil() && v != s.sym().t; }

std::string var_name(Session& s, std::uint64_t var) { return s.name(SymbolTable::by_index(var)); }

StandardForm to_sf(Session& s, Value v, bool kernels) {
  auto f = sf_from_value(s, v, kernels);
  if (!f) s.wrong_type("algebraic value", v);
  return std::move(*f);
}

// Current modulus, or nullopt when none is set.
std::optional<BigInt> modulus(Session& s) {
  Value m = s.value(s.sym().modulus);
  if (m.is_nil() || m.is_unbound()) return std::nullopt;
  if (!is_integer(s.heap(), m) || big_cmp(s.heap(), m, Value::fixnum(0)) <= 0) {
    throw LispError(ErrorKind::algebra, "algebra error: invalid modulus " + s.print(m));
  }
  return to_bigint(s.heap(), m);
}

Value finish(Session& s, StandardForm f) {
  if (auto m = modulus(s)) f = sf_reduce_mod(f, *m);
  return sf_to_value(s, f);
}

bool all_numbers(Session& s, Args a) {
  for (Value v : a) {
    if (!is_number(s.heap(), v)) return false;
  }
  return true;
}

bool kernels(Session& s) { return s.mode() == EvalMode::algebraic; }

Value g_plus(Session& s, Args a) {
  if (all_numbers(s, a)) {
    RootScope roots(s.heap().stack());
    Value& acc = roots.push(Value::fixnum(0));
    if (!a.empty()) acc = a[0];
    for (std::size_t i = 1; i < a.size(); ++i) acc = num_add(s.heap(), acc, a[i]);
    return acc;
  }
  StandardForm acc;
  for (Value v : a) acc = sf_add(acc, to_sf(s, v, kernels(s)));
  return finish(s, std::move(acc));
}

Value g_times(Session& s, Args a) {
  if (all_numbers(s, a)) {
    RootScope roots(s.heap().stack());
    Value& acc = roots.push(Value::fixnum(1));
    if (!a.empty()) acc = a[0];
    for (std::size_t i = 1; i < a.size(); ++i) acc = num_mul(s.heap(), acc, a[i]);
    return acc;
  }
  StandardForm acc = constant_sf(Rational(1));
  for (Value v : a) acc = sf_mul(acc, to_sf(s, v, kernels(s)));
  return finish(s, std::move(acc));
}

Value g_difference(Session& s, Args a) {
  if (all_numbers(s, a)) {
    if (a.size() == 1) return num_negate(s.heap(), a[0]);
    RootScope roots(s.heap().stack());
    Value& acc = roots.push(a[0]);
    for (std::size_t i = 1; i < a.size(); ++i) acc = num_sub(s.heap(), acc, a[i]);
    return acc;
  }
  StandardForm acc = to_sf(s, a[0], kernels(s));
  if (a.size() == 1) return finish(s, sf_neg(acc));
  for (std::size_t i = 1; i < a.size(); ++i) acc = sf_sub(acc, to_sf(s, a[i], kernels(s)));
  return finish(s, std::move(acc));
}

Value g_minus(Session& s, Args a) {
  if (is_number(s.heap(), a[0])) return num_negate(s.heap(), a[0]);
  return finish(s, sf_neg(to_sf(s, a[0], kernels(s))));
}

StandardForm divide(const StandardForm& num, const StandardForm& den) {
  if (!den.is_constant()) algebra_error("division by a non-constant polynomial");
  if (den.constant.is_zero()) throw LispError(ErrorKind::division_by_zero, "division by zero");
  return sf_mul(num, constant_sf(Rational(1) / den.constant));
}

// Integer by integer truncates like remainder; anything involving a
// rational or polynomial divides exactly.
Value g_quotient(Session& s, Args a) {
  if (all_numbers(s, a)) return num_quotient(s.heap(), a[0], a[1]);
  return finish(s, divide(to_sf(s, a[0], kernels(s)), to_sf(s, a[1], kernels(s))));
}

std::uint64_t exponent(Session& s, Value n) {
  if (!is_integer(s.heap(), n)) s.wrong_type("integer", n);
  if (!n.is_fixnum()) algebra_error("exponent too large: " + s.print(n));
  if (n.fixnum_value() < 0) algebra_error("negative exponent " + s.print(n));
  return static_cast<std::uint64_t>(n.fixnum_value());
}

Value g_expt(Session& s, Args a) {
  Heap& h = s.heap();
  const std::uint64_t n = exponent(s, a[1]);
  if (is_integer(h, a[0])) return make_integer(h, BigInt::pow(to_bigint(h, a[0]), n));
  if (is_float(h, a[0])) {
    double r = 1;
    for (std::uint64_t i = 0; i < n; ++i) r *= h.float_value(a[0]);
    return h.make_float(r);
  }
  return finish(s, sf_pow(to_sf(s, a[0], kernels(s)), n));
}

std::uint64_t variable_of(Session& s, Value v) {
  if (!is_kernel(s, v)) s.wrong_type("variable", v);
  return v.index();
}

// (df f x [n] y [m] ...)
Value g_df(Session& s, Args a) {
  StandardForm f = to_sf(s, a[0], true);
  for (std::size_t i = 1; i < a.size();) {
    const std::uint64_t var = variable_of(s, a[i++]);
    std::uint64_t n = 1;
    if (i < a.size() && is_integer(s.heap(), a[i])) n = exponent(s, a[i++]);
    f = sf_df(f, var, n);
  }
  return finish(s, std::move(f));
}

// (sub f x value)
Value g_sub(Session& s, Args a) {
  return finish(s, sf_subst(to_sf(s, a[0], true), variable_of(s, a[1]), to_sf(s, a[2], true)));
}

Value g_simp(Session& s, Args a) { return finish(s, simp(s, a[0])); }

Value g_write(Session& s, Args a) {
  std::string line;
  for (Value v : a) line += render_value(s, v);
  line += '\n';
  s.write(line);
  return kNil;
}

Value g_setmod(Session& s, Args a) {
  Value old = s.value(s.sym().modulus);
  if (!a[0].is_nil() && (!is_integer(s.heap(), a[0]) || big_cmp(s.heap(), a[0], Value::fixnum(0)) <= 0)) {
    s.wrong_type("positive integer or nil", a[0]);
  }
  s.set_value(s.sym().modulus, a[0]);
  return old.is_unbound() ? kNil : old;
}

BigInt require_modulus(Session& s) {
  auto m = modulus(s);
  if (!m) throw LispError(ErrorKind::user, "no modulus set");
  return *m;
}

Value mod_result(Session& s, Value v) {
  Heap& h = s.heap();
  const BigInt m = require_modulus(s);
  if (v.is_fixnum()) {
    if (auto small = m.to_int64()) {
      std::int64_t r = v.fixnum_value() % *small;
      if (r < 0) r += *small;
      return Value::fixnum(r);
    }
  }
  BigInt r = BigInt::divrem(to_bigint(h, v), m).second;
  if (r.is_negative()) r = r + m;
  return make_integer(h, r);
}

Value n_modreduce(Session& s, Args a) {
  if (!is_integer(s.heap(), a[0])) s.wrong_type("integer", a[0]);
  return mod_result(s, a[0]);
}

template <Value (*Op)(Heap&, Value, Value)>
Value n_modop(Session& s, Args a) {
  require_modulus(s);
  for (Value v : a) {
    if (!is_integer(s.heap(), v)) s.wrong_type("integer", v);
  }
  RootScope roots(s.heap().stack());
  Value r = roots.push(Op(s.heap(), a[0], a[1]));
  return mod_result(s, r);
}

StandardForm simp_fold(Session& s, Value args, StandardForm init,
                       StandardForm (*op)(const StandardForm&, const StandardForm&)) {
  for (Value a = args; a.is_cons(); a = s.heap().cdr(a)) init = op(init, simp(s, s.heap().car(a)));
  return init;
}

}  // namespace

Value sf_to_value(Session& s, const StandardForm& a) {
  Heap& h = s.heap();
  if (a.is_constant()) {
    if (a.constant.is_integer()) return make_integer(h, a.constant.num());
    RootScope roots(h.stack());
    Value n = roots.push(make_integer(h, a.constant.num()));
    Value d = roots.push(make_integer(h, a.constant.den()));
    Value pair = roots.push(h.alloc_cons(n, d));
    return h.alloc_cons(s.intern(":rn"), pair);
  }
  RootScope roots(h.stack());
  Value& acc = roots.push(kNil);
  for (std::size_t i = a.terms.size(); i-- > 0;) {
    Value& c = roots.push(sf_to_value(s, a.terms[i].coeff));
    c = h.alloc_cons(make_integer(h, static_cast<std::int64_t>(a.terms[i].exp)), c);
    acc = h.alloc_cons(c, acc);
  }
  acc = h.alloc_cons(SymbolTable::by_index(a.var), acc);
  return h.alloc_cons(s.intern(":sf"), acc);
}

std::optional<StandardForm> sf_from_value(Session& s, Value v, bool symbols_are_kernels) {
  Heap& h = s.heap();
  if (is_integer(h, v)) return constant_sf(Rational(to_bigint(h, v)));
  if (v.is_symbol()) {
    if (symbols_are_kernels && is_kernel(s, v)) return StandardForm::variable(v.index());
    return std::nullopt;
  }
  if (!v.is_cons()) return std::nullopt;
  Value head = h.car(v);
  Value rest = h.cdr(v);
  const auto malformed = [&]() -> StandardForm { algebra_error("malformed algebraic value " + s.print(v)); };
  if (head == s.intern(":rn")) {
    if (!rest.is_cons() || !is_integer(h, h.car(rest)) || !is_integer(h, h.cdr(rest))) return malformed();
    return constant_sf(Rational(to_bigint(h, h.car(rest)), to_bigint(h, h.cdr(rest))));
  }
  if (head == s.intern(":sf")) {
    if (!rest.is_cons() || !is_kernel(s, h.car(rest))) return malformed();
    const StandardForm x = StandardForm::variable(h.car(rest).index());
    StandardForm acc;
    for (Value t = h.cdr(rest); !t.is_nil(); t = h.cdr(t)) {
      if (!t.is_cons() || !h.car(t).is_cons()) return malformed();
      Value term = h.car(t);
      Value e = h.car(term);
      if (!e.is_fixnum() || e.fixnum_value() < 0) return malformed();
      auto c = sf_from_value(s, h.cdr(term), false);
      if (!c) return malformed();
      acc = sf_add(acc, sf_mul(*c, sf_pow(x, static_cast<std::uint64_t>(e.fixnum_value()))));
    }
    return acc;
  }
  return std::nullopt;
}

StandardForm simp(Session& s, Value form) {
  Heap& h = s.heap();
  if (auto f = sf_from_value(s, form, true)) return std::move(*f);
  if (!form.is_cons() || !h.car(form).is_symbol()) algebra_error("cannot simplify " + s.print(form));
  const std::string& op = s.name(h.car(form));
  Value args = h.cdr(form);
  std::size_t n = 0;
  for (Value a = args; a.is_cons(); a = h.cdr(a)) ++n;
  const auto arg = [&](std::size_t i) {
    Value a = args;
    while (i--) a = h.cdr(a);
    return h.car(a);
  };
  if (op == "plus") return simp_fold(s, args, StandardForm{}, sf_add);
  if (op == "times") return simp_fold(s, args, constant_sf(Rational(1)), sf_mul);
  if (op == "minus" && n == 1) return sf_neg(simp(s, arg(0)));
  if (op == "difference" && n == 1) return sf_neg(simp(s, arg(0)));
  if (op == "difference" && n >= 2) return simp_fold(s, h.cdr(args), simp(s, arg(0)), sf_sub);
  if (op == "quotient" && n == 2) return divide(simp(s, arg(0)), simp(s, arg(1)));
  if (op == "expt" && n == 2) {
    const StandardForm e = simp(s, arg(1));
    if (!e.is_constant() || !e.constant.is_integer() || e.constant.is_negative() ||
        !e.constant.num().to_int64()) {
      algebra_error("non-polynomial exponent in " + s.print(form));
    }
    return sf_pow(simp(s, arg(0)), static_cast<std::uint64_t>(*e.constant.num().to_int64()));
  }
  algebra_error("cannot simplify " + s.print(form));
}

std::string render_value(Session& s, Value v) {
  if (s.heap().is_kind(v, ObjectKind::string)) return s.heap().string_value(v);
  if (auto f = sf_from_value(s, v, false)) {
    return sf_render(*f, [&](std::uint64_t var) { return var_name(s, var); });
  }
  return s.print(v);
}

Value modular_reference_defs(Session& s) { return read(s.heap(), kReferenceModular).value; }

void install_native_modular(Session& s) {
  s.define_builtin("modreduce", n_modreduce, 1, 1);
  s.define_builtin("modplus", n_modop<num_add>, 2, 2);
  s.define_builtin("moddifference", n_modop<num_sub>, 2, 2);
  s.define_builtin("modtimes", n_modop<num_mul>, 2, 2);
}

void install_algebra(Session& s) {
  s.set_value(s.sym().modulus, kNil);
  s.define_builtin("plus", g_plus, 0, kVariadic);
  s.define_builtin("times", g_times, 0, kVariadic);
  s.define_builtin("difference", g_difference, 1, kVariadic);
  s.define_builtin("minus", g_minus, 1, 1);
  s.define_builtin("quotient", g_quotient, 2, 2);
  s.define_builtin("expt", g_expt, 2, 2);
  s.define_builtin("df", g_df, 1, kVariadic);
  s.define_builtin("sub", g_sub, 3, 3);
  s.define_builtin("simp", g_simp, 1, 1);
  s.define_builtin("write", g_write, 0, kVariadic);
  s.define_builtin("setmod", g_setmod, 1, 1);
  if (s.config().native_modular) {
    install_native_modular(s);
    for (const char* name : kModularNames) s.flag(s.intern(name), s.sym().native);
  }
  RootScope roots(s.heap().stack());
  instate_reference(s, roots.push(modular_reference_defs(s)));
}

}  // namespace pkrn
