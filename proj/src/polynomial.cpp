#include <map>

#include "pkrn/algebra.hpp"
#include "pkrn/errors.hpp"

namespace pkrn {

Rational::Rational(BigInt n) : num_(std::move(n)), den_(1) {}

Rational::Rational(BigInt n, BigInt d) {
  if (d.is_zero()) throw LispError(ErrorKind::division_by_zero, "division by zero");
  if (d.is_negative()) {
    n = -n;
    d = -d;
  }
  BigInt g = BigInt::gcd(n.abs(), d);
  if (!(g == BigInt(1))) {
    n = BigInt::divrem(n, g).first;
    d = BigInt::divrem(d, g).first;
  }
  num_ = std::move(n);
  den_ = std::move(d);
}

double Rational::to_double() const { return num_.to_double() / den_.to_double(); }

std::string Rational::to_string() const {
  return is_integer() ? num_.to_decimal() : num_.to_decimal() + "/" + den_.to_decimal();
}

Rational Rational::operator-() const {
  Rational r = *this;
  r.num_ = -r.num_;
  return r;
}

Rational operator+(const Rational& a, const Rational& b) {
  if (a.is_integer() && b.is_integer()) return Rational(a.num_ + b.num_);
  return Rational(a.num_ * b.den_ + b.num_ * a.den_, a.den_ * b.den_);
}

Rational operator-(const Rational& a, const Rational& b) { return a + (-b); }

Rational operator*(const Rational& a, const Rational& b) {
  if (a.is_integer() && b.is_integer()) return Rational(a.num_ * b.num_);
  return Rational(a.num_ * b.num_, a.den_ * b.den_);
}

Rational operator/(const Rational& a, const Rational& b) { return Rational(a.num_ * b.den_, a.den_ * b.num_); }

bool operator==(const StandardForm& a, const StandardForm& b) {
  if (a.terms.empty() || b.terms.empty()) return a.terms.empty() && b.terms.empty() && a.constant == b.constant;
  return a.var == b.var && a.terms == b.terms;
}

namespace {

StandardForm make_const(Rational r) {
  StandardForm f;
  f.constant = std::move(r);
  return f;
}

// Drops zero coefficients and collapses a lone constant term.
StandardForm normalize(std::uint64_t var, std::vector<Term> terms) {
  std::erase_if(terms, [](const Term& t) { return t.coeff.is_zero(); });
  if (terms.empty()) return StandardForm{};
  if (terms.size() == 1 && terms[0].exp == 0) return std::move(terms[0].coeff);
  StandardForm f;
  f.var = var;
  f.terms = std::move(terms);
  return f;
}

// Adds c, whose variables all come after p's main variable, to p.
StandardForm add_low(const StandardForm& p, const StandardForm& c) {
  std::vector<Term> terms = p.terms;
  if (!terms.empty() && terms.back().exp == 0) {
    terms.back().coeff = sf_add(terms.back().coeff, c);
  } else {
    terms.push_back(Term{0, c});
  }
  return normalize(p.var, std::move(terms));
}

// Multiplies every coefficient of p by c, whose variables come after p's.
StandardForm scale(const StandardForm& p, const StandardForm& c) {
  std::vector<Term> terms;
  terms.reserve(p.terms.size());
  for (const Term& t : p.terms) terms.push_back(Term{t.exp, sf_mul(t.coeff, c)});
  return normalize(p.var, std::move(terms));
}

// True when a's main variable comes strictly before b's (constants last).
bool leads(const StandardForm& a, const StandardForm& b) {
  return !a.is_constant() && (b.is_constant() || a.var < b.var);
}

BigInt mod_floor(const BigInt& a, const BigInt& m) {
  BigInt r = BigInt::divrem(a, m).second;
  if (r.is_negative()) r = r + m;
  return r;
}

BigInt mod_inverse(const BigInt& a, const BigInt& m) {
  BigInt r0 = m, r1 = mod_floor(a, m);
  BigInt t0 = 0, t1 = 1;
  while (!r1.is_zero()) {
    auto [q, r] = BigInt::divrem(r0, r1);
    r0 = std::move(r1);
    r1 = std::move(r);
    BigInt t = t0 - q * t1;
    t0 = std::move(t1);
    t1 = std::move(t);
  }
  if (!(r0 == BigInt(1))) {
    throw LispError(ErrorKind::algebra, "algebra error: " + a.to_decimal() + " has no inverse modulo " + m.to_decimal());
  }
  return mod_floor(t0, m);
}

void collect_monomials(const StandardForm& f, std::vector<std::pair<std::uint64_t, std::uint64_t>>& powers,
                       std::vector<std::pair<Rational, std::vector<std::pair<std::uint64_t, std::uint64_t>>>>& out) {
  if (f.is_constant()) {
    if (!f.constant.is_zero()) out.emplace_back(f.constant, powers);
    return;
  }
  for (const Term& t : f.terms) {
    if (t.exp > 0) powers.emplace_back(f.var, t.exp);
    collect_monomials(t.coeff, powers, out);
    if (t.exp > 0) powers.pop_back();
  }
}

}  // namespace

StandardForm StandardForm::variable(std::uint64_t var) {
  StandardForm f;
  f.var = var;
  f.terms.push_back(Term{1, make_const(Rational(1))});
  return f;
}

StandardForm sf_add(const StandardForm& a, const StandardForm& b) {
  if (a.is_constant() && b.is_constant()) return make_const(a.constant + b.constant);
  if (leads(a, b)) return add_low(a, b);
  if (leads(b, a)) return add_low(b, a);
  std::vector<Term> terms;
  std::size_t i = 0, j = 0;
  while (i < a.terms.size() || j < b.terms.size()) {
    if (j == b.terms.size() || (i < a.terms.size() && a.terms[i].exp > b.terms[j].exp)) {
      terms.push_back(a.terms[i++]);
    } else if (i == a.terms.size() || b.terms[j].exp > a.terms[i].exp) {
      terms.push_back(b.terms[j++]);
    } else {
      terms.push_back(Term{a.terms[i].exp, sf_add(a.terms[i].coeff, b.terms[j].coeff)});
      ++i;
      ++j;
    }
  }
  return normalize(a.var, std::move(terms));
}

StandardForm sf_neg(const StandardForm& a) {
  if (a.is_constant()) return make_const(-a.constant);
  std::vector<Term> terms;
  for (const Term& t : a.terms) terms.push_back(Term{t.exp, sf_neg(t.coeff)});
  return normalize(a.var, std::move(terms));
}

StandardForm sf_sub(const StandardForm& a, const StandardForm& b) { return sf_add(a, sf_neg(b)); }

StandardForm sf_mul(const StandardForm& a, const StandardForm& b) {
  if (a.is_constant() && b.is_constant()) return make_const(a.constant * b.constant);
  if (a.is_zero() || b.is_zero()) return StandardForm{};
  if (leads(a, b)) return scale(a, b);
  if (leads(b, a)) return scale(b, a);
  std::map<std::uint64_t, StandardForm, std::greater<>> acc;
  for (const Term& x : a.terms) {
    for (const Term& y : b.terms) {
      StandardForm p = sf_mul(x.coeff, y.coeff);
      auto [it, fresh] = acc.try_emplace(x.exp + y.exp, p);
      if (!fresh) it->second = sf_add(it->second, p);
    }
  }
  std::vector<Term> terms;
  for (auto& [e, c] : acc) terms.push_back(Term{e, std::move(c)});
  return normalize(a.var, std::move(terms));
}

StandardForm sf_pow(const StandardForm& a, std::uint64_t n) {
  StandardForm result = make_const(Rational(1));
  StandardForm base = a;
  while (n) {
    if (n & 1) result = sf_mul(result, base);
    n >>= 1;
    if (n) base = sf_mul(base, base);
  }
  return result;
}

namespace {

StandardForm df1(const StandardForm& a, std::uint64_t var) {
  if (a.is_constant() || a.var > var) return StandardForm{};
  std::vector<Term> terms;
  if (a.var == var) {
    for (const Term& t : a.terms) {
      if (t.exp > 0) {
        terms.push_back(Term{t.exp - 1, sf_mul(t.coeff, make_const(Rational(static_cast<std::int64_t>(t.exp))))});
      }
    }
  } else {
    for (const Term& t : a.terms) terms.push_back(Term{t.exp, df1(t.coeff, var)});
  }
  return normalize(a.var, std::move(terms));
}

}  // namespace

StandardForm sf_df(const StandardForm& a, std::uint64_t var, std::uint64_t n) {
  StandardForm r = a;
  for (std::uint64_t i = 0; i < n && !r.is_zero(); ++i) r = df1(r, var);
  return r;
}

StandardForm sf_subst(const StandardForm& a, std::uint64_t var, const StandardForm& value) {
  if (a.is_constant() || a.var > var) return a;
  if (a.var == var) {
    // Horner over the descending exponents.
    StandardForm acc;
    std::uint64_t prev = a.terms.front().exp;
    for (const Term& t : a.terms) {
      acc = sf_add(sf_mul(acc, sf_pow(value, prev - t.exp)), t.coeff);
      prev = t.exp;
    }
    return sf_mul(acc, sf_pow(value, prev));
  }
  StandardForm acc;
  const StandardForm x = StandardForm::variable(a.var);
  for (const Term& t : a.terms) acc = sf_add(acc, sf_mul(sf_subst(t.coeff, var, value), sf_pow(x, t.exp)));
  return acc;
}

StandardForm sf_reduce_mod(const StandardForm& a, const BigInt& m) {
  if (a.is_constant()) {
    BigInt n = mod_floor(a.constant.num(), m);
    if (!a.constant.is_integer()) n = mod_floor(n * mod_inverse(a.constant.den(), m), m);
    return make_const(Rational(std::move(n)));
  }
  std::vector<Term> terms;
  for (const Term& t : a.terms) terms.push_back(Term{t.exp, sf_reduce_mod(t.coeff, m)});
  return normalize(a.var, std::move(terms));
}

double sf_evaluate(const StandardForm& a, const std::function<double(std::uint64_t)>& env) {
  if (a.is_constant()) return a.constant.to_double();
  const double x = env(a.var);
  double acc = 0;
  std::uint64_t prev = a.terms.front().exp;
  for (const Term& t : a.terms) {
    for (std::uint64_t i = t.exp; i < prev; ++i) acc *= x;
    acc += sf_evaluate(t.coeff, env);
    prev = t.exp;
  }
  for (std::uint64_t i = 0; i < prev; ++i) acc *= x;
  return acc;
}

Rational sf_coefficient(const StandardForm& a, std::uint64_t exp) {
  if (a.is_constant()) return exp == 0 ? a.constant : Rational(0);
  for (const Term& t : a.terms) {
    if (t.exp == exp) {
      if (!t.coeff.is_constant()) throw LispError(ErrorKind::algebra, "algebra error: not univariate");
      return t.coeff.constant;
    }
  }
  return Rational(0);
}

std::string sf_render(const StandardForm& a, const std::function<std::string(std::uint64_t)>& name) {
  std::vector<std::pair<std::uint64_t, std::uint64_t>> powers;
  std::vector<std::pair<Rational, std::vector<std::pair<std::uint64_t, std::uint64_t>>>> monomials;
  collect_monomials(a, powers, monomials);
  if (monomials.empty()) return "0";
  std::string out;
  for (std::size_t i = 0; i < monomials.size(); ++i) {
    const auto& [c, vars] = monomials[i];
    if (i == 0) {
      if (c.is_negative()) out += "-";
    } else {
      out += c.is_negative() ? " - " : " + ";
    }
    const Rational mag = c.is_negative() ? -c : c;
    if (vars.empty()) {
      out += mag.to_string();
      continue;
    }
    if (!(mag == Rational(1))) out += mag.to_string() + "*";
    for (std::size_t k = 0; k < vars.size(); ++k) {
      if (k) out += "*";
      out += name(vars[k].first);
      if (vars[k].second != 1) out += "^" + std::to_string(vars[k].second);
    }
  }
  return out;
}

std::vector<StandardForm> legendre_demo(std::uint64_t x, unsigned k_max) {
  std::vector<StandardForm> out;
  const StandardForm base = sf_sub(sf_pow(StandardForm::variable(x), 2), make_const(Rational(1)));
  BigInt factorial = 1;
  for (unsigned k = 0; k <= k_max; ++k) {
    if (k) factorial = factorial * BigInt(k);
    const Rational scale_by(BigInt(1), BigInt::pow(BigInt(2), k) * factorial);
    out.push_back(sf_mul(sf_df(sf_pow(base, k), x, k), make_const(scale_by)));
  }
  return out;
}

}  // namespace pkrn
