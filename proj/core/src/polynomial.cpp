#include "dlimp/polynomial.hpp"

#include <sstream>

#include "dlimp/errors.hpp"
#include "dlimp/printer.hpp"

namespace dlimp {

void Poly::add_term(const Monomial& m, const Rational& c) {
  if (c.is_zero()) return;
  auto it = terms_.find(m);
  if (it == terms_.end()) {
    terms_.emplace(m, c);
    return;
  }
  it->second = it->second + c;
  if (it->second.is_zero()) terms_.erase(it);
}

Poly Poly::constant(Rational value) {
  Poly p;
  p.add_term({}, value);
  return p;
}

Poly Poly::atom(Term atom) {
  Poly p;
  Monomial m;
  m.emplace(std::move(atom), 1);
  p.add_term(m, Rational(1));
  return p;
}

Poly Poly::operator+(const Poly& o) const {
  Poly r = *this;
  for (const auto& [m, c] : o.terms_) r.add_term(m, c);
  return r;
}

Poly Poly::operator-(const Poly& o) const {
  Poly r = *this;
  for (const auto& [m, c] : o.terms_) r.add_term(m, -c);
  return r;
}

Poly Poly::negated() const {
  Poly r;
  for (const auto& [m, c] : terms_) r.add_term(m, -c);
  return r;
}

Poly Poly::operator*(const Poly& o) const {
  Poly r;
  for (const auto& [ma, ca] : terms_) {
    for (const auto& [mb, cb] : o.terms_) {
      Monomial m = ma;
      for (const auto& [atom, power] : mb) {
        m[atom] += power;
      }
      r.add_term(m, ca * cb);
    }
  }
  return r;
}

bool Poly::is_constant() const {
  return terms_.empty() || (terms_.size() == 1 && terms_.begin()->first.empty());
}

Rational Poly::constant_value() const {
  if (terms_.empty()) return Rational(0);
  return terms_.begin()->second;
}

namespace {

bool monomial_mentions(const Poly::Monomial& m, const std::set<Identifier>& vars) {
  for (const auto& [atom, power] : m) {
    for (const Identifier& v : free_variables(atom)) {
      if (vars.count(v)) return true;
    }
  }
  return false;
}

int monomial_degree(const Poly::Monomial& m, const std::set<Identifier>& vars) {
  int degree = 0;
  for (const auto& [atom, power] : m) {
    bool mentions = false;
    for (const Identifier& v : free_variables(atom)) {
      if (vars.count(v)) mentions = true;
    }
    if (mentions) degree += power;
  }
  return degree;
}

}  // namespace

int Poly::degree_in(const std::set<Identifier>& vars) const {
  int degree = 0;
  for (const auto& [m, c] : terms_) {
    degree = std::max(degree, monomial_degree(m, vars));
  }
  return degree;
}

bool Poly::independent_of(const std::set<Identifier>& vars) const {
  for (const auto& [m, c] : terms_) {
    if (monomial_mentions(m, vars)) return false;
  }
  return true;
}

Poly Poly::linear_coefficient(const Identifier& v) const {
  Term var = Term::variable(v);
  Poly r;
  for (const auto& [m, c] : terms_) {
    auto it = m.find(var);
    if (it == m.end() || it->second != 1) continue;
    Monomial rest = m;
    rest.erase(var);
    r.add_term(rest, c);
  }
  return r;
}

Poly Poly::constant_part(const std::set<Identifier>& vars) const {
  Poly r;
  for (const auto& [m, c] : terms_) {
    if (!monomial_mentions(m, vars)) r.add_term(m, c);
  }
  return r;
}

std::string Poly::to_string() const {
  if (terms_.empty()) return "0";
  std::ostringstream out;
  bool first = true;
  for (const auto& [m, c] : terms_) {
    if (!first) out << " + ";
    first = false;
    out << c.to_string();
    for (const auto& [atom, power] : m) {
      out << "*" << print(atom);
      if (power != 1) out << "^" << power;
    }
  }
  return out.str();
}

// ---------------------------------------------------------------------------

RationalFn RationalFn::operator+(const RationalFn& o) const {
  return {num * o.den + o.num * den, den * o.den};
}

RationalFn RationalFn::operator-(const RationalFn& o) const {
  return {num * o.den - o.num * den, den * o.den};
}

RationalFn RationalFn::operator*(const RationalFn& o) const {
  return {num * o.num, den * o.den};
}

RationalFn RationalFn::operator/(const RationalFn& o) const {
  if (o.num.is_zero()) throw Error("division by syntactically zero polynomial");
  return {num * o.den, den * o.num};
}

RationalFn RationalFn::negated() const { return {num.negated(), den}; }

RationalFn to_rational_fn(const Term& term) {
  switch (term.kind()) {
    case TermKind::Rational:
      return {Poly::constant(term.rational_value()), Poly::constant(Rational(1))};
    case TermKind::Variable:
    case TermKind::FuncApp:
    case TermKind::Differential:
      return {Poly::atom(term), Poly::constant(Rational(1))};
    case TermKind::Plus:
      return to_rational_fn(term.lhs()) + to_rational_fn(term.rhs());
    case TermKind::Times:
      return to_rational_fn(term.lhs()) * to_rational_fn(term.rhs());
    case TermKind::Divide:
      return to_rational_fn(term.lhs()) / to_rational_fn(term.rhs());
    case TermKind::Negate:
      return to_rational_fn(term.operand()).negated();
  }
  throw Error("unreachable term kind");
}

std::optional<std::vector<Rational>> univariate_coefficients(const Term& term,
                                                             const Identifier& var) {
  RationalFn rf = to_rational_fn(term);
  if (!rf.den.is_constant()) return std::nullopt;
  Rational den = rf.den.constant_value();
  if (den.is_zero()) return std::nullopt;

  Term var_atom = Term::variable(var);
  std::vector<Rational> coefficients;
  for (const auto& [m, c] : rf.num.terms()) {
    int degree = 0;
    for (const auto& [atom, power] : m) {
      if (atom == var_atom) {
        degree = power;
      } else {
        return std::nullopt;  // some other atom present
      }
    }
    if (static_cast<size_t>(degree) >= coefficients.size()) {
      coefficients.resize(degree + 1, Rational(0));
    }
    coefficients[degree] = c / den;
  }
  if (coefficients.empty()) coefficients.push_back(Rational(0));
  return coefficients;
}

namespace {

std::vector<BigInt> positive_divisors(BigInt n) {
  if (n < 0) n = -n;
  std::vector<BigInt> divisors;
  if (n == 0) return divisors;
  if (n > BigInt(1000000000000LL)) return divisors;  // give up, stay conservative
  for (BigInt d = 1; d * d <= n; ++d) {
    if (n % d == 0) {
      divisors.push_back(d);
      if (d * d != n) divisors.push_back(n / d);
    }
  }
  return divisors;
}

Rational eval_poly(const std::vector<Rational>& coefficients, const Rational& x) {
  Rational acc(0);
  for (size_t i = coefficients.size(); i-- > 0;) {
    acc = acc * x + coefficients[i];
  }
  return acc;
}

}  // namespace

std::vector<Rational> rational_roots(const std::vector<Rational>& coefficients) {
  // Clear denominators to an integer-coefficient polynomial.
  BigInt scale = 1;
  for (const Rational& c : coefficients) {
    scale = scale / boost::multiprecision::gcd(scale, c.den()) * c.den();
  }
  std::vector<BigInt> ints;
  ints.reserve(coefficients.size());
  for (const Rational& c : coefficients) {
    ints.push_back(c.num() * (scale / c.den()));
  }
  while (ints.size() > 1 && ints.back() == 0) ints.pop_back();
  if (ints.size() <= 1) return {};

  // Strip trailing zero constant terms: x = 0 is a root.
  std::vector<Rational> roots;
  size_t low = 0;
  while (low < ints.size() && ints[low] == 0) ++low;
  if (low > 0) roots.push_back(Rational(0));
  if (low >= ints.size() - 1 && low > 0) {
    return roots;
  }

  std::vector<BigInt> p_divisors = positive_divisors(ints[low]);
  std::vector<BigInt> q_divisors = positive_divisors(ints.back());
  std::set<Rational> found(roots.begin(), roots.end());
  for (const BigInt& p : p_divisors) {
    for (const BigInt& q : q_divisors) {
      for (int sign : {1, -1}) {
        Rational candidate(sign * p, q);
        if (found.count(candidate)) continue;
        if (eval_poly(coefficients, candidate).is_zero()) {
          found.insert(candidate);
        }
      }
    }
  }
  return std::vector<Rational>(found.begin(), found.end());
}

}  // namespace dlimp
