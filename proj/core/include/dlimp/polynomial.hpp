#pragma once

#include <map>
#include <optional>
#include <vector>

#include "dlimp/syntax.hpp"

namespace dlimp {

/// Multivariate polynomial over opaque atoms with exact rational
/// coefficients. Atoms are irreducible subterms: variables, function
/// applications, differentials.
class Poly {
 public:
  using Monomial = std::map<Term, int, TermLess>;

  struct MonomialLess {
    bool operator()(const Monomial& a, const Monomial& b) const {
      auto ia = a.begin();
      auto ib = b.begin();
      for (; ia != a.end() && ib != b.end(); ++ia, ++ib) {
        int c = compare(ia->first, ib->first);
        if (c != 0) return c < 0;
        if (ia->second != ib->second) return ia->second < ib->second;
      }
      return ia == a.end() && ib != b.end();
    }
  };

  Poly() = default;
  static Poly constant(Rational value);
  static Poly atom(Term atom);

  Poly operator+(const Poly&) const;
  Poly operator-(const Poly&) const;
  Poly operator*(const Poly&) const;
  Poly negated() const;

  bool is_zero() const { return terms_.empty(); }
  bool is_constant() const;
  Rational constant_value() const;  // requires is_constant()

  /// Highest total degree counting only atoms in `vars`.
  int degree_in(const std::set<Identifier>& vars) const;
  /// True when no atom mentions any identifier in `vars`.
  bool independent_of(const std::set<Identifier>& vars) const;

  /// Coefficient of variable atom `v` treating the polynomial as linear in
  /// the `vars` atoms; meaningful when degree_in(vars) <= 1.
  Poly linear_coefficient(const Identifier& v) const;
  /// Terms containing none of the `vars` atoms.
  Poly constant_part(const std::set<Identifier>& vars) const;

  const std::map<Monomial, Rational, MonomialLess>& terms() const { return terms_; }

  std::string to_string() const;  // diagnostic

 private:
  std::map<Monomial, Rational, MonomialLess> terms_;
  void add_term(const Monomial& m, const Rational& c);
};

/// num/den pair of polynomials; den is never the zero polynomial. No gcd
/// cancellation is performed (exact-zero detection only needs the numerator).
struct RationalFn {
  Poly num;
  Poly den = Poly::constant(Rational(1));

  RationalFn operator+(const RationalFn&) const;
  RationalFn operator-(const RationalFn&) const;
  RationalFn operator*(const RationalFn&) const;
  /// Throws Error when dividing by a syntactically zero polynomial.
  RationalFn operator/(const RationalFn&) const;
  RationalFn negated() const;

  bool is_zero() const { return num.is_zero(); }
};

/// Canonicalizes a term into num/den polynomial form. Function applications
/// and differentials become atoms; +, *, /, unary minus and rational
/// constants are interpreted.
RationalFn to_rational_fn(const Term& term);

/// Exact univariate polynomial over one designated variable. Returns nullopt
/// when the term is not a polynomial in `var` with constant rational
/// coefficients (any other atom present).
std::optional<std::vector<Rational>> univariate_coefficients(const Term& term,
                                                             const Identifier& var);

/// All rational roots of the polynomial with the given exact coefficients
/// (index = degree), found by the rational root theorem. Sorted ascending.
std::vector<Rational> rational_roots(const std::vector<Rational>& coefficients);

}  // namespace dlimp
