#pragma once

#include <optional>
#include <string>
#include <vector>

#include "dlimp/syntax.hpp"

namespace dlimp {

/// Simultaneous definition of n functions as coordinate projections of one
/// ODE system solution from fixed initial values.
struct DefinedFamily {
  std::vector<Identifier> names;  // coordinate order = ODE order
  std::vector<Term> rhs;          // f_i(x, t), one per coordinate
  Identifier time_var;
  std::vector<Term> init_values;  // exact closed terms
  Term init_time = Term::rational(0);

  /// Throws IllFormedFamily if any invariant fails.
  void validate() const;
  /// Canonical content key (used for oracle caches).
  std::string key() const;
  bool operator==(const DefinedFamily& other) const;
};

/// Parsed `implicit Real h1(Real t), ... = {{init};{ode}}` declaration.
struct ImplicitDecl {
  std::vector<Identifier> names;
  Identifier argument;
  std::vector<std::pair<Identifier, Term>> init_assignments;
  std::vector<OdeEquation> ode;
};

/// Closed-term exact evaluation over rationals (+, *, /, -). Returns nullopt
/// for terms mentioning variables or function applications.
std::optional<Rational> eval_exact(const Term& term);

/// The interpretation formula for coordinate `index`:
///   < x_j:=*; ... ; x_i:=._0; t:=._1; { {x'=-f,t'=-1} ++ {x'=f,t'=1} } >
///     (x_1=X_1 & ... & x_n=X_n & t=T)
Formula build_interpretation(const DefinedFamily& family, int index);

/// Interpreted symbol for coordinate `index` (arity 1, annotated).
InterpretedSymbol family_symbol(const DefinedFamily& family, int index, bool builtin);

/// The desugared annotation display, brace-grouped exactly like the
/// `name<< <{...}{{...}++{...}}>(...) >>` echo format.
std::string format_interpretation(const DefinedFamily& family, int index);

/// Result of structurally matching a formula against the interpretation
/// shape. For raw annotations output/input are the placeholders; for
/// substituted instances they are the instance terms.
struct ShapeInstance {
  DefinedFamily family;
  int index = 0;
  Term output_term = Term::rational(0);
  Term input_term = Term::rational(0);
};

/// Matches any alpha-variant of a build_interpretation output (with arbitrary
/// output/input terms in the placeholder positions). Returns nullopt when the
/// formula is not of that shape.
std::optional<ShapeInstance> recognize_shape(const Formula& formula);

/// Symbols desugared from an implicit declaration, in declaration order.
std::vector<InterpretedSymbol> desugar_implicit(const ImplicitDecl& decl);

DefinedFamily family_of_implicit(const ImplicitDecl& decl);

class ExistenceCertificate;  // kernel.hpp

struct RegistryEntry {
  InterpretedSymbol symbol = InterpretedSymbol::numeric_builtin("?", 0);
  std::optional<DefinedFamily> family;
  int index = -1;
  std::shared_ptr<const ExistenceCertificate> certificate;
  std::string refusal_reason;  // set when certification was attempted and refused
  bool numeric_only = false;
};

/// Symbol registry. Builtins sin, cos, exp, tanh (plus numeric-only pi and
/// sqrt) are always present; sin/cos share one family. Built once, then
/// immutable and freely shareable.
class Registry {
 public:
  /// Registry holding exactly the builtins.
  static Registry builtins();

  /// Registers every coordinate of the family. Re-registering a name bound
  /// to an alpha-equivalent definition is a no-op; a conflicting definition
  /// raises ShadowingError.
  void register_family(const DefinedFamily& family, bool builtin = false);
  void register_implicit(const ImplicitDecl& decl);

  const RegistryEntry* lookup(const Identifier& name) const;
  const RegistryEntry& at(const Identifier& name) const;
  bool contains(const Identifier& name) const { return lookup(name) != nullptr; }

  /// Registration order (builtins first).
  const std::vector<Identifier>& order() const { return order_; }

  /// Short-name table for the parser.
  std::map<Identifier, InterpretedSymbol> symbols() const;

  // Used by kernel certification.
  RegistryEntry* lookup_mutable(const Identifier& name);

 private:
  std::map<Identifier, RegistryEntry> entries_;
  std::vector<Identifier> order_;
};

}  // namespace dlimp
