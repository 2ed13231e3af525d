#pragma once

#include <map>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "dlimp/rational.hpp"

namespace dlimp {

using Identifier = std::string;

class Term;
class Formula;
class HybridProgram;
class InterpretedSymbol;

/// Reserved placeholder identifiers used inside interpretation annotations:
/// "._0" is the output placeholder, "._1" the (single) input placeholder.
Identifier placeholder(int index);

enum class TermKind {
  Variable,
  Rational,
  Plus,
  Times,
  Divide,
  Negate,
  FuncApp,
  Differential,
};

/// Immutable term tree (value semantics, structurally shared).
class Term {
 public:
  static Term variable(Identifier name);
  static Term rational(Rational value);
  static Term rational(long long num, long long den = 1);
  static Term plus(Term lhs, Term rhs);
  static Term minus(Term lhs, Term rhs);  // sugar: lhs + (-rhs)
  static Term times(Term lhs, Term rhs);
  static Term divide(Term lhs, Term rhs);
  static Term negate(Term operand);
  static Term func_app(InterpretedSymbol symbol, std::vector<Term> args);
  static Term differential(Term operand);

  TermKind kind() const;
  const Identifier& var_name() const;
  const Rational& rational_value() const;
  const Term& lhs() const;
  const Term& rhs() const;
  const Term& operand() const;  // Negate / Differential
  const InterpretedSymbol& symbol() const;
  const std::vector<Term>& args() const;

  bool operator==(const Term& other) const;
  bool operator!=(const Term& other) const { return !(*this == other); }

  struct Node;

 private:
  explicit Term(std::shared_ptr<const Node> node) : node_(std::move(node)) {}
  std::shared_ptr<const Node> node_;
  friend struct TermAccess;
};

/// Deterministic total order on terms (used for canonical monomial keys).
int compare(const Term& a, const Term& b);
struct TermLess {
  bool operator()(const Term& a, const Term& b) const { return compare(a, b) < 0; }
};

enum class CompareOp { Eq, Neq, Ge, Gt, Le, Lt };

const char* compare_op_text(CompareOp op);

enum class FormulaKind {
  True,
  False,
  Compare,
  And,
  Or,
  Not,
  Imply,
  Equiv,
  Forall,
  Exists,
  Box,
  Diamond,
};

class Formula {
 public:
  static Formula truth(bool value);
  static Formula compare(CompareOp op, Term lhs, Term rhs);
  static Formula conj(Formula lhs, Formula rhs);
  static Formula disj(Formula lhs, Formula rhs);
  static Formula negation(Formula operand);
  static Formula imply(Formula lhs, Formula rhs);
  static Formula equiv(Formula lhs, Formula rhs);
  static Formula forall(Identifier binder, Formula body);
  static Formula exists(Identifier binder, Formula body);
  static Formula box(HybridProgram program, Formula post);
  static Formula diamond(HybridProgram program, Formula post);

  FormulaKind kind() const;
  CompareOp op() const;
  const Term& lhs_term() const;
  const Term& rhs_term() const;
  const Formula& lhs() const;
  const Formula& rhs() const;
  const Formula& operand() const;  // Not
  const Identifier& binder() const;
  const Formula& body() const;  // Forall / Exists
  const HybridProgram& program() const;
  const Formula& post() const;  // Box / Diamond

  bool operator==(const Formula& other) const;
  bool operator!=(const Formula& other) const { return !(*this == other); }

  struct Node;

 private:
  explicit Formula(std::shared_ptr<const Node> node) : node_(std::move(node)) {}
  std::shared_ptr<const Node> node_;
  friend struct FormulaAccess;
};

enum class ProgramKind {
  Test,
  Assign,
  AssignAny,
  ODESystem,
  Choice,
  Sequence,
  Loop,
  IfThen,
};

using OdeEquation = std::pair<Identifier, Term>;

class HybridProgram {
 public:
  static HybridProgram test(Formula condition);
  static HybridProgram assign(Identifier var, Term value);
  static HybridProgram assign_any(Identifier var);
  /// Left-hand sides must be pairwise distinct.
  static HybridProgram ode(std::vector<OdeEquation> equations, Formula domain);
  static HybridProgram choice(HybridProgram lhs, HybridProgram rhs);
  static HybridProgram sequence(HybridProgram lhs, HybridProgram rhs);
  /// Left fold of a unit list; requires at least one element.
  static HybridProgram sequence(std::vector<HybridProgram> units);
  static HybridProgram loop(HybridProgram body);
  static HybridProgram if_then(Formula condition, HybridProgram body);

  ProgramKind kind() const;
  const Formula& condition() const;  // Test / IfThen
  const Identifier& var() const;     // Assign / AssignAny
  const Term& value() const;         // Assign
  const std::vector<OdeEquation>& equations() const;
  const Formula& domain() const;
  const HybridProgram& lhs() const;
  const HybridProgram& rhs() const;
  const HybridProgram& body() const;  // Loop / IfThen

  bool operator==(const HybridProgram& other) const;
  bool operator!=(const HybridProgram& other) const { return !(*this == other); }

  struct Node;

 private:
  explicit HybridProgram(std::shared_ptr<const Node> node) : node_(std::move(node)) {}
  std::shared_ptr<const Node> node_;
  friend struct ProgramAccess;
};

/// Function identifier with an optional interpretation annotation.
/// Differentially-defined symbols carry the Eq.-3-shaped formula; pi and sqrt
/// are numeric-only (no interpretation, never expanded).
class InterpretedSymbol {
 public:
  static InterpretedSymbol defined(Identifier name, int arity,
                                   Formula interpretation, bool builtin);
  static InterpretedSymbol numeric_builtin(Identifier name, int arity);

  const Identifier& name() const;
  int arity() const;
  bool has_interpretation() const;
  const Formula& interpretation() const;
  /// Builtins print by short name; user symbols print with full annotation.
  bool is_builtin() const;
  bool is_numeric_only() const;

  bool operator==(const InterpretedSymbol& other) const;
  bool operator!=(const InterpretedSymbol& other) const { return !(*this == other); }

  struct Node;

 private:
  explicit InterpretedSymbol(std::shared_ptr<const Node> node)
      : node_(std::move(node)) {}
  std::shared_ptr<const Node> node_;
  friend struct SymbolAccess;
};

// ---------------------------------------------------------------------------
// Static semantics and syntactic operations.

std::set<Identifier> free_variables(const Term& term);
std::set<Identifier> free_variables(const Formula& formula);
std::set<Identifier> free_variables(const HybridProgram& program);

std::set<Identifier> bound_variables(const HybridProgram& program);
std::set<Identifier> must_bound_variables(const HybridProgram& program);

/// Every identifier occurring anywhere (free or bound); used for freshness.
std::set<Identifier> all_identifiers(const Term& term);
std::set<Identifier> all_identifiers(const Formula& formula);
std::set<Identifier> all_identifiers(const HybridProgram& program);

using Substitution = std::map<Identifier, Term>;

/// Capture-avoiding substitution of free variable occurrences. Throws
/// CaptureError when admissibility fails; callers rename binders first.
Term substitute(const Term& term, const Substitution& sigma);
Formula substitute(const Formula& formula, const Substitution& sigma);
HybridProgram substitute(const HybridProgram& program, const Substitution& sigma);

/// Renames binder occurrences of `old` (and their bound references) to
/// `fresh`. Free occurrences of `old` are untouched. Throws FreshnessError
/// when `fresh` already occurs in the formula.
Formula alpha_rename(const Formula& formula, const Identifier& old,
                     const Identifier& fresh);

/// Bounded syntactic alpha-equivalence: quantifier binders and program-bound
/// variables may differ by a consistent bijection. Conservative (may answer
/// false for exotic binding structure), never true for inequivalent inputs.
bool alpha_equivalent(const Formula& a, const Formula& b);

/// Rewrites every IfThen into Choice(Sequence(Test(c), body), Test(!c)).
HybridProgram desugar_if(const HybridProgram& program);
Formula desugar_if(const Formula& formula);

/// Light exact simplifier: folds rational arithmetic, drops *1/+0 units,
/// cancels double negation, maps x*0 to 0.
Term fold_constants(const Term& term);
Formula fold_constants(const Formula& formula);

Identifier fresh_identifier(const Identifier& base, const std::set<Identifier>& used);

}  // namespace dlimp
