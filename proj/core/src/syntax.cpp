#include "dlimp/syntax.hpp"

#include <stdexcept>

#include "dlimp/errors.hpp"

namespace dlimp {

Identifier placeholder(int index) { return "._" + std::to_string(index); }

// ---------------------------------------------------------------------------
// Node definitions.

struct Term::Node {
  TermKind kind;
  Identifier name;          // Variable
  Rational value;           // Rational
  std::vector<Term> kids;   // Plus/Times/Divide: 2, Negate/Differential: 1, FuncApp: args
  std::shared_ptr<const InterpretedSymbol> symbol;  // FuncApp
};

struct Formula::Node {
  FormulaKind kind;
  CompareOp op = CompareOp::Eq;
  std::vector<Term> terms;       // Compare: 2
  std::vector<Formula> kids;     // connectives
  Identifier binder;             // Forall/Exists
  std::shared_ptr<const HybridProgram> program;  // Box/Diamond
};

struct HybridProgram::Node {
  ProgramKind kind;
  std::vector<Formula> formulas;    // Test/IfThen condition, ODE domain
  Identifier var;                   // Assign/AssignAny
  std::vector<Term> terms;          // Assign value
  std::vector<OdeEquation> eqs;     // ODESystem
  std::vector<HybridProgram> kids;  // Choice/Sequence: 2, Loop/IfThen body: 1
};

struct InterpretedSymbol::Node {
  Identifier name;
  int arity;
  std::optional<Formula> interpretation;
  bool builtin;
  bool numeric_only;
};

// ---------------------------------------------------------------------------
// Term constructors and accessors.

namespace {
Term make_term(Term::Node node);
}

struct TermAccess {
  static Term make(Term::Node node) {
    return Term(std::make_shared<const Term::Node>(std::move(node)));
  }
  static const Term::Node& node(const Term& t) { return *t.node_; }
  static const void* raw(const Term& t) { return t.node_.get(); }
};

namespace {
Term make_term(Term::Node node) { return TermAccess::make(std::move(node)); }
const Term::Node& node_of(const Term& t) { return TermAccess::node(t); }
}  // namespace

Term Term::variable(Identifier name) {
  Node n;
  n.kind = TermKind::Variable;
  n.name = std::move(name);
  return make_term(std::move(n));
}

Term Term::rational(Rational value) {
  Node n;
  n.kind = TermKind::Rational;
  n.value = std::move(value);
  return make_term(std::move(n));
}

Term Term::rational(long long num, long long den) {
  return rational(Rational(BigInt(num), BigInt(den)));
}

Term Term::plus(Term lhs, Term rhs) {
  Node n;
  n.kind = TermKind::Plus;
  n.kids = {std::move(lhs), std::move(rhs)};
  return make_term(std::move(n));
}

Term Term::minus(Term lhs, Term rhs) { return plus(std::move(lhs), negate(std::move(rhs))); }

Term Term::times(Term lhs, Term rhs) {
  Node n;
  n.kind = TermKind::Times;
  n.kids = {std::move(lhs), std::move(rhs)};
  return make_term(std::move(n));
}

Term Term::divide(Term lhs, Term rhs) {
  if (node_of(rhs).kind == TermKind::Rational && node_of(rhs).value.is_zero()) {
    throw Error("division by constant zero");
  }
  Node n;
  n.kind = TermKind::Divide;
  n.kids = {std::move(lhs), std::move(rhs)};
  return make_term(std::move(n));
}

Term Term::negate(Term operand) {
  Node n;
  n.kind = TermKind::Negate;
  n.kids = {std::move(operand)};
  return make_term(std::move(n));
}

Term Term::func_app(InterpretedSymbol symbol, std::vector<Term> args) {
  if (static_cast<int>(args.size()) != symbol.arity()) {
    throw ArityError("function " + symbol.name() + " expects " +
                     std::to_string(symbol.arity()) + " arguments, got " +
                     std::to_string(args.size()));
  }
  Node n;
  n.kind = TermKind::FuncApp;
  n.symbol = std::make_shared<const InterpretedSymbol>(std::move(symbol));
  n.kids = std::move(args);
  return make_term(std::move(n));
}

Term Term::differential(Term operand) {
  Node n;
  n.kind = TermKind::Differential;
  n.kids = {std::move(operand)};
  return make_term(std::move(n));
}

TermKind Term::kind() const { return node_->kind; }
const Identifier& Term::var_name() const { return node_->name; }
const Rational& Term::rational_value() const { return node_->value; }
const Term& Term::lhs() const { return node_->kids[0]; }
const Term& Term::rhs() const { return node_->kids[1]; }
const Term& Term::operand() const { return node_->kids[0]; }
const InterpretedSymbol& Term::symbol() const { return *node_->symbol; }
const std::vector<Term>& Term::args() const { return node_->kids; }

bool Term::operator==(const Term& other) const {
  if (node_ == other.node_) return true;
  const Node& a = *node_;
  const Node& b = *other.node_;
  if (a.kind != b.kind) return false;
  switch (a.kind) {
    case TermKind::Variable:
      return a.name == b.name;
    case TermKind::Rational:
      return a.value == b.value;
    case TermKind::FuncApp:
      if (!(*a.symbol == *b.symbol)) return false;
      [[fallthrough]];
    default:
      if (a.kids.size() != b.kids.size()) return false;
      for (size_t i = 0; i < a.kids.size(); ++i) {
        if (!(a.kids[i] == b.kids[i])) return false;
      }
      return true;
  }
}

// ---------------------------------------------------------------------------
// Formula constructors and accessors.

struct FormulaAccess {
  static Formula make(Formula::Node node) {
    return Formula(std::make_shared<const Formula::Node>(std::move(node)));
  }
  static const Formula::Node& node(const Formula& f) { return *f.node_; }
};

namespace {
Formula make_formula(Formula::Node node) { return FormulaAccess::make(std::move(node)); }
const Formula::Node& node_of(const Formula& f) { return FormulaAccess::node(f); }
}  // namespace

Formula Formula::truth(bool value) {
  Node n;
  n.kind = value ? FormulaKind::True : FormulaKind::False;
  return make_formula(std::move(n));
}

Formula Formula::compare(CompareOp op, Term lhs, Term rhs) {
  Node n;
  n.kind = FormulaKind::Compare;
  n.op = op;
  n.terms = {std::move(lhs), std::move(rhs)};
  return make_formula(std::move(n));
}

namespace {
Formula binary_formula(FormulaKind kind, Formula lhs, Formula rhs) {
  Formula::Node n;
  n.kind = kind;
  n.kids = {std::move(lhs), std::move(rhs)};
  return FormulaAccess::make(std::move(n));
}
}  // namespace

Formula Formula::conj(Formula lhs, Formula rhs) {
  return binary_formula(FormulaKind::And, std::move(lhs), std::move(rhs));
}
Formula Formula::disj(Formula lhs, Formula rhs) {
  return binary_formula(FormulaKind::Or, std::move(lhs), std::move(rhs));
}
Formula Formula::imply(Formula lhs, Formula rhs) {
  return binary_formula(FormulaKind::Imply, std::move(lhs), std::move(rhs));
}
Formula Formula::equiv(Formula lhs, Formula rhs) {
  return binary_formula(FormulaKind::Equiv, std::move(lhs), std::move(rhs));
}

Formula Formula::negation(Formula operand) {
  Node n;
  n.kind = FormulaKind::Not;
  n.kids = {std::move(operand)};
  return make_formula(std::move(n));
}

namespace {
Formula quantifier(FormulaKind kind, Identifier binder, Formula body) {
  Formula::Node n;
  n.kind = kind;
  n.binder = std::move(binder);
  n.kids = {std::move(body)};
  return FormulaAccess::make(std::move(n));
}
}  // namespace

Formula Formula::forall(Identifier binder, Formula body) {
  return quantifier(FormulaKind::Forall, std::move(binder), std::move(body));
}
Formula Formula::exists(Identifier binder, Formula body) {
  return quantifier(FormulaKind::Exists, std::move(binder), std::move(body));
}

namespace {
Formula modality(FormulaKind kind, HybridProgram program, Formula post) {
  Formula::Node n;
  n.kind = kind;
  n.program = std::make_shared<const HybridProgram>(std::move(program));
  n.kids = {std::move(post)};
  return FormulaAccess::make(std::move(n));
}
}  // namespace

Formula Formula::box(HybridProgram program, Formula post) {
  return modality(FormulaKind::Box, std::move(program), std::move(post));
}
Formula Formula::diamond(HybridProgram program, Formula post) {
  return modality(FormulaKind::Diamond, std::move(program), std::move(post));
}

FormulaKind Formula::kind() const { return node_->kind; }
CompareOp Formula::op() const { return node_->op; }
const Term& Formula::lhs_term() const { return node_->terms[0]; }
const Term& Formula::rhs_term() const { return node_->terms[1]; }
const Formula& Formula::lhs() const { return node_->kids[0]; }
const Formula& Formula::rhs() const { return node_->kids[1]; }
const Formula& Formula::operand() const { return node_->kids[0]; }
const Identifier& Formula::binder() const { return node_->binder; }
const Formula& Formula::body() const { return node_->kids[0]; }
const HybridProgram& Formula::program() const { return *node_->program; }
const Formula& Formula::post() const { return node_->kids[0]; }

bool Formula::operator==(const Formula& other) const {
  if (node_ == other.node_) return true;
  const Node& a = *node_;
  const Node& b = *other.node_;
  if (a.kind != b.kind) return false;
  if (a.kind == FormulaKind::Compare) {
    return a.op == b.op && a.terms[0] == b.terms[0] && a.terms[1] == b.terms[1];
  }
  if (a.binder != b.binder) return false;
  if ((a.program == nullptr) != (b.program == nullptr)) return false;
  if (a.program && !(*a.program == *b.program)) return false;
  if (a.kids.size() != b.kids.size()) return false;
  for (size_t i = 0; i < a.kids.size(); ++i) {
    if (!(a.kids[i] == b.kids[i])) return false;
  }
  return true;
}

// ---------------------------------------------------------------------------
// HybridProgram constructors and accessors.

struct ProgramAccess {
  static HybridProgram make(HybridProgram::Node node) {
    return HybridProgram(std::make_shared<const HybridProgram::Node>(std::move(node)));
  }
  static const HybridProgram::Node& node(const HybridProgram& p) { return *p.node_; }
};

namespace {
HybridProgram make_program(HybridProgram::Node node) {
  return ProgramAccess::make(std::move(node));
}
const HybridProgram::Node& node_of(const HybridProgram& p) {
  return ProgramAccess::node(p);
}
}  // namespace

HybridProgram HybridProgram::test(Formula condition) {
  Node n;
  n.kind = ProgramKind::Test;
  n.formulas = {std::move(condition)};
  return make_program(std::move(n));
}

HybridProgram HybridProgram::assign(Identifier var, Term value) {
  Node n;
  n.kind = ProgramKind::Assign;
  n.var = std::move(var);
  n.terms = {std::move(value)};
  return make_program(std::move(n));
}

HybridProgram HybridProgram::assign_any(Identifier var) {
  Node n;
  n.kind = ProgramKind::AssignAny;
  n.var = std::move(var);
  return make_program(std::move(n));
}

HybridProgram HybridProgram::ode(std::vector<OdeEquation> equations, Formula domain) {
  std::set<Identifier> seen;
  for (const auto& [lhs, rhs] : equations) {
    if (!seen.insert(lhs).second) {
      throw Error("ODE system binds " + lhs + " twice");
    }
  }
  Node n;
  n.kind = ProgramKind::ODESystem;
  n.eqs = std::move(equations);
  n.formulas = {std::move(domain)};
  return make_program(std::move(n));
}

HybridProgram HybridProgram::choice(HybridProgram lhs, HybridProgram rhs) {
  Node n;
  n.kind = ProgramKind::Choice;
  n.kids = {std::move(lhs), std::move(rhs)};
  return make_program(std::move(n));
}

HybridProgram HybridProgram::sequence(HybridProgram lhs, HybridProgram rhs) {
  Node n;
  n.kind = ProgramKind::Sequence;
  n.kids = {std::move(lhs), std::move(rhs)};
  return make_program(std::move(n));
}

HybridProgram HybridProgram::sequence(std::vector<HybridProgram> units) {
  if (units.empty()) throw Error("empty sequence");
  HybridProgram acc = units[0];
  for (size_t i = 1; i < units.size(); ++i) acc = sequence(acc, units[i]);
  return acc;
}

HybridProgram HybridProgram::loop(HybridProgram body) {
  Node n;
  n.kind = ProgramKind::Loop;
  n.kids = {std::move(body)};
  return make_program(std::move(n));
}

HybridProgram HybridProgram::if_then(Formula condition, HybridProgram body) {
  Node n;
  n.kind = ProgramKind::IfThen;
  n.formulas = {std::move(condition)};
  n.kids = {std::move(body)};
  return make_program(std::move(n));
}

ProgramKind HybridProgram::kind() const { return node_->kind; }
const Formula& HybridProgram::condition() const { return node_->formulas[0]; }
const Identifier& HybridProgram::var() const { return node_->var; }
const Term& HybridProgram::value() const { return node_->terms[0]; }
const std::vector<OdeEquation>& HybridProgram::equations() const { return node_->eqs; }
const Formula& HybridProgram::domain() const { return node_->formulas[0]; }
const HybridProgram& HybridProgram::lhs() const { return node_->kids[0]; }
const HybridProgram& HybridProgram::rhs() const { return node_->kids[1]; }
const HybridProgram& HybridProgram::body() const { return node_->kids[0]; }

bool HybridProgram::operator==(const HybridProgram& other) const {
  if (node_ == other.node_) return true;
  const Node& a = *node_;
  const Node& b = *other.node_;
  if (a.kind != b.kind || a.var != b.var) return false;
  if (a.terms.size() != b.terms.size() || a.eqs.size() != b.eqs.size() ||
      a.formulas.size() != b.formulas.size() || a.kids.size() != b.kids.size()) {
    return false;
  }
  for (size_t i = 0; i < a.terms.size(); ++i) {
    if (!(a.terms[i] == b.terms[i])) return false;
  }
  for (size_t i = 0; i < a.eqs.size(); ++i) {
    if (a.eqs[i].first != b.eqs[i].first || !(a.eqs[i].second == b.eqs[i].second)) {
      return false;
    }
  }
  for (size_t i = 0; i < a.formulas.size(); ++i) {
    if (!(a.formulas[i] == b.formulas[i])) return false;
  }
  for (size_t i = 0; i < a.kids.size(); ++i) {
    if (!(a.kids[i] == b.kids[i])) return false;
  }
  return true;
}

// ---------------------------------------------------------------------------
// InterpretedSymbol.

struct SymbolAccess {
  static InterpretedSymbol make(InterpretedSymbol::Node node) {
    return InterpretedSymbol(
        std::make_shared<const InterpretedSymbol::Node>(std::move(node)));
  }
};

InterpretedSymbol InterpretedSymbol::defined(Identifier name, int arity,
                                             Formula interpretation, bool builtin) {
  Node n;
  n.name = std::move(name);
  n.arity = arity;
  n.interpretation = std::move(interpretation);
  n.builtin = builtin;
  n.numeric_only = false;
  return SymbolAccess::make(std::move(n));
}

InterpretedSymbol InterpretedSymbol::numeric_builtin(Identifier name, int arity) {
  Node n;
  n.name = std::move(name);
  n.arity = arity;
  n.builtin = true;
  n.numeric_only = true;
  return SymbolAccess::make(std::move(n));
}

const Identifier& InterpretedSymbol::name() const { return node_->name; }
int InterpretedSymbol::arity() const { return node_->arity; }
bool InterpretedSymbol::has_interpretation() const {
  return node_->interpretation.has_value();
}
const Formula& InterpretedSymbol::interpretation() const {
  return *node_->interpretation;
}
bool InterpretedSymbol::is_builtin() const { return node_->builtin; }
bool InterpretedSymbol::is_numeric_only() const { return node_->numeric_only; }

bool InterpretedSymbol::operator==(const InterpretedSymbol& other) const {
  if (node_ == other.node_) return true;
  const Node& a = *node_;
  const Node& b = *other.node_;
  if (a.name != b.name || a.arity != b.arity || a.builtin != b.builtin ||
      a.numeric_only != b.numeric_only) {
    return false;
  }
  if (a.interpretation.has_value() != b.interpretation.has_value()) return false;
  return !a.interpretation || *a.interpretation == *b.interpretation;
}

// ---------------------------------------------------------------------------
// Total order on terms.

const char* compare_op_text(CompareOp op) {
  switch (op) {
    case CompareOp::Eq: return "=";
    case CompareOp::Neq: return "!=";
    case CompareOp::Ge: return ">=";
    case CompareOp::Gt: return ">";
    case CompareOp::Le: return "<=";
    case CompareOp::Lt: return "<";
  }
  return "?";
}

int compare(const Term& a, const Term& b) {
  const auto& na = node_of(a);
  const auto& nb = node_of(b);
  if (na.kind != nb.kind) {
    return static_cast<int>(na.kind) < static_cast<int>(nb.kind) ? -1 : 1;
  }
  switch (na.kind) {
    case TermKind::Variable:
      return na.name.compare(nb.name) < 0 ? -1 : (na.name == nb.name ? 0 : 1);
    case TermKind::Rational: {
      auto c = na.value <=> nb.value;
      return c == std::strong_ordering::less ? -1
             : c == std::strong_ordering::greater ? 1 : 0;
    }
    case TermKind::FuncApp: {
      int c = na.symbol->name().compare(nb.symbol->name());
      if (c != 0) return c < 0 ? -1 : 1;
      break;
    }
    default:
      break;
  }
  if (na.kids.size() != nb.kids.size()) {
    return na.kids.size() < nb.kids.size() ? -1 : 1;
  }
  for (size_t i = 0; i < na.kids.size(); ++i) {
    int c = compare(na.kids[i], nb.kids[i]);
    if (c != 0) return c;
  }
  return 0;
}

}  // namespace dlimp
