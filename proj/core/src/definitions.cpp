#include "dlimp/definitions.hpp"

#include <algorithm>
#include <sstream>

#include "dlimp/errors.hpp"
#include "dlimp/printer.hpp"

namespace dlimp {

namespace {

bool contains_func_or_differential(const Term& t) {
  switch (t.kind()) {
    case TermKind::Variable:
    case TermKind::Rational:
      return false;
    case TermKind::FuncApp:
    case TermKind::Differential:
      return true;
    case TermKind::Negate:
      return contains_func_or_differential(t.operand());
    default:
      return contains_func_or_differential(t.lhs()) ||
             contains_func_or_differential(t.rhs());
  }
}

/// Syntactic negation with double-negation and rational simplification so
/// that the backward ODE branch matches the paper's display (c'=s, not
/// c'=--s; t'=-1 as a literal).
Term negate_rhs(const Term& t) {
  if (t.kind() == TermKind::Negate) return t.operand();
  if (t.kind() == TermKind::Rational) return Term::rational(-t.rational_value());
  return Term::negate(t);
}

bool is_exact_negation(const Term& a, const Term& b) {
  if (a.kind() == TermKind::Negate && a.operand() == b) return true;
  if (b.kind() == TermKind::Negate && b.operand() == a) return true;
  if (a.kind() == TermKind::Rational && b.kind() == TermKind::Rational) {
    return a.rational_value() == -b.rational_value();
  }
  return false;
}

}  // namespace

std::optional<Rational> eval_exact(const Term& term) {
  switch (term.kind()) {
    case TermKind::Rational:
      return term.rational_value();
    case TermKind::Plus: {
      auto a = eval_exact(term.lhs());
      auto b = eval_exact(term.rhs());
      if (!a || !b) return std::nullopt;
      return *a + *b;
    }
    case TermKind::Times: {
      auto a = eval_exact(term.lhs());
      auto b = eval_exact(term.rhs());
      if (!a || !b) return std::nullopt;
      return *a * *b;
    }
    case TermKind::Divide: {
      auto a = eval_exact(term.lhs());
      auto b = eval_exact(term.rhs());
      if (!a || !b || b->is_zero()) return std::nullopt;
      return *a / *b;
    }
    case TermKind::Negate: {
      auto a = eval_exact(term.operand());
      if (!a) return std::nullopt;
      return -*a;
    }
    default:
      return std::nullopt;  // variables, function applications, differentials
  }
}

void DefinedFamily::validate() const {
  if (names.empty()) throw IllFormedFamily("family must define at least one function");
  if (names.size() != rhs.size() || names.size() != init_values.size()) {
    throw IllFormedFamily("family names, right-hand sides and initial values disagree");
  }
  std::set<Identifier> name_set(names.begin(), names.end());
  if (name_set.size() != names.size()) {
    throw IllFormedFamily("family coordinate names must be distinct");
  }
  if (name_set.count(time_var)) {
    throw IllFormedFamily("time variable collides with a coordinate name");
  }
  std::set<Identifier> allowed = name_set;
  allowed.insert(time_var);
  for (size_t i = 0; i < rhs.size(); ++i) {
    if (contains_func_or_differential(rhs[i])) {
      throw IllFormedFamily("right-hand side of " + names[i] +
                            " mentions a function application");
    }
    for (const Identifier& v : free_variables(rhs[i])) {
      if (!allowed.count(v)) {
        throw IllFormedFamily("right-hand side of " + names[i] +
                              " mentions foreign variable " + v);
      }
    }
  }
  for (size_t i = 0; i < init_values.size(); ++i) {
    if (!eval_exact(init_values[i])) {
      throw IllFormedFamily("initial value for " + names[i] +
                            " is not a closed exact term");
    }
  }
  if (!eval_exact(init_time)) {
    throw IllFormedFamily("initial time is not a closed exact term");
  }
}

std::string DefinedFamily::key() const {
  std::ostringstream out;
  for (size_t i = 0; i < names.size(); ++i) {
    out << names[i] << "'=" << print(rhs[i]) << ";";
  }
  out << time_var << ";";
  for (const Term& v : init_values) out << print(v) << ";";
  out << print(init_time);
  return out.str();
}

bool DefinedFamily::operator==(const DefinedFamily& other) const {
  return names == other.names && time_var == other.time_var &&
         std::equal(rhs.begin(), rhs.end(), other.rhs.begin(), other.rhs.end()) &&
         std::equal(init_values.begin(), init_values.end(), other.init_values.begin(),
                    other.init_values.end()) &&
         init_time == other.init_time;
}

// ---------------------------------------------------------------------------
// Interpretation construction (Eq. 3 shape).

namespace {

HybridProgram family_choice(const DefinedFamily& family) {
  std::vector<OdeEquation> fwd;
  std::vector<OdeEquation> bwd;
  for (size_t j = 0; j < family.names.size(); ++j) {
    fwd.emplace_back(family.names[j], family.rhs[j]);
    bwd.emplace_back(family.names[j], negate_rhs(family.rhs[j]));
  }
  fwd.emplace_back(family.time_var, Term::rational(1));
  bwd.emplace_back(family.time_var, Term::rational(-1));
  return HybridProgram::choice(
      HybridProgram::ode(std::move(bwd), Formula::truth(true)),
      HybridProgram::ode(std::move(fwd), Formula::truth(true)));
}

Formula family_post(const DefinedFamily& family) {
  std::vector<Formula> conjuncts;
  for (size_t j = 0; j < family.names.size(); ++j) {
    conjuncts.push_back(Formula::compare(
        CompareOp::Eq, Term::variable(family.names[j]), family.init_values[j]));
  }
  conjuncts.push_back(Formula::compare(CompareOp::Eq, Term::variable(family.time_var),
                                       family.init_time));
  Formula post = conjuncts.back();
  for (size_t j = conjuncts.size() - 1; j-- > 0;) {
    post = Formula::conj(conjuncts[j], post);
  }
  return post;
}

}  // namespace

Formula build_interpretation(const DefinedFamily& family, int index) {
  family.validate();
  if (index < 0 || index >= static_cast<int>(family.names.size())) {
    throw IndexError("family coordinate index out of range");
  }
  std::vector<HybridProgram> units;
  for (size_t j = 0; j < family.names.size(); ++j) {
    if (static_cast<int>(j) != index) {
      units.push_back(HybridProgram::assign_any(family.names[j]));
    }
  }
  units.push_back(HybridProgram::assign(family.names[index],
                                        Term::variable(placeholder(0))));
  units.push_back(HybridProgram::assign(family.time_var,
                                        Term::variable(placeholder(1))));
  units.push_back(family_choice(family));
  return Formula::diamond(HybridProgram::sequence(std::move(units)),
                          family_post(family));
}

InterpretedSymbol family_symbol(const DefinedFamily& family, int index, bool builtin) {
  return InterpretedSymbol::defined(family.names[index], 1,
                                    build_interpretation(family, index), builtin);
}

std::string format_interpretation(const DefinedFamily& family, int index) {
  std::ostringstream out;
  const Identifier& name = family.names[index];
  out << name << "<< <{";
  for (size_t j = 0; j < family.names.size(); ++j) {
    if (static_cast<int>(j) != index) out << family.names[j] << ":=*;";
  }
  out << name << ":=" << placeholder(0) << ";";
  out << family.time_var << ":=" << placeholder(1) << ";";
  out << "}" << print(family_choice(family)) << ">(" << print(family_post(family))
      << ") >>";
  return out.str();
}

// ---------------------------------------------------------------------------
// Shape recognition.

namespace {

void flatten_seq(const HybridProgram& p, std::vector<HybridProgram>& out) {
  if (p.kind() == ProgramKind::Sequence) {
    flatten_seq(p.lhs(), out);
    flatten_seq(p.rhs(), out);
  } else {
    out.push_back(p);
  }
}

void flatten_conj(const Formula& f, std::vector<Formula>& out) {
  if (f.kind() == FormulaKind::And) {
    flatten_conj(f.lhs(), out);
    flatten_conj(f.rhs(), out);
  } else {
    out.push_back(f);
  }
}

}  // namespace

std::optional<ShapeInstance> recognize_shape(const Formula& formula) {
  if (formula.kind() != FormulaKind::Diamond) return std::nullopt;

  std::vector<HybridProgram> units;
  flatten_seq(formula.program(), units);
  if (units.size() < 3) return std::nullopt;

  const HybridProgram& last = units.back();
  if (last.kind() != ProgramKind::Choice) return std::nullopt;
  const HybridProgram& bwd = last.lhs();
  const HybridProgram& fwd = last.rhs();
  if (bwd.kind() != ProgramKind::ODESystem || fwd.kind() != ProgramKind::ODESystem) {
    return std::nullopt;
  }
  if (bwd.domain().kind() != FormulaKind::True ||
      fwd.domain().kind() != FormulaKind::True) {
    return std::nullopt;
  }
  const auto& fwd_eqs = fwd.equations();
  const auto& bwd_eqs = bwd.equations();
  if (fwd_eqs.size() != bwd_eqs.size() || fwd_eqs.size() < 2) return std::nullopt;

  // Last equation is the time track t'=1 / t'=-1.
  const auto& [time_var, time_rhs] = fwd_eqs.back();
  if (!(time_rhs == Term::rational(1))) return std::nullopt;
  if (bwd_eqs.back().first != time_var ||
      !(bwd_eqs.back().second == Term::rational(-1))) {
    return std::nullopt;
  }

  DefinedFamily family;
  family.time_var = time_var;
  for (size_t j = 0; j + 1 < fwd_eqs.size(); ++j) {
    if (bwd_eqs[j].first != fwd_eqs[j].first) return std::nullopt;
    if (!is_exact_negation(bwd_eqs[j].second, fwd_eqs[j].second)) return std::nullopt;
    family.names.push_back(fwd_eqs[j].first);
    family.rhs.push_back(fwd_eqs[j].second);
  }

  // Leading units: assign-any per non-output coordinate, then the output and
  // time bindings.
  size_t n = family.names.size();
  if (units.size() != n + 2) return std::nullopt;
  const HybridProgram& out_assign = units[n - 1 + 0];
  const HybridProgram& time_assign = units[n + 0];
  if (out_assign.kind() != ProgramKind::Assign ||
      time_assign.kind() != ProgramKind::Assign) {
    return std::nullopt;
  }
  if (time_assign.var() != time_var) return std::nullopt;

  auto coord_index = [&](const Identifier& name) -> int {
    for (size_t j = 0; j < family.names.size(); ++j) {
      if (family.names[j] == name) return static_cast<int>(j);
    }
    return -1;
  };

  int index = coord_index(out_assign.var());
  if (index < 0) return std::nullopt;

  // Assign-anys must list the non-output coordinates in family order.
  size_t unit_at = 0;
  for (size_t j = 0; j < family.names.size(); ++j) {
    if (static_cast<int>(j) == index) continue;
    if (units[unit_at].kind() != ProgramKind::AssignAny ||
        units[unit_at].var() != family.names[j]) {
      return std::nullopt;
    }
    ++unit_at;
  }

  // Postcondition: x_1=X_1 & ... & x_n=X_n & t=T with closed exact values.
  std::vector<Formula> conjuncts;
  flatten_conj(formula.post(), conjuncts);
  if (conjuncts.size() != n + 1) return std::nullopt;
  for (size_t j = 0; j < n + 1; ++j) {
    const Formula& c = conjuncts[j];
    if (c.kind() != FormulaKind::Compare || c.op() != CompareOp::Eq) return std::nullopt;
    if (c.lhs_term().kind() != TermKind::Variable) return std::nullopt;
    if (!eval_exact(c.rhs_term())) return std::nullopt;
    if (j < n) {
      if (c.lhs_term().var_name() != family.names[j]) return std::nullopt;
      family.init_values.push_back(c.rhs_term());
    } else {
      if (c.lhs_term().var_name() != time_var) return std::nullopt;
      family.init_time = c.rhs_term();
    }
  }

  try {
    family.validate();
  } catch (const IllFormedFamily&) {
    return std::nullopt;
  }

  ShapeInstance instance;
  instance.family = family;
  instance.index = index;
  instance.output_term = out_assign.value();
  instance.input_term = time_assign.value();
  return instance;
}

// ---------------------------------------------------------------------------
// Implicit-declaration desugaring.

DefinedFamily family_of_implicit(const ImplicitDecl& decl) {
  if (decl.names.empty()) throw IllFormedFamily("implicit declaration without names");
  std::set<Identifier> declared(decl.names.begin(), decl.names.end());
  if (declared.size() != decl.names.size()) {
    throw IllFormedFamily("duplicate names in implicit declaration");
  }
  std::set<Identifier> ode_lhs;
  for (const auto& [lhs, rhs] : decl.ode) ode_lhs.insert(lhs);
  if (ode_lhs != declared) {
    throw IllFormedFamily("implicit declaration names must match the ODE left-hand sides");
  }

  DefinedFamily family;
  family.time_var = decl.argument;
  for (const auto& [lhs, rhs] : decl.ode) {
    family.names.push_back(lhs);
    family.rhs.push_back(rhs);
  }
  std::map<Identifier, Term> init;
  for (const auto& [name, value] : decl.init_assignments) {
    if (name == decl.argument) {
      family.init_time = value;
      continue;
    }
    if (!declared.count(name)) {
      throw IllFormedFamily("initial assignment for undeclared name " + name);
    }
    if (!init.emplace(name, value).second) {
      throw IllFormedFamily("duplicate initial assignment for " + name);
    }
  }
  for (const Identifier& name : family.names) {
    auto it = init.find(name);
    if (it == init.end()) {
      throw IllFormedFamily("implicit declaration omits an initial value for " + name);
    }
    family.init_values.push_back(it->second);
  }
  family.validate();
  return family;
}

std::vector<InterpretedSymbol> desugar_implicit(const ImplicitDecl& decl) {
  DefinedFamily family = family_of_implicit(decl);
  std::vector<InterpretedSymbol> symbols;
  // Registration order matches declaration order.
  for (const Identifier& name : decl.names) {
    int index = -1;
    for (size_t j = 0; j < family.names.size(); ++j) {
      if (family.names[j] == name) index = static_cast<int>(j);
    }
    symbols.push_back(family_symbol(family, index, /*builtin=*/false));
  }
  return symbols;
}

// ---------------------------------------------------------------------------
// Registry.

Registry Registry::builtins() {
  Registry registry;

  DefinedFamily trig;
  trig.names = {"sin", "cos"};
  trig.rhs = {Term::variable("cos"), Term::negate(Term::variable("sin"))};
  trig.time_var = "t";
  trig.init_values = {Term::rational(0), Term::rational(1)};
  registry.register_family(trig, /*builtin=*/true);

  DefinedFamily exp;
  exp.names = {"exp"};
  exp.rhs = {Term::variable("exp")};
  exp.time_var = "t";
  exp.init_values = {Term::rational(1)};
  registry.register_family(exp, /*builtin=*/true);

  DefinedFamily tanh;
  tanh.names = {"tanh"};
  tanh.rhs = {Term::plus(Term::rational(1),
                         Term::negate(Term::times(Term::variable("tanh"),
                                                  Term::variable("tanh"))))};
  tanh.time_var = "t";
  tanh.init_values = {Term::rational(0)};
  registry.register_family(tanh, /*builtin=*/true);

  RegistryEntry pi;
  pi.symbol = InterpretedSymbol::numeric_builtin("pi", 0);
  pi.numeric_only = true;
  registry.entries_.emplace("pi", pi);
  registry.order_.push_back("pi");

  RegistryEntry sqrt;
  sqrt.symbol = InterpretedSymbol::numeric_builtin("sqrt", 1);
  sqrt.numeric_only = true;
  registry.entries_.emplace("sqrt", sqrt);
  registry.order_.push_back("sqrt");

  return registry;
}

void Registry::register_family(const DefinedFamily& family, bool builtin) {
  family.validate();
  // Conflict scan before any mutation.
  for (size_t j = 0; j < family.names.size(); ++j) {
    auto it = entries_.find(family.names[j]);
    if (it == entries_.end()) continue;
    if (it->second.family && *it->second.family == family &&
        it->second.index == static_cast<int>(j)) {
      continue;  // identical re-declaration
    }
    bool equivalent = false;
    if (it->second.family && it->second.symbol.has_interpretation()) {
      equivalent = alpha_equivalent(it->second.symbol.interpretation(),
                                    build_interpretation(family, static_cast<int>(j)));
    }
    if (!equivalent) {
      throw ShadowingError("symbol " + family.names[j] + " is already defined");
    }
  }
  for (size_t j = 0; j < family.names.size(); ++j) {
    if (entries_.count(family.names[j])) continue;
    RegistryEntry entry;
    entry.symbol = family_symbol(family, static_cast<int>(j), builtin);
    entry.family = family;
    entry.index = static_cast<int>(j);
    entries_.emplace(family.names[j], std::move(entry));
    order_.push_back(family.names[j]);
  }
}

void Registry::register_implicit(const ImplicitDecl& decl) {
  register_family(family_of_implicit(decl), /*builtin=*/false);
}

const RegistryEntry* Registry::lookup(const Identifier& name) const {
  auto it = entries_.find(name);
  return it == entries_.end() ? nullptr : &it->second;
}

RegistryEntry* Registry::lookup_mutable(const Identifier& name) {
  auto it = entries_.find(name);
  return it == entries_.end() ? nullptr : &it->second;
}

const RegistryEntry& Registry::at(const Identifier& name) const {
  const RegistryEntry* entry = lookup(name);
  if (!entry) throw Error("unknown symbol " + name);
  return *entry;
}

std::map<Identifier, InterpretedSymbol> Registry::symbols() const {
  std::map<Identifier, InterpretedSymbol> table;
  for (const auto& [name, entry] : entries_) {
    table.emplace(name, entry.symbol);
  }
  return table;
}

}  // namespace dlimp
