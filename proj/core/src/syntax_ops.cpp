#include <algorithm>
#include <functional>

#include "dlimp/errors.hpp"
#include "dlimp/syntax.hpp"

namespace dlimp {

namespace {

void collect_term_vars(const Term& t, std::set<Identifier>& out) {
  switch (t.kind()) {
    case TermKind::Variable:
      out.insert(t.var_name());
      break;
    case TermKind::Rational:
      break;
    case TermKind::FuncApp:
      // The annotation is sealed: its placeholders are bound by application.
      for (const Term& a : t.args()) collect_term_vars(a, out);
      break;
    case TermKind::Negate:
    case TermKind::Differential:
      collect_term_vars(t.operand(), out);
      break;
    default:
      collect_term_vars(t.lhs(), out);
      collect_term_vars(t.rhs(), out);
      break;
  }
}

struct ProgramVars {
  std::set<Identifier> free;
  std::set<Identifier> bound;
  std::set<Identifier> must_bound;
};

std::set<Identifier> set_minus(const std::set<Identifier>& a,
                               const std::set<Identifier>& b) {
  std::set<Identifier> r;
  std::set_difference(a.begin(), a.end(), b.begin(), b.end(),
                      std::inserter(r, r.begin()));
  return r;
}

std::set<Identifier> set_union(const std::set<Identifier>& a,
                               const std::set<Identifier>& b) {
  std::set<Identifier> r = a;
  r.insert(b.begin(), b.end());
  return r;
}

std::set<Identifier> set_intersect(const std::set<Identifier>& a,
                                   const std::set<Identifier>& b) {
  std::set<Identifier> r;
  std::set_intersection(a.begin(), a.end(), b.begin(), b.end(),
                        std::inserter(r, r.begin()));
  return r;
}

std::set<Identifier> formula_free(const Formula& f);
ProgramVars program_vars(const HybridProgram& p);

std::set<Identifier> formula_free(const Formula& f) {
  switch (f.kind()) {
    case FormulaKind::True:
    case FormulaKind::False:
      return {};
    case FormulaKind::Compare: {
      std::set<Identifier> r;
      collect_term_vars(f.lhs_term(), r);
      collect_term_vars(f.rhs_term(), r);
      return r;
    }
    case FormulaKind::Not:
      return formula_free(f.operand());
    case FormulaKind::And:
    case FormulaKind::Or:
    case FormulaKind::Imply:
    case FormulaKind::Equiv:
      return set_union(formula_free(f.lhs()), formula_free(f.rhs()));
    case FormulaKind::Forall:
    case FormulaKind::Exists: {
      auto r = formula_free(f.body());
      r.erase(f.binder());
      return r;
    }
    case FormulaKind::Box:
    case FormulaKind::Diamond: {
      ProgramVars pv = program_vars(f.program());
      return set_union(pv.free, set_minus(formula_free(f.post()), pv.must_bound));
    }
  }
  return {};
}

ProgramVars program_vars(const HybridProgram& p) {
  switch (p.kind()) {
    case ProgramKind::Test: {
      ProgramVars r;
      r.free = formula_free(p.condition());
      return r;
    }
    case ProgramKind::Assign: {
      ProgramVars r;
      collect_term_vars(p.value(), r.free);
      r.bound = {p.var()};
      r.must_bound = {p.var()};
      return r;
    }
    case ProgramKind::AssignAny: {
      ProgramVars r;
      r.bound = {p.var()};
      r.must_bound = {p.var()};
      return r;
    }
    case ProgramKind::ODESystem: {
      ProgramVars r;
      for (const auto& [lhs, rhs] : p.equations()) {
        r.free.insert(lhs);  // initial value is read
        r.bound.insert(lhs);
        r.must_bound.insert(lhs);
        collect_term_vars(rhs, r.free);
      }
      r.free = set_union(r.free, formula_free(p.domain()));
      return r;
    }
    case ProgramKind::Choice: {
      ProgramVars a = program_vars(p.lhs());
      ProgramVars b = program_vars(p.rhs());
      ProgramVars r;
      r.free = set_union(a.free, b.free);
      r.bound = set_union(a.bound, b.bound);
      r.must_bound = set_intersect(a.must_bound, b.must_bound);
      return r;
    }
    case ProgramKind::Sequence: {
      ProgramVars a = program_vars(p.lhs());
      ProgramVars b = program_vars(p.rhs());
      ProgramVars r;
      r.free = set_union(a.free, set_minus(b.free, a.must_bound));
      r.bound = set_union(a.bound, b.bound);
      r.must_bound = set_union(a.must_bound, b.must_bound);
      return r;
    }
    case ProgramKind::Loop: {
      ProgramVars a = program_vars(p.body());
      ProgramVars r;
      r.free = a.free;
      r.bound = a.bound;
      return r;  // must-bound empty: zero iterations possible
    }
    case ProgramKind::IfThen: {
      ProgramVars a = program_vars(p.body());
      ProgramVars r;
      r.free = set_union(formula_free(p.condition()), a.free);
      r.bound = a.bound;
      return r;  // must-bound empty: skip branch binds nothing
    }
  }
  return {};
}

}  // namespace

std::set<Identifier> free_variables(const Term& term) {
  std::set<Identifier> r;
  collect_term_vars(term, r);
  return r;
}

std::set<Identifier> free_variables(const Formula& formula) {
  return formula_free(formula);
}

std::set<Identifier> free_variables(const HybridProgram& program) {
  return program_vars(program).free;
}

std::set<Identifier> bound_variables(const HybridProgram& program) {
  return program_vars(program).bound;
}

std::set<Identifier> must_bound_variables(const HybridProgram& program) {
  return program_vars(program).must_bound;
}

// ---------------------------------------------------------------------------
// all_identifiers

namespace {

void collect_all(const Term& t, std::set<Identifier>& out);
void collect_all(const Formula& f, std::set<Identifier>& out);
void collect_all(const HybridProgram& p, std::set<Identifier>& out);

void collect_all(const Term& t, std::set<Identifier>& out) {
  switch (t.kind()) {
    case TermKind::Variable:
      out.insert(t.var_name());
      break;
    case TermKind::Rational:
      break;
    case TermKind::FuncApp:
      out.insert(t.symbol().name());
      if (t.symbol().has_interpretation()) {
        collect_all(t.symbol().interpretation(), out);
      }
      for (const Term& a : t.args()) collect_all(a, out);
      break;
    case TermKind::Negate:
    case TermKind::Differential:
      collect_all(t.operand(), out);
      break;
    default:
      collect_all(t.lhs(), out);
      collect_all(t.rhs(), out);
      break;
  }
}

void collect_all(const Formula& f, std::set<Identifier>& out) {
  switch (f.kind()) {
    case FormulaKind::True:
    case FormulaKind::False:
      break;
    case FormulaKind::Compare:
      collect_all(f.lhs_term(), out);
      collect_all(f.rhs_term(), out);
      break;
    case FormulaKind::Not:
      collect_all(f.operand(), out);
      break;
    case FormulaKind::And:
    case FormulaKind::Or:
    case FormulaKind::Imply:
    case FormulaKind::Equiv:
      collect_all(f.lhs(), out);
      collect_all(f.rhs(), out);
      break;
    case FormulaKind::Forall:
    case FormulaKind::Exists:
      out.insert(f.binder());
      collect_all(f.body(), out);
      break;
    case FormulaKind::Box:
    case FormulaKind::Diamond:
      collect_all(f.program(), out);
      collect_all(f.post(), out);
      break;
  }
}

void collect_all(const HybridProgram& p, std::set<Identifier>& out) {
  switch (p.kind()) {
    case ProgramKind::Test:
      collect_all(p.condition(), out);
      break;
    case ProgramKind::Assign:
      out.insert(p.var());
      collect_all(p.value(), out);
      break;
    case ProgramKind::AssignAny:
      out.insert(p.var());
      break;
    case ProgramKind::ODESystem:
      for (const auto& [lhs, rhs] : p.equations()) {
        out.insert(lhs);
        collect_all(rhs, out);
      }
      collect_all(p.domain(), out);
      break;
    case ProgramKind::Choice:
    case ProgramKind::Sequence:
      collect_all(p.lhs(), out);
      collect_all(p.rhs(), out);
      break;
    case ProgramKind::Loop:
      collect_all(p.body(), out);
      break;
    case ProgramKind::IfThen:
      collect_all(p.condition(), out);
      collect_all(p.body(), out);
      break;
  }
}

}  // namespace

std::set<Identifier> all_identifiers(const Term& term) {
  std::set<Identifier> r;
  collect_all(term, r);
  return r;
}
std::set<Identifier> all_identifiers(const Formula& formula) {
  std::set<Identifier> r;
  collect_all(formula, r);
  return r;
}
std::set<Identifier> all_identifiers(const HybridProgram& program) {
  std::set<Identifier> r;
  collect_all(program, r);
  return r;
}

// ---------------------------------------------------------------------------
// Substitution.

namespace {

Substitution restrict_to(const Substitution& sigma, const std::set<Identifier>& keep) {
  Substitution r;
  for (const auto& [k, v] : sigma) {
    if (keep.count(k)) r.emplace(k, v);
  }
  return r;
}

Term subst_term(const Term& t, const Substitution& sigma) {
  if (sigma.empty()) return t;
  switch (t.kind()) {
    case TermKind::Variable: {
      auto it = sigma.find(t.var_name());
      return it == sigma.end() ? t : it->second;
    }
    case TermKind::Rational:
      return t;
    case TermKind::Plus:
      return Term::plus(subst_term(t.lhs(), sigma), subst_term(t.rhs(), sigma));
    case TermKind::Times:
      return Term::times(subst_term(t.lhs(), sigma), subst_term(t.rhs(), sigma));
    case TermKind::Divide:
      return Term::divide(subst_term(t.lhs(), sigma), subst_term(t.rhs(), sigma));
    case TermKind::Negate:
      return Term::negate(subst_term(t.operand(), sigma));
    case TermKind::Differential:
      return Term::differential(subst_term(t.operand(), sigma));
    case TermKind::FuncApp: {
      std::vector<Term> args;
      args.reserve(t.args().size());
      for (const Term& a : t.args()) args.push_back(subst_term(a, sigma));
      return Term::func_app(t.symbol(), std::move(args));
    }
  }
  return t;
}

Formula subst_formula(const Formula& f, const Substitution& sigma);
HybridProgram subst_program(const HybridProgram& p, const Substitution& sigma);

void check_modality_clash(const HybridProgram& prog, const Substitution& sigma,
                          const std::set<Identifier>& relevant_free) {
  std::set<Identifier> bv = bound_variables(prog);
  for (const auto& [var, replacement] : sigma) {
    if (!relevant_free.count(var)) continue;
    if (bv.count(var)) {
      throw CaptureError("substituted variable " + var +
                         " is bound by the program; rename first");
    }
    for (const Identifier& fv : free_variables(replacement)) {
      if (bv.count(fv)) {
        throw CaptureError("replacement for " + var + " mentions " + fv +
                           " which the program binds; rename first");
      }
    }
  }
}

Formula subst_formula(const Formula& f, const Substitution& sigma) {
  if (sigma.empty()) return f;
  switch (f.kind()) {
    case FormulaKind::True:
    case FormulaKind::False:
      return f;
    case FormulaKind::Compare:
      return Formula::compare(f.op(), subst_term(f.lhs_term(), sigma),
                              subst_term(f.rhs_term(), sigma));
    case FormulaKind::Not:
      return Formula::negation(subst_formula(f.operand(), sigma));
    case FormulaKind::And:
      return Formula::conj(subst_formula(f.lhs(), sigma), subst_formula(f.rhs(), sigma));
    case FormulaKind::Or:
      return Formula::disj(subst_formula(f.lhs(), sigma), subst_formula(f.rhs(), sigma));
    case FormulaKind::Imply:
      return Formula::imply(subst_formula(f.lhs(), sigma), subst_formula(f.rhs(), sigma));
    case FormulaKind::Equiv:
      return Formula::equiv(subst_formula(f.lhs(), sigma), subst_formula(f.rhs(), sigma));
    case FormulaKind::Forall:
    case FormulaKind::Exists: {
      Substitution inner = sigma;
      inner.erase(f.binder());
      Substitution active = restrict_to(inner, free_variables(f.body()));
      for (const auto& [var, replacement] : active) {
        if (free_variables(replacement).count(f.binder())) {
          throw CaptureError("replacement for " + var + " would be captured by binder " +
                             f.binder());
        }
      }
      Formula body = subst_formula(f.body(), active);
      return f.kind() == FormulaKind::Forall ? Formula::forall(f.binder(), body)
                                             : Formula::exists(f.binder(), body);
    }
    case FormulaKind::Box:
    case FormulaKind::Diamond: {
      Substitution active = restrict_to(sigma, free_variables(f));
      if (active.empty()) return f;
      check_modality_clash(f.program(), active, free_variables(f));
      HybridProgram prog = subst_program(f.program(), active);
      Formula post = subst_formula(f.post(), active);
      return f.kind() == FormulaKind::Box ? Formula::box(prog, post)
                                          : Formula::diamond(prog, post);
    }
  }
  return f;
}

HybridProgram subst_program(const HybridProgram& p, const Substitution& sigma) {
  if (sigma.empty()) return p;
  switch (p.kind()) {
    case ProgramKind::Test:
      return HybridProgram::test(subst_formula(p.condition(), sigma));
    case ProgramKind::Assign:
      return HybridProgram::assign(p.var(), subst_term(p.value(), sigma));
    case ProgramKind::AssignAny:
      return p;
    case ProgramKind::ODESystem: {
      std::vector<OdeEquation> eqs;
      eqs.reserve(p.equations().size());
      for (const auto& [lhs, rhs] : p.equations()) {
        eqs.emplace_back(lhs, subst_term(rhs, sigma));
      }
      return HybridProgram::ode(std::move(eqs), subst_formula(p.domain(), sigma));
    }
    case ProgramKind::Choice:
      return HybridProgram::choice(subst_program(p.lhs(), sigma),
                                   subst_program(p.rhs(), sigma));
    case ProgramKind::Sequence:
      return HybridProgram::sequence(subst_program(p.lhs(), sigma),
                                     subst_program(p.rhs(), sigma));
    case ProgramKind::Loop:
      return HybridProgram::loop(subst_program(p.body(), sigma));
    case ProgramKind::IfThen:
      return HybridProgram::if_then(subst_formula(p.condition(), sigma),
                                    subst_program(p.body(), sigma));
  }
  return p;
}

}  // namespace

Term substitute(const Term& term, const Substitution& sigma) {
  return subst_term(term, sigma);
}

Formula substitute(const Formula& formula, const Substitution& sigma) {
  return subst_formula(formula, sigma);
}

HybridProgram substitute(const HybridProgram& program, const Substitution& sigma) {
  check_modality_clash(program, sigma, free_variables(program));
  return subst_program(program, sigma);
}

// ---------------------------------------------------------------------------
// Alpha renaming.

namespace {

// Blanket identifier rename inside a subtree where `old` is known bound.
Term rename_all(const Term& t, const Identifier& old, const Identifier& fresh);
Formula rename_all(const Formula& f, const Identifier& old, const Identifier& fresh);
HybridProgram rename_all(const HybridProgram& p, const Identifier& old,
                         const Identifier& fresh);

Term rename_all(const Term& t, const Identifier& old, const Identifier& fresh) {
  Substitution sigma{{old, Term::variable(fresh)}};
  return subst_term(t, sigma);
}

HybridProgram rename_all(const HybridProgram& p, const Identifier& old,
                         const Identifier& fresh) {
  switch (p.kind()) {
    case ProgramKind::Test:
      return HybridProgram::test(rename_all(p.condition(), old, fresh));
    case ProgramKind::Assign:
      return HybridProgram::assign(p.var() == old ? fresh : p.var(),
                                   rename_all(p.value(), old, fresh));
    case ProgramKind::AssignAny:
      return HybridProgram::assign_any(p.var() == old ? fresh : p.var());
    case ProgramKind::ODESystem: {
      std::vector<OdeEquation> eqs;
      for (const auto& [lhs, rhs] : p.equations()) {
        eqs.emplace_back(lhs == old ? fresh : lhs, rename_all(rhs, old, fresh));
      }
      return HybridProgram::ode(std::move(eqs), rename_all(p.domain(), old, fresh));
    }
    case ProgramKind::Choice:
      return HybridProgram::choice(rename_all(p.lhs(), old, fresh),
                                   rename_all(p.rhs(), old, fresh));
    case ProgramKind::Sequence:
      return HybridProgram::sequence(rename_all(p.lhs(), old, fresh),
                                     rename_all(p.rhs(), old, fresh));
    case ProgramKind::Loop:
      return HybridProgram::loop(rename_all(p.body(), old, fresh));
    case ProgramKind::IfThen:
      return HybridProgram::if_then(rename_all(p.condition(), old, fresh),
                                    rename_all(p.body(), old, fresh));
  }
  return p;
}

Formula rename_all(const Formula& f, const Identifier& old, const Identifier& fresh) {
  switch (f.kind()) {
    case FormulaKind::True:
    case FormulaKind::False:
      return f;
    case FormulaKind::Compare:
      return Formula::compare(f.op(), rename_all(f.lhs_term(), old, fresh),
                              rename_all(f.rhs_term(), old, fresh));
    case FormulaKind::Not:
      return Formula::negation(rename_all(f.operand(), old, fresh));
    case FormulaKind::And:
      return Formula::conj(rename_all(f.lhs(), old, fresh), rename_all(f.rhs(), old, fresh));
    case FormulaKind::Or:
      return Formula::disj(rename_all(f.lhs(), old, fresh), rename_all(f.rhs(), old, fresh));
    case FormulaKind::Imply:
      return Formula::imply(rename_all(f.lhs(), old, fresh), rename_all(f.rhs(), old, fresh));
    case FormulaKind::Equiv:
      return Formula::equiv(rename_all(f.lhs(), old, fresh), rename_all(f.rhs(), old, fresh));
    case FormulaKind::Forall:
      return Formula::forall(f.binder() == old ? fresh : f.binder(),
                             rename_all(f.body(), old, fresh));
    case FormulaKind::Exists:
      return Formula::exists(f.binder() == old ? fresh : f.binder(),
                             rename_all(f.body(), old, fresh));
    case FormulaKind::Box:
      return Formula::box(rename_all(f.program(), old, fresh),
                          rename_all(f.post(), old, fresh));
    case FormulaKind::Diamond:
      return Formula::diamond(rename_all(f.program(), old, fresh),
                              rename_all(f.post(), old, fresh));
  }
  return f;
}

}  // namespace

// The program-scope renaming above is subtle to write statement-by-statement;
// for the Eq.-3 shapes and quantifier cases the package needs, renaming a
// variable that is bound (and never free) inside the scope is a blanket
// rename. alpha_rename validates exactly that situation and delegates.
Formula alpha_rename(const Formula& formula, const Identifier& old,
                     const Identifier& fresh) {
  std::set<Identifier> occurring = all_identifiers(formula);
  if (occurring.count(fresh)) {
    throw FreshnessError("identifier " + fresh + " already occurs in the formula");
  }
  if (!occurring.count(old)) return formula;

  switch (formula.kind()) {
    case FormulaKind::Forall:
    case FormulaKind::Exists: {
      if (formula.binder() == old) {
        Formula body = rename_all(formula.body(), old, fresh);
        return formula.kind() == FormulaKind::Forall ? Formula::forall(fresh, body)
                                                     : Formula::exists(fresh, body);
      }
      break;
    }
    default:
      break;
  }

  // General case: `old` must occur only bound (otherwise renaming would
  // change meaning); then the blanket rename is alpha-correct.
  if (free_variables(formula).count(old)) {
    throw Error("identifier " + old +
                " occurs free; binder rename would change meaning");
  }
  return rename_all(formula, old, fresh);
}

// ---------------------------------------------------------------------------
// Alpha equivalence.

namespace {

struct AlphaEnv {
  std::map<Identifier, Identifier> fwd;
  std::map<Identifier, Identifier> bwd;

  bool pair(const Identifier& a, const Identifier& b) {
    auto fi = fwd.find(a);
    auto bi = bwd.find(b);
    if (fi == fwd.end() && bi == bwd.end()) {
      fwd[a] = b;
      bwd[b] = a;
      return true;
    }
    return fi != fwd.end() && fi->second == b && bi != bwd.end() && bi->second == a;
  }

  bool match(const Identifier& a, const Identifier& b) const {
    auto fi = fwd.find(a);
    auto bi = bwd.find(b);
    if (fi != fwd.end()) return fi->second == b && bi != bwd.end() && bi->second == a;
    if (bi != bwd.end()) return false;
    return a == b;  // both free
  }
};

bool alpha_term(const Term& a, const Term& b, const AlphaEnv& env);
bool alpha_formula(const Formula& a, const Formula& b, AlphaEnv env);
bool alpha_program(const HybridProgram& a, const HybridProgram& b, AlphaEnv& env);

bool alpha_term(const Term& a, const Term& b, const AlphaEnv& env) {
  if (a.kind() != b.kind()) return false;
  switch (a.kind()) {
    case TermKind::Variable:
      return env.match(a.var_name(), b.var_name());
    case TermKind::Rational:
      return a.rational_value() == b.rational_value();
    case TermKind::FuncApp: {
      if (a.symbol().name() != b.symbol().name() ||
          a.symbol().arity() != b.symbol().arity()) {
        return false;
      }
      if (a.symbol().has_interpretation() != b.symbol().has_interpretation()) return false;
      if (a.symbol().has_interpretation() &&
          !alpha_formula(a.symbol().interpretation(), b.symbol().interpretation(), {})) {
        return false;
      }
      for (size_t i = 0; i < a.args().size(); ++i) {
        if (!alpha_term(a.args()[i], b.args()[i], env)) return false;
      }
      return true;
    }
    case TermKind::Negate:
    case TermKind::Differential:
      return alpha_term(a.operand(), b.operand(), env);
    default:
      return alpha_term(a.lhs(), b.lhs(), env) && alpha_term(a.rhs(), b.rhs(), env);
  }
}

bool alpha_program(const HybridProgram& a, const HybridProgram& b, AlphaEnv& env) {
  if (a.kind() != b.kind()) return false;
  switch (a.kind()) {
    case ProgramKind::Test:
      return alpha_formula(a.condition(), b.condition(), env);
    case ProgramKind::Assign:
      if (!alpha_term(a.value(), b.value(), env)) return false;
      return env.pair(a.var(), b.var());
    case ProgramKind::AssignAny:
      return env.pair(a.var(), b.var());
    case ProgramKind::ODESystem: {
      if (a.equations().size() != b.equations().size()) return false;
      for (size_t i = 0; i < a.equations().size(); ++i) {
        if (!env.pair(a.equations()[i].first, b.equations()[i].first)) return false;
      }
      for (size_t i = 0; i < a.equations().size(); ++i) {
        if (!alpha_term(a.equations()[i].second, b.equations()[i].second, env)) return false;
      }
      return alpha_formula(a.domain(), b.domain(), env);
    }
    case ProgramKind::Sequence: {
      return alpha_program(a.lhs(), b.lhs(), env) && alpha_program(a.rhs(), b.rhs(), env);
    }
    case ProgramKind::Choice: {
      AlphaEnv left = env;
      AlphaEnv right = env;
      if (!alpha_program(a.lhs(), b.lhs(), left)) return false;
      if (!alpha_program(a.rhs(), b.rhs(), right)) return false;
      // Propagate only pairs established identically in both branches.
      AlphaEnv merged = env;
      for (const auto& [k, v] : left.fwd) {
        auto it = right.fwd.find(k);
        if (it != right.fwd.end() && it->second == v) {
          merged.fwd[k] = v;
          merged.bwd[v] = k;
        }
      }
      env = merged;
      return true;
    }
    case ProgramKind::Loop: {
      AlphaEnv inner = env;
      if (!alpha_program(a.body(), b.body(), inner)) return false;
      // Bindings escaping a loop must already be consistent with entry.
      for (const auto& [k, v] : inner.fwd) {
        auto it = env.fwd.find(k);
        if (it == env.fwd.end()) {
          if (k != v) return false;
        } else if (it->second != v) {
          return false;
        }
      }
      return true;
    }
    case ProgramKind::IfThen: {
      if (!alpha_formula(a.condition(), b.condition(), env)) return false;
      AlphaEnv inner = env;
      if (!alpha_program(a.body(), b.body(), inner)) return false;
      for (const auto& [k, v] : inner.fwd) {
        auto it = env.fwd.find(k);
        if (it == env.fwd.end()) {
          if (k != v) return false;
        } else if (it->second != v) {
          return false;
        }
      }
      return true;
    }
  }
  return false;
}

bool alpha_formula(const Formula& a, const Formula& b, AlphaEnv env) {
  if (a.kind() != b.kind()) return false;
  switch (a.kind()) {
    case FormulaKind::True:
    case FormulaKind::False:
      return true;
    case FormulaKind::Compare:
      return a.op() == b.op() && alpha_term(a.lhs_term(), b.lhs_term(), env) &&
             alpha_term(a.rhs_term(), b.rhs_term(), env);
    case FormulaKind::Not:
      return alpha_formula(a.operand(), b.operand(), env);
    case FormulaKind::And:
    case FormulaKind::Or:
    case FormulaKind::Imply:
    case FormulaKind::Equiv:
      return alpha_formula(a.lhs(), b.lhs(), env) && alpha_formula(a.rhs(), b.rhs(), env);
    case FormulaKind::Forall:
    case FormulaKind::Exists: {
      AlphaEnv inner = env;
      if (!inner.pair(a.binder(), b.binder())) return false;
      return alpha_formula(a.body(), b.body(), inner);
    }
    case FormulaKind::Box:
    case FormulaKind::Diamond: {
      AlphaEnv inner = env;
      if (!alpha_program(a.program(), b.program(), inner)) return false;
      return alpha_formula(a.post(), b.post(), inner);
    }
  }
  return false;
}

}  // namespace

bool alpha_equivalent(const Formula& a, const Formula& b) {
  return alpha_formula(a, b, {});
}

// ---------------------------------------------------------------------------
// IfThen desugaring.

HybridProgram desugar_if(const HybridProgram& program) {
  switch (program.kind()) {
    case ProgramKind::Test:
      return HybridProgram::test(desugar_if(program.condition()));
    case ProgramKind::Assign:
    case ProgramKind::AssignAny:
    case ProgramKind::ODESystem:
      return program;
    case ProgramKind::Choice:
      return HybridProgram::choice(desugar_if(program.lhs()), desugar_if(program.rhs()));
    case ProgramKind::Sequence:
      return HybridProgram::sequence(desugar_if(program.lhs()), desugar_if(program.rhs()));
    case ProgramKind::Loop:
      return HybridProgram::loop(desugar_if(program.body()));
    case ProgramKind::IfThen: {
      Formula cond = desugar_if(program.condition());
      HybridProgram body = desugar_if(program.body());
      return HybridProgram::choice(
          HybridProgram::sequence(HybridProgram::test(cond), body),
          HybridProgram::test(Formula::negation(cond)));
    }
  }
  return program;
}

Formula desugar_if(const Formula& formula) {
  switch (formula.kind()) {
    case FormulaKind::True:
    case FormulaKind::False:
    case FormulaKind::Compare:
      return formula;
    case FormulaKind::Not:
      return Formula::negation(desugar_if(formula.operand()));
    case FormulaKind::And:
      return Formula::conj(desugar_if(formula.lhs()), desugar_if(formula.rhs()));
    case FormulaKind::Or:
      return Formula::disj(desugar_if(formula.lhs()), desugar_if(formula.rhs()));
    case FormulaKind::Imply:
      return Formula::imply(desugar_if(formula.lhs()), desugar_if(formula.rhs()));
    case FormulaKind::Equiv:
      return Formula::equiv(desugar_if(formula.lhs()), desugar_if(formula.rhs()));
    case FormulaKind::Forall:
      return Formula::forall(formula.binder(), desugar_if(formula.body()));
    case FormulaKind::Exists:
      return Formula::exists(formula.binder(), desugar_if(formula.body()));
    case FormulaKind::Box:
      return Formula::box(desugar_if(formula.program()), desugar_if(formula.post()));
    case FormulaKind::Diamond:
      return Formula::diamond(desugar_if(formula.program()), desugar_if(formula.post()));
  }
  return formula;
}

// ---------------------------------------------------------------------------
// Constant folding.

Term fold_constants(const Term& term) {
  auto as_rational = [](const Term& t) -> const Rational* {
    return t.kind() == TermKind::Rational ? &t.rational_value() : nullptr;
  };
  switch (term.kind()) {
    case TermKind::Variable:
    case TermKind::Rational:
      return term;
    case TermKind::Plus: {
      Term a = fold_constants(term.lhs());
      Term b = fold_constants(term.rhs());
      const Rational* ra = as_rational(a);
      const Rational* rb = as_rational(b);
      if (ra && rb) return Term::rational(*ra + *rb);
      if (ra && ra->is_zero()) return b;
      if (rb && rb->is_zero()) return a;
      return Term::plus(a, b);
    }
    case TermKind::Times: {
      Term a = fold_constants(term.lhs());
      Term b = fold_constants(term.rhs());
      const Rational* ra = as_rational(a);
      const Rational* rb = as_rational(b);
      if (ra && rb) return Term::rational(*ra * *rb);
      if ((ra && ra->is_zero()) || (rb && rb->is_zero())) return Term::rational(0);
      if (ra && *ra == Rational(1)) return b;
      if (rb && *rb == Rational(1)) return a;
      return Term::times(a, b);
    }
    case TermKind::Divide: {
      Term a = fold_constants(term.lhs());
      Term b = fold_constants(term.rhs());
      const Rational* ra = as_rational(a);
      const Rational* rb = as_rational(b);
      if (ra && rb && !rb->is_zero()) return Term::rational(*ra / *rb);
      if (rb && *rb == Rational(1)) return a;
      return Term::divide(a, b);
    }
    case TermKind::Negate: {
      Term a = fold_constants(term.operand());
      if (const Rational* ra = as_rational(a)) return Term::rational(-*ra);
      if (a.kind() == TermKind::Negate) return a.operand();
      return Term::negate(a);
    }
    case TermKind::Differential:
      return Term::differential(fold_constants(term.operand()));
    case TermKind::FuncApp: {
      std::vector<Term> args;
      args.reserve(term.args().size());
      for (const Term& a : term.args()) args.push_back(fold_constants(a));
      return Term::func_app(term.symbol(), std::move(args));
    }
  }
  return term;
}

Formula fold_constants(const Formula& formula) {
  switch (formula.kind()) {
    case FormulaKind::Compare:
      return Formula::compare(formula.op(), fold_constants(formula.lhs_term()),
                              fold_constants(formula.rhs_term()));
    case FormulaKind::Not:
      return Formula::negation(fold_constants(formula.operand()));
    case FormulaKind::And:
      return Formula::conj(fold_constants(formula.lhs()), fold_constants(formula.rhs()));
    case FormulaKind::Or:
      return Formula::disj(fold_constants(formula.lhs()), fold_constants(formula.rhs()));
    case FormulaKind::Imply:
      return Formula::imply(fold_constants(formula.lhs()), fold_constants(formula.rhs()));
    case FormulaKind::Equiv:
      return Formula::equiv(fold_constants(formula.lhs()), fold_constants(formula.rhs()));
    case FormulaKind::Forall:
      return Formula::forall(formula.binder(), fold_constants(formula.body()));
    case FormulaKind::Exists:
      return Formula::exists(formula.binder(), fold_constants(formula.body()));
    default:
      return formula;  // truth constants and modalities left as-is
  }
}

Identifier fresh_identifier(const Identifier& base, const std::set<Identifier>& used) {
  if (!used.count(base)) return base;
  for (int i = 1;; ++i) {
    Identifier candidate = base + std::to_string(i);
    if (!used.count(candidate)) return candidate;
  }
}

}  // namespace dlimp
