#include "dlimp/lemmas.hpp"

#include <cmath>
#include <sstream>

#include "dlimp/diff.hpp"
#include "dlimp/errors.hpp"
#include "dlimp/printer.hpp"

namespace dlimp {

const char* fact_kind_name(FactKind kind) {
  switch (kind) {
    case FactKind::InitialValue: return "InitialValue";
    case FactKind::DifferentialAxiom: return "DifferentialAxiom";
    case FactKind::UnfoldBase: return "UnfoldBase";
    case FactKind::UnfoldStep: return "UnfoldStep";
    case FactKind::Abstracted: return "Abstracted";
  }
  return "?";
}

const char* verdict_name(Verdict verdict) {
  switch (verdict) {
    case Verdict::Pass: return "pass";
    case Verdict::Fail: return "fail";
    case Verdict::Unknown: return "unknown";
    case Verdict::NotChecked: return "not-checked";
  }
  return "?";
}

namespace {

const RegistryEntry& certified_entry(const Registry& registry,
                                     const Identifier& symbol) {
  const RegistryEntry& entry = registry.at(symbol);
  if (entry.numeric_only) {
    throw NoCertificateError("symbol " + symbol + " is numeric-only");
  }
  if (!entry.family) {
    throw NoCertificateError("symbol " + symbol + " has no defining family");
  }
  if (!entry.certificate) {
    throw NoCertificateError("symbol " + symbol + " has no existence certificate" +
                             (entry.refusal_reason.empty()
                                  ? ""
                                  : " (" + entry.refusal_reason + ")"));
  }
  return entry;
}

}  // namespace

Fact initial_value_lemma(const Registry& registry, Oracle& oracle,
                         const Identifier& symbol) {
  const RegistryEntry& entry = certified_entry(registry, symbol);
  const DefinedFamily& family = *entry.family;

  Term lhs = Term::func_app(entry.symbol, {family.init_time});
  const Term& rhs = family.init_values[entry.index];

  Fact fact;
  fact.name = symbol + "_initial_value";
  fact.kind = FactKind::InitialValue;
  fact.statement = Formula::compare(CompareOp::Eq, lhs, rhs);
  fact.provenance = "family " + family.names[0];
  fact.assumed = entry.certificate->assumed();

  try {
    double evaluated = oracle.eval_term(lhs, {});
    double expected = eval_exact(rhs)->to_double();
    double error = std::abs(evaluated - expected);
    fact.verdict = error <= 1e-9 ? Verdict::Pass : Verdict::Fail;
    std::ostringstream detail;
    detail << "|" << print(lhs) << " - " << print(rhs) << "| = " << error;
    fact.detail = detail.str();
  } catch (const Error& e) {
    fact.verdict = Verdict::Unknown;
    fact.detail = e.what();
  }
  return fact;
}

Fact differential_axiom(const Registry& registry, Oracle& oracle,
                        const Identifier& symbol) {
  const RegistryEntry& entry = certified_entry(registry, symbol);
  const DefinedFamily& family = *entry.family;

  std::set<Identifier> used(family.names.begin(), family.names.end());
  used.insert(family.time_var);
  Identifier arg = fresh_identifier("e", used);
  Term argument = Term::variable(arg);

  // Raises UnregisteredCoordinate if a family member lacks a symbol.
  Term outer = family_rhs_in_functions(family, entry.index, argument, registry);

  Term lhs = Term::differential(Term::func_app(entry.symbol, {argument}));
  Term rhs = Term::times(outer, Term::differential(argument));

  Fact fact;
  fact.name = symbol + "_differential_axiom";
  fact.kind = FactKind::DifferentialAxiom;
  fact.statement = Formula::compare(CompareOp::Eq, lhs, rhs);
  fact.provenance = "family " + family.names[0];
  fact.assumed = entry.certificate->assumed();

  // Central finite differences against the oracle evaluation of h_i.
  const int points = 100;
  const double lo = -5.0, hi = 5.0, step = 1e-4, tolerance = 1e-5;
  double worst = 0;
  int unverifiable = 0;
  bool failed = false;
  for (int k = 0; k < points; ++k) {
    double t = lo + (hi - lo) * (k + 0.5) / points;
    try {
      double plus = oracle.eval_function(symbol, t + step);
      double minus = oracle.eval_function(symbol, t - step);
      double derivative = (plus - minus) / (2 * step);
      State state{{arg, t}, {arg + "'", 1.0}};
      double axiom_value = oracle.eval_term(rhs, state);
      double error = std::abs(derivative - axiom_value);
      worst = std::max(worst, error);
      if (error > tolerance) failed = true;
    } catch (const Error&) {
      ++unverifiable;
    }
  }
  std::ostringstream detail;
  detail << "max central-difference error " << worst << " over " << points - unverifiable
         << " points";
  if (unverifiable > 0) detail << " (" << unverifiable << " unverifiable)";
  fact.detail = detail.str();
  fact.verdict = failed            ? Verdict::Fail
                 : unverifiable > 0 ? Verdict::Unknown
                                    : Verdict::Pass;
  return fact;
}

std::pair<Fact, Fact> differential_unfold(const Formula& goal, const Identifier& pivot,
                                          const Term& base) {
  if (!free_variables(goal).count(pivot)) {
    throw PivotNotFree("pivot " + pivot + " is not free in the goal");
  }
  if (!eval_exact(base)) {
    throw Error("unfold base value must be a closed exact term");
  }

  Fact base_fact;
  base_fact.name = "unfold_base";
  base_fact.kind = FactKind::UnfoldBase;
  base_fact.statement = fold_constants(substitute(goal, {{pivot, base}}));
  base_fact.provenance = "differential unfolding at " + pivot;

  std::set<Identifier> used = all_identifiers(goal);
  used.insert(pivot);
  Identifier v = fresh_identifier("v", used);
  Formula goal_v = substitute(goal, {{pivot, Term::variable(v)}});

  HybridProgram forward = HybridProgram::ode(
      {{v, Term::rational(1)}},
      Formula::compare(CompareOp::Le, Term::variable(v), Term::variable(pivot)));
  HybridProgram backward = HybridProgram::ode(
      {{v, Term::rational(-1)}},
      Formula::compare(CompareOp::Ge, Term::variable(v), Term::variable(pivot)));

  Fact step_fact;
  step_fact.name = "unfold_step";
  step_fact.kind = FactKind::UnfoldStep;
  step_fact.statement = Formula::imply(
      goal_v, Formula::box(HybridProgram::choice(forward, backward), goal_v));
  step_fact.provenance = "differential unfolding at " + pivot;

  return {base_fact, step_fact};
}

// ---------------------------------------------------------------------------
// Function abstraction.

namespace {

bool term_contains(const Term& haystack, const Term& needle) {
  if (haystack == needle) return true;
  switch (haystack.kind()) {
    case TermKind::Variable:
    case TermKind::Rational:
      return false;
    case TermKind::Negate:
    case TermKind::Differential:
      return term_contains(haystack.operand(), needle);
    case TermKind::FuncApp: {
      for (const Term& a : haystack.args()) {
        if (term_contains(a, needle)) return true;
      }
      return false;
    }
    default:
      return term_contains(haystack.lhs(), needle) ||
             term_contains(haystack.rhs(), needle);
  }
}

bool formula_contains(const Formula& f, const Term& needle) {
  switch (f.kind()) {
    case FormulaKind::True:
    case FormulaKind::False:
      return false;
    case FormulaKind::Compare:
      return term_contains(f.lhs_term(), needle) || term_contains(f.rhs_term(), needle);
    case FormulaKind::Not:
      return formula_contains(f.operand(), needle);
    case FormulaKind::Forall:
    case FormulaKind::Exists:
      return formula_contains(f.body(), needle);
    case FormulaKind::Box:
    case FormulaKind::Diamond:
      return formula_contains(f.post(), needle);  // targets in programs unsupported
    default:
      return formula_contains(f.lhs(), needle) || formula_contains(f.rhs(), needle);
  }
}

Term replace_term(const Term& haystack, const Term& needle, const Term& replacement) {
  if (haystack == needle) return replacement;
  switch (haystack.kind()) {
    case TermKind::Variable:
    case TermKind::Rational:
      return haystack;
    case TermKind::Negate:
      return Term::negate(replace_term(haystack.operand(), needle, replacement));
    case TermKind::Differential:
      return Term::differential(replace_term(haystack.operand(), needle, replacement));
    case TermKind::Plus:
      return Term::plus(replace_term(haystack.lhs(), needle, replacement),
                        replace_term(haystack.rhs(), needle, replacement));
    case TermKind::Times:
      return Term::times(replace_term(haystack.lhs(), needle, replacement),
                         replace_term(haystack.rhs(), needle, replacement));
    case TermKind::Divide:
      return Term::divide(replace_term(haystack.lhs(), needle, replacement),
                          replace_term(haystack.rhs(), needle, replacement));
    case TermKind::FuncApp: {
      std::vector<Term> args;
      for (const Term& a : haystack.args()) {
        args.push_back(replace_term(a, needle, replacement));
      }
      return Term::func_app(haystack.symbol(), std::move(args));
    }
  }
  return haystack;
}

Formula replace_in_formula(const Formula& f, const Term& needle,
                           const Term& replacement) {
  switch (f.kind()) {
    case FormulaKind::True:
    case FormulaKind::False:
      return f;
    case FormulaKind::Compare:
      return Formula::compare(f.op(), replace_term(f.lhs_term(), needle, replacement),
                              replace_term(f.rhs_term(), needle, replacement));
    case FormulaKind::Not:
      return Formula::negation(replace_in_formula(f.operand(), needle, replacement));
    case FormulaKind::And:
      return Formula::conj(replace_in_formula(f.lhs(), needle, replacement),
                           replace_in_formula(f.rhs(), needle, replacement));
    case FormulaKind::Or:
      return Formula::disj(replace_in_formula(f.lhs(), needle, replacement),
                           replace_in_formula(f.rhs(), needle, replacement));
    case FormulaKind::Imply:
      return Formula::imply(replace_in_formula(f.lhs(), needle, replacement),
                            replace_in_formula(f.rhs(), needle, replacement));
    case FormulaKind::Equiv:
      return Formula::equiv(replace_in_formula(f.lhs(), needle, replacement),
                            replace_in_formula(f.rhs(), needle, replacement));
    case FormulaKind::Forall:
      return Formula::forall(f.binder(),
                             replace_in_formula(f.body(), needle, replacement));
    case FormulaKind::Exists:
      return Formula::exists(f.binder(),
                             replace_in_formula(f.body(), needle, replacement));
    case FormulaKind::Box:
    case FormulaKind::Diamond:
      return f;  // cannot abstract inside programs
  }
  return f;
}

std::string short_hash(const std::string& text) {
  std::size_t h = std::hash<std::string>{}(text);
  std::ostringstream out;
  out << std::hex << (h & 0xffff);
  return out.str();
}

std::vector<std::pair<Term, Identifier>> assign_names(
    const Formula& goal, const std::vector<Term>& targets,
    const std::vector<Fact>& bounds) {
  // Distinct target classes in first-occurrence order.
  std::vector<Term> classes;
  for (const Term& t : targets) {
    bool seen = false;
    for (const Term& c : classes) {
      if (c == t) seen = true;
    }
    if (!seen) classes.push_back(t);
  }

  std::set<Identifier> used = all_identifiers(goal);
  for (const Fact& bound : bounds) {
    for (const Identifier& id : all_identifiers(bound.statement)) used.insert(id);
  }

  std::vector<std::pair<Term, Identifier>> names;
  for (const Term& target : classes) {
    if (target.kind() != TermKind::FuncApp) {
      throw TargetNotFound("abstraction target must be a function application");
    }
    std::string base(1, target.symbol().name()[0]);

    // Sibling classes sharing the symbol force a distinguishing suffix.
    std::vector<const Term*> siblings;
    for (const Term& other : classes) {
      if (!(other == target) && other.kind() == TermKind::FuncApp &&
          other.symbol().name() == target.symbol().name()) {
        siblings.push_back(&other);
      }
    }
    std::string name = base;
    if (!siblings.empty()) {
      std::set<Identifier> own;
      for (const Term& a : target.args()) {
        for (const Identifier& v : free_variables(a)) own.insert(v);
      }
      std::set<Identifier> shared;
      for (const Term* sibling : siblings) {
        for (const Term& a : sibling->args()) {
          for (const Identifier& v : free_variables(a)) shared.insert(v);
        }
      }
      Identifier distinguishing;
      for (const Identifier& v : own) {
        if (!shared.count(v)) {
          distinguishing = v;
          break;
        }
      }
      if (distinguishing.empty()) {
        distinguishing = short_hash(print(target));
      }
      name = base + "_" + distinguishing;
    }
    Identifier fresh = fresh_identifier(name, used);
    used.insert(fresh);
    names.emplace_back(target, fresh);
  }
  return names;
}

}  // namespace

Fact abstract_functions(const Formula& goal, const std::vector<Term>& targets,
                        const std::vector<Fact>& bounds) {
  for (const Term& target : targets) {
    if (!formula_contains(goal, target)) {
      throw TargetNotFound("target " + print(target) + " does not occur in the goal");
    }
  }
  auto names = assign_names(goal, targets, bounds);

  Formula translated = goal;
  std::vector<Formula> translated_bounds;
  for (const Fact& bound : bounds) translated_bounds.push_back(bound.statement);
  for (const auto& [target, fresh] : names) {
    Term fresh_var = Term::variable(fresh);
    translated = replace_in_formula(translated, target, fresh_var);
    for (Formula& b : translated_bounds) {
      b = replace_in_formula(b, target, fresh_var);
    }
  }

  Formula statement = translated;
  if (!translated_bounds.empty()) {
    Formula hypothesis = translated_bounds.back();
    for (size_t i = translated_bounds.size() - 1; i-- > 0;) {
      hypothesis = Formula::conj(translated_bounds[i], hypothesis);
    }
    statement = Formula::imply(hypothesis, translated);
  }

  Fact fact;
  fact.name = "abstracted";
  fact.kind = FactKind::Abstracted;
  fact.statement = statement;
  fact.provenance = "function abstraction";
  for (const Fact& bound : bounds) fact.assumed = fact.assumed || bound.assumed;
  return fact;
}

Substitution abstraction_back_substitution(const Formula& goal,
                                           const std::vector<Term>& targets,
                                           const std::vector<Fact>& bounds) {
  Substitution sigma;
  for (const auto& [target, fresh] : assign_names(goal, targets, bounds)) {
    sigma.emplace(fresh, target);
  }
  return sigma;
}

}  // namespace dlimp
