#include "dlimp/kernel.hpp"

#include <sstream>

#include "dlimp/errors.hpp"
#include "dlimp/polynomial.hpp"
#include "dlimp/printer.hpp"

namespace dlimp {

const char* existence_method_name(ExistenceMethod method) {
  switch (method) {
    case ExistenceMethod::AffineODE: return "AffineODE";
    case ExistenceMethod::UnivariateBoundedInvariant: return "UnivariateBoundedInvariant";
    case ExistenceMethod::UserAssumed: return "UserAssumed";
  }
  return "?";
}

namespace {

std::optional<std::string> affine_evidence(const DefinedFamily& family) {
  std::set<Identifier> coords(family.names.begin(), family.names.end());
  std::set<Identifier> time{family.time_var};
  std::ostringstream evidence;
  evidence << "x' = A x + b with";
  for (size_t i = 0; i < family.rhs.size(); ++i) {
    RationalFn rf = to_rational_fn(family.rhs[i]);
    // Denominator must not mention coordinates or time.
    if (!rf.den.independent_of(coords) || !rf.den.independent_of(time)) {
      return std::nullopt;
    }
    if (rf.num.degree_in(coords) > 1) return std::nullopt;
    // Coefficients must be exact constants: no time dependence anywhere.
    if (!rf.num.independent_of(time)) return std::nullopt;
    evidence << " [" << family.names[i] << "':";
    for (const Identifier& coord : family.names) {
      Poly coefficient = rf.num.linear_coefficient(coord);
      if (!coefficient.is_constant()) return std::nullopt;
      evidence << " a(" << coord << ")=" << coefficient.constant_value().to_string()
               << "/" << rf.den.constant_value().to_string();
    }
    Poly offset = rf.num.constant_part(coords);
    if (!offset.is_constant()) return std::nullopt;
    evidence << " b=" << offset.constant_value().to_string() << "/"
             << rf.den.constant_value().to_string();
    evidence << "]";
  }
  return evidence.str();
}

std::optional<std::string> bounded_invariant_evidence(const DefinedFamily& family) {
  if (family.names.size() != 1) return std::nullopt;
  const Identifier& x = family.names[0];
  if (free_variables(family.rhs[0]).count(family.time_var)) return std::nullopt;

  auto coefficients = univariate_coefficients(family.rhs[0], x);
  if (!coefficients) return std::nullopt;

  Rational x0 = *eval_exact(family.init_values[0]);
  std::vector<Rational> roots = rational_roots(*coefficients);

  std::optional<Rational> lower;
  std::optional<Rational> upper;
  for (const Rational& root : roots) {
    if (root < x0 && (!lower || *lower < root)) lower = root;
    if (root > x0 && (!upper || root < *upper)) upper = root;
  }
  if (!lower || !upper) return std::nullopt;

  // f(a) = f(b) = 0: a and b are equilibria, so the solution from X is
  // trapped in (a, b) for both time directions.
  std::ostringstream evidence;
  evidence << "invariant region " << lower->to_string() << " < " << x << " < "
           << upper->to_string() << " with f(" << lower->to_string() << ")=0, f("
           << upper->to_string() << ")=0, X=" << x0.to_string();
  return evidence.str();
}

}  // namespace

ExistenceOutcome check_existence(const DefinedFamily& family) {
  family.validate();
  if (auto evidence = affine_evidence(family)) {
    return {ExistenceCertificate(family, ExistenceMethod::AffineODE, *evidence), ""};
  }
  if (auto evidence = bounded_invariant_evidence(family)) {
    return {ExistenceCertificate(family, ExistenceMethod::UnivariateBoundedInvariant,
                                 *evidence),
            ""};
  }
  ExistenceOutcome outcome;
  outcome.reason =
      "existence unproven: right-hand side is neither affine nor a univariate "
      "polynomial with rational equilibria bracketing the initial value";
  return outcome;
}

ExistenceCertificate make_assumed_certificate(const DefinedFamily& family,
                                              const KernelOptions& options) {
  if (!options.assume_existence) {
    throw NoCertificateError(
        "UserAssumed certificates require the assume-existence flag");
  }
  return ExistenceCertificate(family, ExistenceMethod::UserAssumed,
                              "assumed by user flag; downstream facts are tainted");
}

void certify_registry(Registry& registry, const KernelOptions& options) {
  for (const Identifier& name : registry.order()) {
    RegistryEntry* entry = registry.lookup_mutable(name);
    if (!entry || entry->numeric_only || !entry->family) continue;
    if (entry->certificate) continue;
    ExistenceOutcome outcome = check_existence(*entry->family);
    if (outcome.certificate) {
      entry->certificate =
          std::make_shared<const ExistenceCertificate>(*outcome.certificate);
    } else if (options.assume_existence) {
      entry->certificate = std::make_shared<const ExistenceCertificate>(
          make_assumed_certificate(*entry->family, options));
      entry->refusal_reason = outcome.reason;
    } else {
      entry->refusal_reason = outcome.reason;
    }
  }
}

// ---------------------------------------------------------------------------
// FI instantiation.

FIInstance instantiate_FI(const Registry& registry, const Identifier& symbol,
                          const Term& output_term,
                          const std::vector<Term>& input_terms) {
  const RegistryEntry& entry = registry.at(symbol);
  if (entry.numeric_only) {
    throw NoCertificateError("symbol " + symbol +
                             " is numeric-only; FI expansion refused");
  }
  if (!entry.certificate) {
    throw NoCertificateError("symbol " + symbol + " has no existence certificate" +
                             (entry.refusal_reason.empty()
                                  ? ""
                                  : " (" + entry.refusal_reason + ")"));
  }
  if (static_cast<int>(input_terms.size()) != entry.symbol.arity()) {
    throw ArityError("symbol " + symbol + " has arity " +
                     std::to_string(entry.symbol.arity()));
  }

  // Rename interpretation-bound variables clashing with the instance terms.
  Formula interpretation = entry.symbol.interpretation();
  std::set<Identifier> instance_vars = free_variables(output_term);
  for (const Term& t : input_terms) {
    for (const Identifier& v : free_variables(t)) instance_vars.insert(v);
  }
  std::set<Identifier> bound = bound_variables(interpretation.program());
  std::set<Identifier> used = all_identifiers(interpretation);
  used.insert(instance_vars.begin(), instance_vars.end());
  for (const Identifier& b : bound) {
    if (instance_vars.count(b)) {
      Identifier fresh = fresh_identifier(b, used);
      used.insert(fresh);
      interpretation = alpha_rename(interpretation, b, fresh);
    }
  }

  Substitution sigma;
  sigma.emplace(placeholder(0), output_term);
  for (size_t i = 0; i < input_terms.size(); ++i) {
    sigma.emplace(placeholder(1 + i), input_terms[i]);
  }
  Formula instantiated = substitute(interpretation, sigma);

  FIInstance instance;
  instance.symbol = entry.symbol;
  instance.output_term = output_term;
  instance.input_terms = input_terms;
  instance.equivalence = Formula::equiv(
      Formula::compare(CompareOp::Eq, output_term,
                       Term::func_app(entry.symbol, input_terms)),
      instantiated);
  instance.assumed = entry.certificate->assumed();
  return instance;
}

// ---------------------------------------------------------------------------
// Occurrence expansion.

namespace {

struct ExpansionScan {
  const Identifier& symbol;
  int target_ordinal;
  int seen = 0;
  bool found = false;
  Term argument = Term::rational(0);
  Identifier fresh_var;
  bool polarity_even = true;

  // rewrite state
  int binder_depth = 0;
};

Term scan_term(const Term& t, ExpansionScan& scan,
               const std::vector<Identifier>& binders, bool even) {
  if (scan.found) return t;
  if (t.kind() == TermKind::FuncApp && t.symbol().name() == scan.symbol) {
    if (scan.seen++ == scan.target_ordinal) {
      scan.found = true;
      scan.argument = t.args().empty() ? Term::rational(0) : t.args()[0];
      scan.polarity_even = even;
      for (const Identifier& b : binders) {
        if (free_variables(scan.argument).count(b)) {
          throw PositionError("occurrence argument mentions bound variable " + b);
        }
      }
      return Term::variable(scan.fresh_var);
    }
  }
  switch (t.kind()) {
    case TermKind::Variable:
    case TermKind::Rational:
      return t;
    case TermKind::Plus:
      {
        Term l = scan_term(t.lhs(), scan, binders, even);
        Term r = scan_term(t.rhs(), scan, binders, even);
        return Term::plus(l, r);
      }
    case TermKind::Times:
      {
        Term l = scan_term(t.lhs(), scan, binders, even);
        Term r = scan_term(t.rhs(), scan, binders, even);
        return Term::times(l, r);
      }
    case TermKind::Divide:
      {
        Term l = scan_term(t.lhs(), scan, binders, even);
        Term r = scan_term(t.rhs(), scan, binders, even);
        return Term::divide(l, r);
      }
    case TermKind::Negate:
      return Term::negate(scan_term(t.operand(), scan, binders, even));
    case TermKind::Differential:
      return Term::differential(scan_term(t.operand(), scan, binders, even));
    case TermKind::FuncApp: {
      std::vector<Term> args;
      for (const Term& a : t.args()) args.push_back(scan_term(a, scan, binders, even));
      return Term::func_app(t.symbol(), std::move(args));
    }
  }
  return t;
}

int count_occurrences_program(const HybridProgram&, const Identifier&);

int count_occurrences_term(const Term& t, const Identifier& symbol) {
  int n = t.kind() == TermKind::FuncApp && t.symbol().name() == symbol ? 1 : 0;
  switch (t.kind()) {
    case TermKind::Variable:
    case TermKind::Rational:
      return n;
    case TermKind::Negate:
    case TermKind::Differential:
      return n + count_occurrences_term(t.operand(), symbol);
    case TermKind::FuncApp: {
      for (const Term& a : t.args()) n += count_occurrences_term(a, symbol);
      return n;
    }
    default:
      return n + count_occurrences_term(t.lhs(), symbol) +
             count_occurrences_term(t.rhs(), symbol);
  }
}

int count_occurrences(const Formula& f, const Identifier& symbol) {
  switch (f.kind()) {
    case FormulaKind::True:
    case FormulaKind::False:
      return 0;
    case FormulaKind::Compare:
      return count_occurrences_term(f.lhs_term(), symbol) +
             count_occurrences_term(f.rhs_term(), symbol);
    case FormulaKind::Not:
      return count_occurrences(f.operand(), symbol);
    case FormulaKind::Forall:
    case FormulaKind::Exists:
      return count_occurrences(f.body(), symbol);
    case FormulaKind::Box:
    case FormulaKind::Diamond:
      return count_occurrences_program(f.program(), symbol) +
             count_occurrences(f.post(), symbol);
    default:
      return count_occurrences(f.lhs(), symbol) + count_occurrences(f.rhs(), symbol);
  }
}

int count_occurrences_program(const HybridProgram& p, const Identifier& symbol) {
  switch (p.kind()) {
    case ProgramKind::Test:
      return count_occurrences(p.condition(), symbol);
    case ProgramKind::Assign:
      return count_occurrences_term(p.value(), symbol);
    case ProgramKind::AssignAny:
      return 0;
    case ProgramKind::ODESystem: {
      int n = count_occurrences(p.domain(), symbol);
      for (const auto& [lhs, rhs] : p.equations()) {
        n += count_occurrences_term(rhs, symbol);
      }
      return n;
    }
    case ProgramKind::Loop:
      return count_occurrences_program(p.body(), symbol);
    case ProgramKind::IfThen:
      return count_occurrences(p.condition(), symbol) +
             count_occurrences_program(p.body(), symbol);
    default:
      return count_occurrences_program(p.lhs(), symbol) +
             count_occurrences_program(p.rhs(), symbol);
  }
}

Formula scan_formula(const Formula& f, ExpansionScan& scan,
                     std::vector<Identifier>& binders, bool even) {
  if (scan.found) return f;
  switch (f.kind()) {
    case FormulaKind::True:
    case FormulaKind::False:
      return f;
    case FormulaKind::Compare: {
      Term l = scan_term(f.lhs_term(), scan, binders, even);
      Term r = scan_term(f.rhs_term(), scan, binders, even);
      return Formula::compare(f.op(), l, r);
    }
    case FormulaKind::Not:
      return Formula::negation(scan_formula(f.operand(), scan, binders, !even));
    case FormulaKind::And: {
      Formula l = scan_formula(f.lhs(), scan, binders, even);
      Formula r = scan_formula(f.rhs(), scan, binders, even);
      return Formula::conj(l, r);
    }
    case FormulaKind::Or: {
      Formula l = scan_formula(f.lhs(), scan, binders, even);
      Formula r = scan_formula(f.rhs(), scan, binders, even);
      return Formula::disj(l, r);
    }
    case FormulaKind::Imply: {
      Formula l = scan_formula(f.lhs(), scan, binders, !even);
      Formula r = scan_formula(f.rhs(), scan, binders, even);
      return Formula::imply(l, r);
    }
    case FormulaKind::Equiv: {
      // Polarity is undefined under an equivalence: skip it whole.
      int inside = count_occurrences(f, scan.symbol);
      if (scan.seen + inside > scan.target_ordinal) {
        throw PositionError("cannot expand an occurrence under an equivalence");
      }
      scan.seen += inside;
      return f;
    }
    case FormulaKind::Forall:
    case FormulaKind::Exists: {
      binders.push_back(f.binder());
      Formula body = scan_formula(f.body(), scan, binders, even);
      binders.pop_back();
      return f.kind() == FormulaKind::Forall ? Formula::forall(f.binder(), body)
                                             : Formula::exists(f.binder(), body);
    }
    case FormulaKind::Box:
    case FormulaKind::Diamond: {
      int inside = count_occurrences(f, scan.symbol);
      if (scan.seen + inside > scan.target_ordinal && scan.seen <= scan.target_ordinal) {
        throw PositionError("cannot expand an occurrence under a modality");
      }
      scan.seen += inside;
      return f;
    }
  }
  return f;
}

}  // namespace

Formula expand_occurrence(const Registry& registry, const Formula& formula,
                          const Identifier& symbol, int ordinal) {
  const RegistryEntry& entry = registry.at(symbol);
  if (entry.numeric_only) {
    throw NoCertificateError("symbol " + symbol + " is numeric-only");
  }
  if (!entry.certificate) {
    throw NoCertificateError("symbol " + symbol + " has no existence certificate");
  }

  std::set<Identifier> used = all_identifiers(formula);
  Identifier fresh = fresh_identifier(std::string(1, symbol[0]), used);

  ExpansionScan scan{symbol, ordinal};
  scan.fresh_var = fresh;
  std::vector<Identifier> binders;
  Formula rewritten = scan_formula(formula, scan, binders, /*even=*/true);
  if (!scan.found) {
    throw PositionError("formula has no occurrence #" + std::to_string(ordinal) +
                        " of " + symbol);
  }

  FIInstance instance =
      instantiate_FI(registry, symbol, Term::variable(fresh), {scan.argument});
  const Formula& characterization = instance.equivalence.rhs();

  if (scan.polarity_even) {
    return Formula::exists(fresh, Formula::conj(characterization, rewritten));
  }
  return Formula::forall(fresh, Formula::imply(characterization, rewritten));
}

}  // namespace dlimp
