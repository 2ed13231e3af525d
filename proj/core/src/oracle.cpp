#include "dlimp/oracle.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

#include "dlimp/diff.hpp"
#include "dlimp/errors.hpp"
#include "dlimp/printer.hpp"

namespace dlimp {

const char* truth_name(Truth value) {
  switch (value) {
    case Truth::False: return "false";
    case Truth::Unknown: return "unknown";
    case Truth::True: return "true";
  }
  return "?";
}

Truth truth_not(Truth v) {
  if (v == Truth::True) return Truth::False;
  if (v == Truth::False) return Truth::True;
  return Truth::Unknown;
}

Truth truth_and(Truth a, Truth b) {
  if (a == Truth::False || b == Truth::False) return Truth::False;
  if (a == Truth::True && b == Truth::True) return Truth::True;
  return Truth::Unknown;
}

Truth truth_or(Truth a, Truth b) {
  if (a == Truth::True || b == Truth::True) return Truth::True;
  if (a == Truth::False && b == Truth::False) return Truth::False;
  return Truth::Unknown;
}

const char* trace_event_kind_name(TraceEventKind kind) {
  switch (kind) {
    case TraceEventKind::Assign: return "assign";
    case TraceEventKind::Test: return "test";
    case TraceEventKind::Choice: return "choice";
    case TraceEventKind::OdeStart: return "ode-start";
    case TraceEventKind::OdeEnd: return "ode-end";
  }
  return "?";
}

double uniform_double(NondetPolicy::Rng& rng, double lo, double hi) {
  // 53-bit mantissa scaling; avoids distribution implementation differences.
  double unit = static_cast<double>(rng() >> 11) * 0x1.0p-53;
  return lo + unit * (hi - lo);
}

NondetPolicy NondetPolicy::standard(
    std::map<Identifier, std::pair<double, double>> ranges, int loop_max) {
  NondetPolicy policy;
  policy.assign_any = [ranges = std::move(ranges)](const Identifier& var, Rng& rng) {
    auto it = ranges.find(var);
    double lo = it == ranges.end() ? -1.0 : it->second.first;
    double hi = it == ranges.end() ? 1.0 : it->second.second;
    return uniform_double(rng, lo, hi);
  };
  policy.choose = [](int branches, Rng& rng) {
    return static_cast<int>(rng() % static_cast<std::uint64_t>(branches));
  };
  policy.loop_iterations = [loop_max](Rng& rng) {
    return static_cast<int>(rng() % static_cast<std::uint64_t>(loop_max + 1));
  };
  policy.ode_duration = [](Rng& rng, double remaining, bool in_loop) {
    return in_loop ? uniform_double(rng, 0.0, remaining) : remaining;
  };
  return policy;
}

std::string trace_to_text(const Trace& trace, const std::vector<Identifier>& order) {
  std::ostringstream out;
  out.precision(17);
  for (const auto& [time, state] : trace.samples) {
    out << time;
    for (const Identifier& var : order) {
      auto it = state.find(var);
      out << " " << (it == state.end() ? 0.0 : it->second);
    }
    out << "\n";
  }
  return out.str();
}

// ---------------------------------------------------------------------------
// Family sweeps: one dense forward/backward pair per family.

namespace {

/// Compiled right-hand sides of a family ODE over slots [coords..., t].
struct FamilyField {
  std::vector<Term> rhs;
  std::vector<Identifier> slot_names;

  double eval_term_slots(const Term& t, const double* slots) const {
    switch (t.kind()) {
      case TermKind::Variable: {
        for (size_t i = 0; i < slot_names.size(); ++i) {
          if (slot_names[i] == t.var_name()) return slots[i];
        }
        throw EvalError("family field: unbound variable " + t.var_name());
      }
      case TermKind::Rational:
        return t.rational_value().to_double();
      case TermKind::Plus:
        return eval_term_slots(t.lhs(), slots) + eval_term_slots(t.rhs(), slots);
      case TermKind::Times:
        return eval_term_slots(t.lhs(), slots) * eval_term_slots(t.rhs(), slots);
      case TermKind::Divide: {
        double den = eval_term_slots(t.rhs(), slots);
        if (den == 0) throw DivisionByZero("family field divides by zero");
        return eval_term_slots(t.lhs(), slots) / den;
      }
      case TermKind::Negate:
        return -eval_term_slots(t.operand(), slots);
      default:
        throw EvalError("family field: unsupported term");
    }
  }
};

}  // namespace

struct Oracle::FamilySweep {
  DefinedFamily family;
  FamilyField field;
  double T = 0;
  std::vector<double> X;
  bool certified = false;
  bool assumed = false;
  bool zero_fallback = false;
  std::string refusal;
  DensePath forward;
  DensePath backward;
  std::unique_ptr<DormandPrince> forward_rk;
  std::unique_ptr<DormandPrince> backward_rk;
};

Oracle::Oracle(const Registry& registry, OracleConfig config)
    : registry_(registry), config_(config) {}

Oracle::~Oracle() = default;

Oracle::FamilySweep& Oracle::sweep_for(const DefinedFamily& family) {
  std::string key = family.key();
  auto it = sweeps_.find(key);
  if (it != sweeps_.end()) return *it->second;

  auto sweep = std::make_unique<FamilySweep>();
  sweep->family = family;
  sweep->field.rhs = family.rhs;
  sweep->field.slot_names = family.names;
  sweep->field.slot_names.push_back(family.time_var);
  sweep->T = eval_exact(family.init_time)->to_double();
  for (const Term& v : family.init_values) {
    sweep->X.push_back(eval_exact(v)->to_double());
  }

  // Certificate status: prefer the registry's call (covers UserAssumed),
  // fall back to a direct check for ad-hoc families.
  const RegistryEntry* entry = nullptr;
  for (const Identifier& name : family.names) {
    const RegistryEntry* candidate = registry_.lookup(name);
    if (candidate && candidate->family && *candidate->family == family) {
      entry = candidate;
      break;
    }
  }
  if (entry && entry->certificate) {
    sweep->certified = true;
    sweep->assumed = entry->certificate->assumed();
  } else if (entry && !entry->refusal_reason.empty() && !config_.assume_existence) {
    sweep->refusal = entry->refusal_reason;
  } else {
    ExistenceOutcome outcome = check_existence(family);
    if (outcome.certificate) {
      sweep->certified = true;
    } else if (config_.assume_existence) {
      sweep->certified = true;
      sweep->assumed = true;
      sweep->refusal = outcome.reason;
    } else {
      sweep->refusal = outcome.reason;
    }
  }

  int dim = static_cast<int>(family.names.size());
  StepControl control;
  control.abs_tol = config_.abs_tol;
  control.rel_tol = config_.rel_tol;
  control.max_step = std::max(config_.max_step, 1e-6);
  FamilyField* field_ptr = &sweep->field;
  double T = sweep->T;
  OdeField ode = [field_ptr, dim](double t, const double* y, double* dydt) {
    std::vector<double> slots(dim + 1);
    for (int i = 0; i < dim; ++i) slots[i] = y[i];
    slots[dim] = t;
    for (int i = 0; i < dim; ++i) {
      dydt[i] = field_ptr->eval_term_slots(field_ptr->rhs[i], slots.data());
    }
  };
  sweep->forward = DensePath(dim, T, sweep->X);
  sweep->backward = DensePath(dim, T, sweep->X);
  sweep->forward_rk = std::make_unique<DormandPrince>(dim, ode, control);
  sweep->backward_rk = std::make_unique<DormandPrince>(dim, ode, control);

  auto [inserted, ok] = sweeps_.emplace(key, std::move(sweep));
  return *inserted->second;
}

double Oracle::eval_family(const DefinedFamily& family, int index, double t) {
  FamilySweep& sweep = sweep_for(family);
  if (!sweep.certified) {
    throw NoCertificateError("family of " + family.names[index] +
                             " has no existence certificate" +
                             (sweep.refusal.empty() ? "" : " (" + sweep.refusal + ")"));
  }
  if (sweep.assumed) taint_ = true;
  if (t == sweep.T) return sweep.X[index];
  std::vector<double> y(family.names.size());
  if (t > sweep.T) {
    if (!sweep.forward.covers(t)) sweep.forward_rk->extend(sweep.forward, t);
    sweep.forward.sample(t, y.data());
  } else {
    if (!sweep.backward.covers(t)) sweep.backward_rk->extend(sweep.backward, t);
    sweep.backward.sample(t, y.data());
  }
  return y[index];
}

double Oracle::eval_function(const Identifier& symbol, double t) {
  const RegistryEntry& entry = registry_.at(symbol);
  if (entry.numeric_only) {
    throw EvalError("symbol " + symbol + " is numeric-only; it has no defining ODE");
  }
  if (!entry.family) {
    throw NoCertificateError("symbol " + symbol + " is not shape-(3) backed");
  }
  return eval_family(*entry.family, entry.index, t);
}

// ---------------------------------------------------------------------------
// Term evaluation.

double Oracle::eval_funcapp(const Term& term, const State& state) {
  const InterpretedSymbol& sym = term.symbol();
  if (sym.is_numeric_only() || (!sym.has_interpretation() && sym.is_builtin())) {
    if (sym.name() == "pi") return std::numbers::pi_v<double>;
    if (sym.name() == "sqrt") {
      double arg = eval_term(term.args()[0], state);
      if (arg < 0) throw EvalError("sqrt of a negative argument");
      return std::sqrt(arg);
    }
    throw EvalError("unknown numeric builtin " + sym.name());
  }

  if (sym.has_interpretation()) {
    if (auto shape = recognize_shape(sym.interpretation())) {
      double t = eval_term(term.args()[0], state);
      return eval_family(shape->family, shape->index, t);
    }
    // Interpretation is not of the differentially-defined shape: the term
    // semantics fall back to the constant zero function, reachable only in
    // unsound mode and always tainted.
    if (config_.assume_existence) {
      taint_ = true;
      return 0.0;
    }
    throw NoCertificateError("symbol " + sym.name() +
                             " has a non-shape-(3) interpretation");
  }

  const RegistryEntry* entry = registry_.lookup(sym.name());
  if (entry && entry->family) {
    double t = eval_term(term.args()[0], state);
    return eval_family(*entry->family, entry->index, t);
  }
  if (config_.assume_existence) {
    taint_ = true;
    return 0.0;
  }
  throw EvalError("symbol " + sym.name() + " has no interpretation");
}

double Oracle::eval_term(const Term& term, const State& state) {
  switch (term.kind()) {
    case TermKind::Variable: {
      auto it = state.find(term.var_name());
      if (it == state.end()) {
        throw EvalError("state does not cover variable " + term.var_name());
      }
      return it->second;
    }
    case TermKind::Rational:
      return term.rational_value().to_double();
    case TermKind::Plus:
      return eval_term(term.lhs(), state) + eval_term(term.rhs(), state);
    case TermKind::Times:
      return eval_term(term.lhs(), state) * eval_term(term.rhs(), state);
    case TermKind::Divide: {
      double den = eval_term(term.rhs(), state);
      if (std::abs(den) <= config_.strict_margin) {
        throw DivisionByZero("denominator " + print(term.rhs()) +
                             " within strict margin of zero");
      }
      return eval_term(term.lhs(), state) / den;
    }
    case TermKind::Negate:
      return -eval_term(term.operand(), state);
    case TermKind::Differential: {
      const Term& inner = term.operand();
      if (inner.kind() == TermKind::Variable) {
        auto it = state.find(inner.var_name() + "'");
        if (it != state.end()) return it->second;
      }
      throw EvalError("cannot evaluate differential " + print(term));
    }
    case TermKind::FuncApp:
      return eval_funcapp(term, state);
  }
  throw EvalError("unreachable term kind");
}

// ---------------------------------------------------------------------------
// Formula evaluation.

namespace {

struct WitnessPattern {
  ShapeInstance shape;
  Identifier witness_var;
  bool found = false;
};

/// Looks for a shape-(3) diamond whose output term is exactly the bound
/// variable, anywhere along the left spine of conjunctions/implication guards.
WitnessPattern find_witness(const Formula& body, const Identifier& var,
                            FormulaKind connective) {
  WitnessPattern result;
  const Formula* cursor = &body;
  while (true) {
    const Formula* candidate = nullptr;
    if (cursor->kind() == connective) {
      candidate = &cursor->lhs();
    } else {
      candidate = cursor;
    }
    if (candidate->kind() == FormulaKind::Diamond) {
      if (auto shape = recognize_shape(*candidate)) {
        if (shape->output_term == Term::variable(var) &&
            !free_variables(shape->input_term).count(var)) {
          result.shape = *shape;
          result.witness_var = var;
          result.found = true;
          return result;
        }
      }
    }
    if (cursor->kind() != connective) break;
    cursor = &cursor->rhs();
  }
  return result;
}

}  // namespace

Truth Oracle::eval_formula(const Formula& formula, const State& state) {
  switch (formula.kind()) {
    case FormulaKind::True:
      return Truth::True;
    case FormulaKind::False:
      return Truth::False;
    case FormulaKind::Compare: {
      double lhs = eval_term(formula.lhs_term(), state);
      double rhs = eval_term(formula.rhs_term(), state);
      double diff = lhs - rhs;
      // Exact-zero differences decide; only inexact knife edges are unknown.
      if (diff != 0.0 && std::abs(diff) <= config_.strict_margin) {
        return Truth::Unknown;
      }
      bool verdict = false;
      switch (formula.op()) {
        case CompareOp::Eq: verdict = diff == 0.0; break;
        case CompareOp::Neq: verdict = diff != 0.0; break;
        case CompareOp::Ge: verdict = diff >= 0.0; break;
        case CompareOp::Gt: verdict = diff > 0.0; break;
        case CompareOp::Le: verdict = diff <= 0.0; break;
        case CompareOp::Lt: verdict = diff < 0.0; break;
      }
      return verdict ? Truth::True : Truth::False;
    }
    case FormulaKind::Not:
      return truth_not(eval_formula(formula.operand(), state));
    case FormulaKind::And:
      return truth_and(eval_formula(formula.lhs(), state),
                       eval_formula(formula.rhs(), state));
    case FormulaKind::Or:
      return truth_or(eval_formula(formula.lhs(), state),
                      eval_formula(formula.rhs(), state));
    case FormulaKind::Imply:
      return truth_or(truth_not(eval_formula(formula.lhs(), state)),
                      eval_formula(formula.rhs(), state));
    case FormulaKind::Equiv: {
      Truth a = eval_formula(formula.lhs(), state);
      Truth b = eval_formula(formula.rhs(), state);
      if (a == Truth::Unknown || b == Truth::Unknown) return Truth::Unknown;
      return a == b ? Truth::True : Truth::False;
    }
    case FormulaKind::Diamond: {
      auto shape = recognize_shape(formula);
      if (!shape) {
        throw UnsupportedFormula("diamond modality is not of the implicit-definition shape");
      }
      double out = eval_term(shape->output_term, state);
      double in = eval_term(shape->input_term, state);
      double value = eval_family(shape->family, shape->index, in);
      double diff = std::abs(out - value);
      if (diff <= config_.abs_tol) return Truth::True;
      if (diff > config_.strict_margin) return Truth::False;
      return Truth::Unknown;
    }
    case FormulaKind::Exists: {
      WitnessPattern pattern = find_witness(formula.body(), formula.binder(),
                                            FormulaKind::And);
      if (!pattern.found) {
        throw UnsupportedFormula("existential without a shape-(3) witness conjunct");
      }
      double in = eval_term(pattern.shape.input_term, state);
      double witness = eval_family(pattern.shape.family, pattern.shape.index, in);
      State extended = state;
      extended[formula.binder()] = witness;
      return eval_formula(formula.body(), extended);
    }
    case FormulaKind::Forall: {
      WitnessPattern pattern = find_witness(formula.body(), formula.binder(),
                                            FormulaKind::Imply);
      if (!pattern.found) {
        throw UnsupportedFormula("universal without a shape-(3) witness guard");
      }
      double in = eval_term(pattern.shape.input_term, state);
      double witness = eval_family(pattern.shape.family, pattern.shape.index, in);
      State extended = state;
      extended[formula.binder()] = witness;
      return eval_formula(formula.body(), extended);
    }
    case FormulaKind::Box:
      throw UnsupportedFormula("box modalities are not numerically evaluable");
  }
  throw UnsupportedFormula("unreachable formula kind");
}

// ---------------------------------------------------------------------------
// Monitoring.

MonitorReport Oracle::monitor(const Trace& trace, const Formula& invariant) {
  MonitorReport report;
  report.samples = trace.samples.size();
  for (const auto& [time, state] : trace.samples) {
    Truth verdict = eval_formula(invariant, state);
    if (verdict == Truth::False) {
      report.overall = Truth::False;
      if (!report.first_violation) report.first_violation = time;
    } else if (verdict == Truth::Unknown) {
      if (report.overall == Truth::True) report.overall = Truth::Unknown;
      if (!report.first_unknown) report.first_unknown = time;
    }
  }
  return report;
}

// ---------------------------------------------------------------------------
// Lie derivatives.

LieDerivative Oracle::lie_derivative(const std::vector<OdeEquation>& ode,
                                     const Term& J) {
  Term dJ = differential(J, registry_);
  std::map<Identifier, Term> derivatives;
  for (const auto& [var, rhs] : ode) derivatives.emplace(var, rhs);
  Term resolved = substitute_differentials(dJ, derivatives);
  LieDerivative result;
  result.normalized = to_rational_fn(resolved);
  result.exact_zero = result.normalized.is_zero();
  return result;
}

double Oracle::eval_rational_fn(const RationalFn& fn, const State& state) {
  auto eval_poly = [&](const Poly& poly) {
    double acc = 0;
    for (const auto& [monomial, coefficient] : poly.terms()) {
      double value = coefficient.to_double();
      for (const auto& [atom, power] : monomial) {
        double base = eval_term(atom, state);
        for (int i = 0; i < power; ++i) value *= base;
      }
      acc += value;
    }
    return acc;
  };
  if (fn.num.is_zero()) return 0.0;
  double den = eval_poly(fn.den);
  if (den == 0) throw DivisionByZero("lie derivative denominator vanished");
  return eval_poly(fn.num) / den;
}

double Oracle::lie_derivative_residual(const std::vector<OdeEquation>& ode,
                                       const Term& J, const State& state) {
  LieDerivative lie = lie_derivative(ode, J);
  if (lie.exact_zero) return 0.0;
  return eval_rational_fn(lie.normalized, state);
}

}  // namespace dlimp
