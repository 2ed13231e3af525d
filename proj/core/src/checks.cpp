#include "dlimp/checks.hpp"

#include <cmath>
#include <sstream>

#include "dlimp/errors.hpp"
#include "dlimp/kernel.hpp"
#include "dlimp/printer.hpp"

namespace dlimp {

namespace {

void collect_symbols(const Term& t, std::set<Identifier>& out);
void collect_symbols(const Formula& f, std::set<Identifier>& out);
void collect_symbols(const HybridProgram& p, std::set<Identifier>& out);

void collect_symbols(const Term& t, std::set<Identifier>& out) {
  switch (t.kind()) {
    case TermKind::Variable:
    case TermKind::Rational:
      return;
    case TermKind::Negate:
    case TermKind::Differential:
      collect_symbols(t.operand(), out);
      return;
    case TermKind::FuncApp:
      out.insert(t.symbol().name());
      for (const Term& a : t.args()) collect_symbols(a, out);
      return;
    default:
      collect_symbols(t.lhs(), out);
      collect_symbols(t.rhs(), out);
      return;
  }
}

void collect_symbols(const Formula& f, std::set<Identifier>& out) {
  switch (f.kind()) {
    case FormulaKind::True:
    case FormulaKind::False:
      return;
    case FormulaKind::Compare:
      collect_symbols(f.lhs_term(), out);
      collect_symbols(f.rhs_term(), out);
      return;
    case FormulaKind::Not:
      collect_symbols(f.operand(), out);
      return;
    case FormulaKind::Forall:
    case FormulaKind::Exists:
      collect_symbols(f.body(), out);
      return;
    case FormulaKind::Box:
    case FormulaKind::Diamond:
      collect_symbols(f.program(), out);
      collect_symbols(f.post(), out);
      return;
    default:
      collect_symbols(f.lhs(), out);
      collect_symbols(f.rhs(), out);
      return;
  }
}

void collect_symbols(const HybridProgram& p, std::set<Identifier>& out) {
  switch (p.kind()) {
    case ProgramKind::Test:
      collect_symbols(p.condition(), out);
      return;
    case ProgramKind::Assign:
      collect_symbols(p.value(), out);
      return;
    case ProgramKind::AssignAny:
      return;
    case ProgramKind::ODESystem:
      for (const auto& [lhs, rhs] : p.equations()) collect_symbols(rhs, out);
      collect_symbols(p.domain(), out);
      return;
    case ProgramKind::Loop:
      collect_symbols(p.body(), out);
      return;
    case ProgramKind::IfThen:
      collect_symbols(p.condition(), out);
      collect_symbols(p.body(), out);
      return;
    default:
      collect_symbols(p.lhs(), out);
      collect_symbols(p.rhs(), out);
      return;
  }
}

const HybridProgram* first_ode(const HybridProgram& p) {
  switch (p.kind()) {
    case ProgramKind::ODESystem:
      return &p;
    case ProgramKind::Choice:
    case ProgramKind::Sequence: {
      const HybridProgram* left = first_ode(p.lhs());
      return left ? left : first_ode(p.rhs());
    }
    case ProgramKind::Loop:
      return first_ode(p.body());
    case ProgramKind::IfThen:
      return first_ode(p.body());
    default:
      return nullptr;
  }
}

struct ItemOutcome {
  Verdict verdict = Verdict::Pass;
  double worst = 0;
  std::optional<double> first_violation;
  std::string note;

  void merge_fail(double time) {
    verdict = Verdict::Fail;
    if (!first_violation) first_violation = time;
  }
  void merge_unknown() {
    if (verdict == Verdict::Pass) verdict = Verdict::Unknown;
  }
};

std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t salt) {
  std::uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (salt + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

}  // namespace

std::set<Identifier> referenced_symbols(const ModelFile& model) {
  std::set<Identifier> out;
  for (const ImplicitDecl& decl : model.implicits) {
    for (const Identifier& name : decl.names) out.insert(name);
  }
  collect_symbols(model.problem, out);
  if (model.checks) {
    for (const CheckItem& item : model.checks->items) {
      collect_symbols(item.formula, out);
      collect_symbols(item.lhs, out);
      collect_symbols(item.rhs, out);
    }
  }
  return out;
}

RunReport run_model_checks(const ParsedModel& parsed, const std::string& path,
                           const RunOptions& options) {
  const ModelFile& model = parsed.model;
  const std::optional<ChecksBlock>& checks = model.checks;

  auto config_or = [&](const std::string& key, double fallback) {
    if (checks) {
      if (auto value = checks->config_value(key)) return value->to_double();
    }
    return fallback;
  };

  RunReport report;
  report.model_path = path;
  report.seed = options.seed.value_or(
      static_cast<std::uint64_t>(config_or("seed", 1)));
  report.runs = options.runs.value_or(static_cast<int>(config_or("runs", 20)));
  report.horizon = options.horizon.value_or(config_or("horizon", 10));
  report.tolerance = options.tolerance.value_or(config_or("tol", 1e-9));
  report.assume_existence = options.assume_existence;

  Registry registry = parsed.registry;  // certify a private copy
  KernelOptions kernel_options;
  kernel_options.assume_existence = options.assume_existence;
  certify_registry(registry, kernel_options);

  OracleConfig oracle_config;
  oracle_config.abs_tol = report.tolerance;
  oracle_config.rel_tol = report.tolerance;
  oracle_config.rng_seed = report.seed;
  oracle_config.horizon = report.horizon;
  oracle_config.assume_existence = options.assume_existence;
  Oracle oracle(registry, oracle_config);

  // Symbol reports and per-family lemmas for every referenced symbol.
  std::set<Identifier> referenced = referenced_symbols(model);
  for (const Identifier& name : referenced) {
    const RegistryEntry* entry = registry.lookup(name);
    if (!entry) continue;
    SymbolReport symbol;
    symbol.name = name;
    if (entry->numeric_only) {
      symbol.certificate = "numeric-only";
      report.symbols.push_back(std::move(symbol));
      continue;
    }
    if (entry->family) {
      std::ostringstream family_names;
      for (size_t i = 0; i < entry->family->names.size(); ++i) {
        if (i > 0) family_names << ",";
        family_names << entry->family->names[i];
      }
      symbol.family = family_names.str();
    }
    CheckReport existence;
    existence.name = name + "_existence";
    existence.kind = "existence";
    if (entry->certificate) {
      symbol.certificate = existence_method_name(entry->certificate->method());
      symbol.evidence = entry->certificate->evidence();
      symbol.tainted = entry->certificate->assumed();
      existence.verdict = entry->certificate->assumed() ? Verdict::Unknown : Verdict::Pass;
      existence.detail = symbol.certificate;
    } else {
      symbol.certificate = "refused";
      symbol.evidence = entry->refusal_reason;
      existence.verdict = Verdict::Fail;
      existence.detail = entry->refusal_reason;
    }
    report.checks.push_back(std::move(existence));
    report.symbols.push_back(std::move(symbol));

    if (entry->certificate) {
      try {
        report.facts.push_back(initial_value_lemma(registry, oracle, name));
        report.facts.push_back(differential_axiom(registry, oracle, name));
      } catch (const Error& e) {
        Fact failed;
        failed.name = name + "_lemmas";
        failed.statement = Formula::truth(false);
        failed.verdict = Verdict::Unknown;
        failed.detail = e.what();
        report.facts.push_back(std::move(failed));
      }
    }
  }

  if (options.lemmas_only || !checks) {
    report.finalize();
    report.tainted = report.tainted || oracle.taint_seen();
    return report;
  }

  // ---------------------------------------------------------------------
  // Declared checks over seeded simulations.

  auto problem_shape = split_problem(model.problem);

  std::map<Identifier, std::pair<double, double>> policy_ranges;
  {
    State empty;
    for (const SampleRange& r : checks->ranges) {
      policy_ranges[r.name] = {oracle.eval_term(r.lo, empty),
                               oracle.eval_term(r.hi, empty)};
    }
  }
  NondetPolicy policy = NondetPolicy::standard(policy_ranges);

  bool needs_simulation = checks->monitor_post;
  for (const CheckItem& item : checks->items) {
    if (item.kind != CheckItem::Kind::Identity || !item.grid) needs_simulation = true;
  }

  std::map<std::string, ItemOutcome> outcomes;
  if (checks->monitor_post) outcomes["post"] = ItemOutcome{};
  for (const CheckItem& item : checks->items) {
    if (!(item.kind == CheckItem::Kind::Identity && item.grid)) {
      outcomes[item.name] = ItemOutcome{};
    }
  }

  // Lie derivatives are symbolic; compute them once.
  std::map<std::string, std::optional<RationalFn>> lie_residuals;
  const HybridProgram* ode =
      problem_shape ? first_ode(problem_shape->program) : nullptr;
  for (const CheckItem& item : checks->items) {
    if (item.kind != CheckItem::Kind::Lie) continue;
    if (!ode) {
      outcomes[item.name].merge_unknown();
      outcomes[item.name].note = "no ODE in the problem program";
      continue;
    }
    try {
      LieDerivative lie = oracle.lie_derivative(ode->equations(), item.lhs);
      RationalFn residual = lie.normalized - to_rational_fn(item.rhs);
      if (residual.is_zero()) {
        lie_residuals[item.name] = std::nullopt;  // exactly the expected term
      } else {
        lie_residuals[item.name] = residual;
      }
    } catch (const Error& e) {
      outcomes[item.name].merge_unknown();
      outcomes[item.name].note = e.what();
    }
  }

  int completed_runs = 0;
  if (needs_simulation && problem_shape) {
    for (int run = 0; run < report.runs; ++run) {
      // Per-run constants: fixes in order, then sampled constants.
      NondetPolicy::Rng sampler(mix_seed(report.seed, 1000003 + run));
      State state;
      for (const auto& [name, term] : checks->fixes) {
        state[name] = oracle.eval_term(term, state);
      }
      for (const SampleRange& s : checks->samples) {
        double lo = oracle.eval_term(s.lo, state);
        double hi = oracle.eval_term(s.hi, state);
        state[s.name] = uniform_double(sampler, lo, hi);
      }
      for (const Identifier& var : model.program_variables) {
        state.emplace(var, 0.0);
      }
      for (const auto& [name, term] : checks->inits) {
        state[name] = oracle.eval_term(term, state);
      }

      Trace trace;
      bool have_trace = false;
      for (int attempt = 0; attempt < policy.retry_budget; ++attempt) {
        trace = oracle.simulate_once(problem_shape->program, state, policy,
                                     mix_seed(report.seed, run * 131 + attempt));
        if (!trace.discarded) {
          have_trace = true;
          break;
        }
      }
      if (!have_trace) {
        for (auto& [name, outcome] : outcomes) {
          outcome.merge_unknown();
          outcome.note = "policy exhausted";
        }
        continue;
      }
      ++completed_runs;

      if (checks->monitor_post) {
        MonitorReport mr = oracle.monitor(trace, problem_shape->postcondition);
        ItemOutcome& outcome = outcomes["post"];
        if (mr.overall == Truth::False) {
          outcome.merge_fail(*mr.first_violation);
        } else if (mr.overall == Truth::Unknown) {
          outcome.merge_unknown();
        }
      }

      for (const CheckItem& item : checks->items) {
        if (item.kind == CheckItem::Kind::Identity && item.grid) continue;
        ItemOutcome& outcome = outcomes[item.name];
        switch (item.kind) {
          case CheckItem::Kind::Invariant: {
            MonitorReport mr = oracle.monitor(trace, item.formula);
            if (mr.overall == Truth::False) {
              outcome.merge_fail(*mr.first_violation);
            } else if (mr.overall == Truth::Unknown) {
              outcome.merge_unknown();
            }
            break;
          }
          case CheckItem::Kind::Lie: {
            auto it = lie_residuals.find(item.name);
            if (it == lie_residuals.end()) break;  // symbolic failure already noted
            if (!it->second) break;                // exact zero residual
            double tolerance = item.tol.to_double();
            for (const auto& [time, sample] : trace.samples) {
              try {
                double value = oracle.eval_rational_fn(*it->second, sample);
                outcome.worst = std::max(outcome.worst, std::abs(value));
                if (std::abs(value) > tolerance) outcome.merge_fail(time);
              } catch (const Error&) {
                outcome.merge_unknown();
              }
            }
            break;
          }
          case CheckItem::Kind::Identity: {
            if (item.grid) break;  // grid identities handled below
            double abs_tol = item.abs_tol.to_double();
            double rel_tol = item.rel_tol.to_double();
            for (const auto& [time, sample] : trace.samples) {
              try {
                double lhs = oracle.eval_term(item.lhs, sample);
                double rhs = oracle.eval_term(item.rhs, sample);
                double bound =
                    abs_tol + rel_tol * std::max(std::abs(lhs), std::abs(rhs));
                double error = std::abs(lhs - rhs);
                outcome.worst = std::max(outcome.worst, error);
                if (error > bound) outcome.merge_fail(time);
              } catch (const Error&) {
                outcome.merge_unknown();
              }
            }
            break;
          }
        }
      }
    }
  } else if (needs_simulation && !problem_shape) {
    for (auto& [name, outcome] : outcomes) {
      outcome.merge_unknown();
      outcome.note = "problem is not of assumptions -> [program] post shape";
    }
  }

  // Grid identities: evaluated over fixed constants (no sampling).
  for (const CheckItem& item : checks->items) {
    if (item.kind != CheckItem::Kind::Identity || !item.grid) continue;
    ItemOutcome outcome;
    State state;
    for (const auto& [name, term] : checks->fixes) {
      state[name] = oracle.eval_term(term, state);
    }
    double lo = oracle.eval_term(item.grid->lo, state);
    double hi = oracle.eval_term(item.grid->hi, state);
    long points = std::max(2L, item.grid->points);
    double abs_tol = item.abs_tol.to_double();
    double rel_tol = item.rel_tol.to_double();
    for (long k = 0; k < points; ++k) {
      double x = lo + (hi - lo) * static_cast<double>(k) / (points - 1);
      state[item.grid->var] = x;
      try {
        double lhs = oracle.eval_term(item.lhs, state);
        double rhs = oracle.eval_term(item.rhs, state);
        double bound = abs_tol + rel_tol * std::max(std::abs(lhs), std::abs(rhs));
        double error = std::abs(lhs - rhs);
        outcome.worst = std::max(outcome.worst, error);
        if (error > bound) outcome.merge_fail(x);
      } catch (const Error&) {
        outcome.merge_unknown();
      }
    }
    CheckReport check;
    check.name = item.name;
    check.kind = "identity";
    check.verdict = outcome.verdict;
    check.first_violation = outcome.first_violation;
    check.runs = static_cast<int>(points);
    std::ostringstream detail;
    detail << "grid over " << item.grid->var << ", max error " << outcome.worst;
    check.detail = detail.str();
    report.checks.push_back(std::move(check));
  }

  for (const auto& [name, outcome] : outcomes) {
    CheckReport check;
    check.name = name;
    if (name == "post") {
      check.kind = "post";
    } else {
      for (const CheckItem& item : checks->items) {
        if (item.name == name) {
          check.kind = item.kind == CheckItem::Kind::Invariant ? "invariant"
                       : item.kind == CheckItem::Kind::Lie     ? "lie"
                                                               : "identity";
        }
      }
    }
    check.verdict = outcome.verdict;
    check.first_violation = outcome.first_violation;
    check.runs = completed_runs;
    std::ostringstream detail;
    if (!outcome.note.empty()) {
      detail << outcome.note << "; ";
    }
    detail << "max residual " << outcome.worst;
    check.detail = detail.str();
    report.checks.push_back(std::move(check));
  }

  report.finalize();
  report.tainted = report.tainted || oracle.taint_seen();
  return report;
}

}  // namespace dlimp
