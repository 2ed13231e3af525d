#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <random>

#include "dlimp/definitions.hpp"
#include "dlimp/integrator.hpp"
#include "dlimp/kernel.hpp"
#include "dlimp/polynomial.hpp"

namespace dlimp {

/// Valuation of identifiers. Primed entries ("x'") resolve Differential
/// leaves during evaluation.
using State = std::map<Identifier, double>;

enum class Truth { False, Unknown, True };

const char* truth_name(Truth value);
Truth truth_not(Truth v);
Truth truth_and(Truth a, Truth b);
Truth truth_or(Truth a, Truth b);

struct OracleConfig {
  double abs_tol = 1e-9;
  double rel_tol = 1e-9;
  double strict_margin = 1e-7;
  double max_step = 0.1;
  std::uint64_t rng_seed = 0;
  double horizon = 10.0;
  /// Unsound mode: certificate-refused families evaluate anyway (tainted);
  /// non-shape-backed symbols fall back to the constant zero function.
  bool assume_existence = false;
};

enum class TraceEventKind { Assign, Test, Choice, OdeStart, OdeEnd };

const char* trace_event_kind_name(TraceEventKind kind);

struct TraceEvent {
  double time = 0;
  TraceEventKind kind = TraceEventKind::Assign;
  std::string detail;
  bool outcome = true;  // Test: whether it passed
};

struct Trace {
  std::vector<std::pair<double, State>> samples;  // strictly increasing time
  std::vector<TraceEvent> events;
  bool discarded = false;
};

/// Line-oriented numeric text: time then variables in the given order.
std::string trace_to_text(const Trace& trace, const std::vector<Identifier>& order);

struct MonitorReport {
  Truth overall = Truth::True;
  std::optional<double> first_violation;
  std::optional<double> first_unknown;
  std::size_t samples = 0;
};

/// Seeded nondeterminism policy: all choices are explicit inputs.
struct NondetPolicy {
  using Rng = std::mt19937_64;
  std::function<double(const Identifier&, Rng&)> assign_any;
  std::function<int(int branches, Rng&)> choose;
  std::function<int(Rng&)> loop_iterations;
  std::function<double(Rng&, double remaining, bool in_loop)> ode_duration;
  int retry_budget = 100;

  /// Uniform samplers: assign-any over per-variable ranges (default [-1,1]),
  /// uniform branch pick, loop count in {0..loop_max}, duration u*remaining
  /// inside loops and full remaining at top level.
  static NondetPolicy standard(
      std::map<Identifier, std::pair<double, double>> ranges = {}, int loop_max = 8);
};

double uniform_double(NondetPolicy::Rng& rng, double lo, double hi);

struct LieDerivative {
  RationalFn normalized;
  bool exact_zero = false;
};

/// Numeric semantics: term evaluation (shape-(3) functions via ODE
/// integration over cached dense paths), three-valued formula evaluation,
/// hybrid program simulation, trace monitoring, Lie derivatives.
///
/// Instances are run-local: the dense-path cache is populated lazily and is
/// not synchronized. Evaluation is deterministic for a fixed call sequence.
class Oracle {
 public:
  Oracle(const Registry& registry, OracleConfig config);
  ~Oracle();

  const OracleConfig& config() const { return config_; }

  /// Coordinate value of a registered shape-(3) symbol at time t.
  double eval_function(const Identifier& symbol, double t);
  double eval_family(const DefinedFamily& family, int index, double t);

  double eval_term(const Term& term, const State& state);

  /// Quantifier-free, modality-free formulas, plus shape-(3) diamonds and
  /// the witness forms exists z (phi(z,e) & ...) / forall z (phi(z,e) -> ...).
  Truth eval_formula(const Formula& formula, const State& state);

  /// Seeded simulation; retries discarded runs up to the policy budget and
  /// throws PolicyExhausted when none completes.
  Trace simulate(const HybridProgram& program, const State& initial,
                 const NondetPolicy& policy);
  /// One attempt, possibly marked discarded.
  Trace simulate_once(const HybridProgram& program, const State& initial,
                      const NondetPolicy& policy, std::uint64_t seed);

  MonitorReport monitor(const Trace& trace, const Formula& invariant);

  /// Total derivative of J along the ODE vector field, canonicalized; the
  /// residual evaluator below reports exact 0 for syntactically vanishing
  /// derivatives.
  LieDerivative lie_derivative(const std::vector<OdeEquation>& ode, const Term& J);
  double lie_derivative_residual(const std::vector<OdeEquation>& ode, const Term& J,
                                 const State& state);
  double eval_rational_fn(const RationalFn& fn, const State& state);

  /// True when any evaluation since the last reset used a UserAssumed
  /// certificate or the zero fallback.
  bool taint_seen() const { return taint_; }
  void reset_taint() { taint_ = false; }

  const Registry& registry() const { return registry_; }

 private:
  struct FamilySweep;
  FamilySweep& sweep_for(const DefinedFamily& family);
  double eval_funcapp(const Term& term, const State& state);

  const Registry& registry_;
  OracleConfig config_;
  std::map<std::string, std::unique_ptr<FamilySweep>> sweeps_;
  bool taint_ = false;

  friend class Simulator;
};

}  // namespace dlimp
