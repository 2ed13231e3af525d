#include <cmath>

#include "dlimp/errors.hpp"
#include "dlimp/oracle.hpp"
#include "dlimp/printer.hpp"

namespace dlimp {

namespace {

struct RunState {
  double time = 0;
  State values;
  double horizon_remaining = 0;
  bool discarded = false;
};

}  // namespace

/// Executes hybrid programs over a run-local RNG. Samples are recorded at
/// time advancement points; discrete updates overwrite the sample at the
/// current time so monitors see post-transition states.
class Simulator {
 public:
  Simulator(Oracle& oracle, const NondetPolicy& policy, std::uint64_t seed)
      : oracle_(oracle), policy_(policy), rng_(seed) {}

  Trace run(const HybridProgram& program, const State& initial, double horizon) {
    RunState run;
    run.values = initial;
    run.horizon_remaining = horizon;
    trace_ = Trace{};
    record_sample(run);
    exec(program, run, /*in_loop=*/false);
    trace_.discarded = run.discarded;
    return std::move(trace_);
  }

 private:
  void record_sample(const RunState& run) {
    if (!trace_.samples.empty() && trace_.samples.back().first == run.time) {
      trace_.samples.back().second = run.values;
      return;
    }
    trace_.samples.emplace_back(run.time, run.values);
  }

  void event(const RunState& run, TraceEventKind kind, std::string detail,
             bool outcome = true) {
    trace_.events.push_back(TraceEvent{run.time, kind, std::move(detail), outcome});
  }

  void exec(const HybridProgram& program, RunState& run, bool in_loop) {
    if (run.discarded) return;
    switch (program.kind()) {
      case ProgramKind::Test: {
        Truth verdict = oracle_.eval_formula(program.condition(), run.values);
        // Within-margin tests pass: boundary events count as holding.
        bool pass = verdict != Truth::False;
        event(run, TraceEventKind::Test, print(program.condition()), pass);
        if (!pass) run.discarded = true;
        return;
      }
      case ProgramKind::Assign: {
        double value = oracle_.eval_term(program.value(), run.values);
        run.values[program.var()] = value;
        event(run, TraceEventKind::Assign, program.var());
        record_sample(run);
        return;
      }
      case ProgramKind::AssignAny: {
        run.values[program.var()] = policy_.assign_any(program.var(), rng_);
        event(run, TraceEventKind::Assign, program.var() + ":=*");
        record_sample(run);
        return;
      }
      case ProgramKind::IfThen: {
        Truth verdict = oracle_.eval_formula(program.condition(), run.values);
        event(run, TraceEventKind::Test, "if " + print(program.condition()),
              verdict != Truth::False);
        if (verdict != Truth::False) {
          exec(program.body(), run, in_loop);
        }
        return;
      }
      case ProgramKind::Sequence:
        exec(program.lhs(), run, in_loop);
        exec(program.rhs(), run, in_loop);
        return;
      case ProgramKind::Choice: {
        int preferred = policy_.choose(2, rng_);
        RunState snapshot = run;
        size_t samples_mark = trace_.samples.size();
        size_t events_mark = trace_.events.size();
        event(run, TraceEventKind::Choice, preferred == 0 ? "left" : "right");
        exec(preferred == 0 ? program.lhs() : program.rhs(), run, in_loop);
        if (!run.discarded) return;
        // Local backtracking: the other branch may admit a run.
        run = snapshot;
        trace_.samples.resize(samples_mark);
        trace_.events.resize(events_mark);
        event(run, TraceEventKind::Choice, preferred == 0 ? "right" : "left");
        exec(preferred == 0 ? program.rhs() : program.lhs(), run, in_loop);
        return;
      }
      case ProgramKind::Loop: {
        int iterations = policy_.loop_iterations(rng_);
        for (int i = 0; i < iterations; ++i) {
          RunState snapshot = run;
          size_t samples_mark = trace_.samples.size();
          size_t events_mark = trace_.events.size();
          exec(program.body(), run, /*in_loop=*/true);
          if (run.discarded) {
            // A shorter unrolling is a valid run: roll back this iteration.
            run = snapshot;
            trace_.samples.resize(samples_mark);
            trace_.events.resize(events_mark);
            run.discarded = false;
            break;
          }
          if (run.horizon_remaining <= 0) break;
        }
        return;
      }
      case ProgramKind::ODESystem:
        exec_ode(program, run, in_loop);
        return;
    }
  }

  void exec_ode(const HybridProgram& program, RunState& run, bool in_loop) {
    const auto& equations = program.equations();
    int dim = static_cast<int>(equations.size());

    Truth at_start = oracle_.eval_formula(program.domain(), run.values);
    if (at_start == Truth::False) {
      // Evolution of duration zero is impossible outside the domain.
      run.discarded = true;
      event(run, TraceEventKind::Test, "domain " + print(program.domain()), false);
      return;
    }

    double duration = policy_.ode_duration(rng_, run.horizon_remaining, in_loop);
    if (duration <= 0) return;

    event(run, TraceEventKind::OdeStart, print(program));

    State frame = run.values;  // non-ODE variables stay constant
    auto field = [&](double t, const double* y, double* dydt) {
      (void)t;
      for (int i = 0; i < dim; ++i) frame[equations[i].first] = y[i];
      for (int i = 0; i < dim; ++i) {
        dydt[i] = oracle_.eval_term(equations[i].second, frame);
      }
    };

    StepControl control;
    control.abs_tol = oracle_.config().abs_tol;
    control.rel_tol = oracle_.config().rel_tol;
    control.max_step = oracle_.config().max_step;
    DormandPrince stepper(dim, field, control);

    std::vector<double> y0(dim);
    for (int i = 0; i < dim; ++i) y0[i] = run.values.at(equations[i].first);

    double t_start = run.time;
    double stop_time = t_start + duration;
    bool boundary_hit = false;

    auto state_at = [&](const DenseStep& step, double t, State& out) {
      std::vector<double> y(dim);
      step.interpolate(t, y.data(), dim);
      out = run.values;
      for (int i = 0; i < dim; ++i) out[equations[i].first] = y[i];
    };

    auto on_step = [&](const DenseStep& step, const std::vector<double>& y) {
      State probe = run.values;
      for (int i = 0; i < dim; ++i) probe[equations[i].first] = y[i];
      Truth domain_now = oracle_.eval_formula(program.domain(), probe);
      double step_end = step.t0 + step.h;
      if (domain_now == Truth::False) {
        // Bisect to the last not-false time within this step.
        double lo = step.t0;
        double hi = step_end;
        for (int iter = 0; iter < 200 && hi - lo > oracle_.config().abs_tol; ++iter) {
          double mid = 0.5 * (lo + hi);
          State mid_state;
          state_at(step, mid, mid_state);
          if (oracle_.eval_formula(program.domain(), mid_state) == Truth::False) {
            hi = mid;
          } else {
            lo = mid;
          }
        }
        State stop_state;
        state_at(step, lo, stop_state);
        run.time = lo;
        run.values = stop_state;
        record_sample(run);
        boundary_hit = true;
        return false;
      }
      run.time = step_end;
      run.values = probe;
      record_sample(run);
      return true;
    };

    stepper.integrate(t_start, y0, stop_time, on_step);
    if (!boundary_hit && run.time < stop_time) {
      run.time = stop_time;  // final partial step landed exactly at stop_time
    }
    run.horizon_remaining -= (run.time - t_start);
    event(run, TraceEventKind::OdeEnd,
          boundary_hit ? "domain boundary" : "duration elapsed");
    record_sample(run);
  }

  Oracle& oracle_;
  const NondetPolicy& policy_;
  NondetPolicy::Rng rng_;
  Trace trace_;
};

Trace Oracle::simulate_once(const HybridProgram& program, const State& initial,
                            const NondetPolicy& policy, std::uint64_t seed) {
  Simulator simulator(*this, policy, seed);
  return simulator.run(program, initial, config_.horizon);
}

Trace Oracle::simulate(const HybridProgram& program, const State& initial,
                       const NondetPolicy& policy) {
  for (int attempt = 0; attempt < std::max(1, policy.retry_budget); ++attempt) {
    Trace trace = simulate_once(program, initial, policy,
                                config_.rng_seed + static_cast<std::uint64_t>(attempt));
    if (!trace.discarded) return trace;
  }
  throw PolicyExhausted("no non-discarded run found within the retry budget");
}

}  // namespace dlimp
