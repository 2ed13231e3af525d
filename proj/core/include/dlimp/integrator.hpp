#pragma once

#include <functional>
#include <string>
#include <vector>

namespace dlimp {

/// dy/dt = f(t, y); y and dydt have the configured dimension.
using OdeField = std::function<void(double t, const double* y, double* dydt)>;

struct StepControl {
  double abs_tol = 1e-9;
  double rel_tol = 1e-9;
  double max_step = 0.1;
  double initial_step = 1e-4;
  long max_steps = 20000000;
};

/// One accepted Dormand-Prince step with its 4th-order dense interpolant.
struct DenseStep {
  double t0 = 0;
  double h = 0;
  std::vector<double> r1, r2, r3, r4, r5;  // dopri5 rcont coefficients

  void interpolate(double t, double* y, int dim) const {
    double theta = (t - t0) / h;
    double theta1 = 1.0 - theta;
    for (int i = 0; i < dim; ++i) {
      y[i] = r1[i] + theta * (r2[i] + theta1 * (r3[i] + theta * (r4[i] + theta1 * r5[i])));
    }
  }
};

/// Contiguous dense trajectory extended step by step in one time direction.
class DensePath {
 public:
  DensePath() = default;
  DensePath(int dim, double t_start, std::vector<double> y_start)
      : dim_(dim), t_start_(t_start), t_end_(t_start), y_end_(std::move(y_start)) {}

  int dim() const { return dim_; }
  double t_start() const { return t_start_; }
  double t_end() const { return t_end_; }
  const std::vector<double>& y_end() const { return y_end_; }
  bool covers(double t) const {
    return t_end_ >= t_start_ ? (t >= t_start_ && t <= t_end_)
                              : (t <= t_start_ && t >= t_end_);
  }

  /// Sample inside the covered range (binary search + interpolation).
  void sample(double t, double* y) const;

  void append(DenseStep step, std::vector<double> y_new);

  /// Set when a previous extension attempt failed; rethrown on further use.
  std::string poisoned;

 private:
  int dim_ = 0;
  double t_start_ = 0;
  double t_end_ = 0;
  std::vector<double> y_end_;
  std::vector<DenseStep> steps_;
};

class DormandPrince {
 public:
  DormandPrince(int dim, OdeField field, StepControl control);

  /// Extends the path to cover time `t_target` (either direction relative to
  /// the path end). Throws IntegrationError on step underflow or step-count
  /// exhaustion.
  void extend(DensePath& path, double t_target);

  /// Single integration from (t0, y0) to t1. `on_step` is called after every
  /// accepted step with the dense interpolant; returning false stops early.
  using StepCallback = std::function<bool(const DenseStep&, const std::vector<double>&)>;
  std::vector<double> integrate(double t0, std::vector<double> y0, double t1,
                                const StepCallback& on_step = {});

 private:
  bool attempt_step(double t, const std::vector<double>& y,
                    const std::vector<double>& k1, double h, DenseStep& step,
                    std::vector<double>& y_new, std::vector<double>& k_new,
                    double& error_norm);

  int dim_;
  OdeField field_;
  StepControl control_;
  double previous_error_ = 1.0;
};

}  // namespace dlimp
