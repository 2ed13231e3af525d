#include "dlimp/integrator.hpp"

#include <algorithm>
#include <cmath>

#include "dlimp/errors.hpp"

namespace dlimp {

namespace {

// Dormand-Prince 5(4) tableau.
constexpr double a21 = 1.0 / 5;
constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561,
                 a54 = -212.0 / 729;
constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247,
                 a64 = 49.0 / 176, a65 = -5103.0 / 18656;
constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192,
                 b5 = -2187.0 / 6784, b6 = 11.0 / 84;
constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920,
                 e5 = -17253.0 / 339200, e6 = 22.0 / 525, e7 = -1.0 / 40;
// Dense-output coefficients (Hairer/dopri5).
constexpr double d1 = -12715105075.0 / 11282082432.0;
constexpr double d3 = 87487479700.0 / 32700410799.0;
constexpr double d4 = -10690763975.0 / 1880347072.0;
constexpr double d5 = 701980252875.0 / 199316789632.0;
constexpr double d6 = -1453857185.0 / 822651844.0;
constexpr double d7 = 69997945.0 / 29380423.0;

}  // namespace

void DensePath::sample(double t, double* y) const {
  if (steps_.empty()) {
    for (int i = 0; i < dim_; ++i) y[i] = y_end_[i];
    return;
  }
  // Binary search over step start times (monotone in integration direction).
  bool forward = t_end_ >= t_start_;
  size_t lo = 0;
  size_t hi = steps_.size() - 1;
  while (lo < hi) {
    size_t mid = (lo + hi + 1) / 2;
    bool before = forward ? steps_[mid].t0 <= t : steps_[mid].t0 >= t;
    if (before) {
      lo = mid;
    } else {
      hi = mid - 1;
    }
  }
  steps_[lo].interpolate(t, y, dim_);
}

void DensePath::append(DenseStep step, std::vector<double> y_new) {
  t_end_ = step.t0 + step.h;
  steps_.push_back(std::move(step));
  y_end_ = std::move(y_new);
}

DormandPrince::DormandPrince(int dim, OdeField field, StepControl control)
    : dim_(dim), field_(std::move(field)), control_(control) {}

bool DormandPrince::attempt_step(double t, const std::vector<double>& y,
                                 const std::vector<double>& k1, double h,
                                 DenseStep& step, std::vector<double>& y_new,
                                 std::vector<double>& k_new, double& error_norm) {
  const int n = dim_;
  std::vector<double> k2(n), k3(n), k4(n), k5(n), k6(n), k7(n), work(n);

  for (int i = 0; i < n; ++i) work[i] = y[i] + h * a21 * k1[i];
  field_(t + h / 5, work.data(), k2.data());
  for (int i = 0; i < n; ++i) work[i] = y[i] + h * (a31 * k1[i] + a32 * k2[i]);
  field_(t + 3.0 / 10 * h, work.data(), k3.data());
  for (int i = 0; i < n; ++i) {
    work[i] = y[i] + h * (a41 * k1[i] + a42 * k2[i] + a43 * k3[i]);
  }
  field_(t + 4.0 / 5 * h, work.data(), k4.data());
  for (int i = 0; i < n; ++i) {
    work[i] = y[i] + h * (a51 * k1[i] + a52 * k2[i] + a53 * k3[i] + a54 * k4[i]);
  }
  field_(t + 8.0 / 9 * h, work.data(), k5.data());
  for (int i = 0; i < n; ++i) {
    work[i] = y[i] + h * (a61 * k1[i] + a62 * k2[i] + a63 * k3[i] + a64 * k4[i] +
                          a65 * k5[i]);
  }
  field_(t + h, work.data(), k6.data());
  for (int i = 0; i < n; ++i) {
    y_new[i] = y[i] + h * (b1 * k1[i] + b3 * k3[i] + b4 * k4[i] + b5 * k5[i] +
                           b6 * k6[i]);
  }
  field_(t + h, y_new.data(), k7.data());  // FSAL

  error_norm = 0;
  for (int i = 0; i < n; ++i) {
    double err = h * (e1 * k1[i] + e3 * k3[i] + e4 * k4[i] + e5 * k5[i] + e6 * k6[i] +
                      e7 * k7[i]);
    double scale = control_.abs_tol +
                   control_.rel_tol * std::max(std::abs(y[i]), std::abs(y_new[i]));
    double ratio = err / scale;
    error_norm += ratio * ratio;
  }
  error_norm = std::sqrt(error_norm / n);

  if (error_norm <= 1.0) {
    step.t0 = t;
    step.h = h;
    step.r1.assign(y.begin(), y.end());
    step.r2.resize(n);
    step.r3.resize(n);
    step.r4.resize(n);
    step.r5.resize(n);
    for (int i = 0; i < n; ++i) {
      double dy = y_new[i] - y[i];
      double bspl = h * k1[i] - dy;
      step.r2[i] = dy;
      step.r3[i] = bspl;
      step.r4[i] = dy - h * k7[i] - bspl;
      step.r5[i] = h * (d1 * k1[i] + d3 * k3[i] + d4 * k4[i] + d5 * k5[i] +
                        d6 * k6[i] + d7 * k7[i]);
    }
    k_new = k7;
    return true;
  }
  return false;
}

void DormandPrince::extend(DensePath& path, double t_target) {
  if (!path.poisoned.empty()) throw IntegrationError(path.poisoned);
  if (path.covers(t_target)) return;

  double t = path.t_end();
  std::vector<double> y = path.y_end();
  double direction = t_target >= t ? 1.0 : -1.0;
  std::vector<double> k1(dim_);
  field_(t, y.data(), k1.data());

  double h = direction * std::min(control_.initial_step, control_.max_step);
  std::vector<double> y_new(dim_), k_new(dim_);
  long steps = 0;

  while (direction * (t_target - t) > 0) {
    if (++steps > control_.max_steps) {
      path.poisoned = "integration exceeded the step budget";
      throw IntegrationError(path.poisoned);
    }
    double remaining = t_target - t;
    if (std::abs(h) > std::abs(remaining)) h = remaining;
    if (std::abs(h) > control_.max_step) h = direction * control_.max_step;
    if (std::abs(h) < 1e-14 * std::max(1.0, std::abs(t))) {
      path.poisoned = "integration step underflow near t=" + std::to_string(t);
      throw IntegrationError(path.poisoned);
    }

    DenseStep step;
    double error_norm = 0;
    if (attempt_step(t, y, k1, h, step, y_new, k_new, error_norm)) {
      t = step.t0 + step.h;
      y = y_new;
      k1 = k_new;
      path.append(std::move(step), y);
      // PI controller (Hairer): limited growth, memory of the last error.
      double err = std::max(error_norm, 1e-10);
      double factor = 0.9 * std::pow(err, -0.17) * std::pow(previous_error_, 0.04);
      factor = std::clamp(factor, 0.2, 5.0);
      previous_error_ = err;
      h = direction * std::min(std::abs(h) * factor, control_.max_step);
    } else {
      double factor = std::max(0.1, 0.9 * std::pow(error_norm, -0.2));
      h *= std::min(factor, 1.0);
      if (!std::isfinite(error_norm) || !std::isfinite(h)) {
        path.poisoned = "integration diverged near t=" + std::to_string(t);
        throw IntegrationError(path.poisoned);
      }
    }
  }
}

std::vector<double> DormandPrince::integrate(double t0, std::vector<double> y0,
                                             double t1, const StepCallback& on_step) {
  DensePath path(dim_, t0, y0);
  if (t0 == t1) return y0;

  double t = t0;
  std::vector<double> y = std::move(y0);
  double direction = t1 >= t0 ? 1.0 : -1.0;
  std::vector<double> k1(dim_);
  field_(t, y.data(), k1.data());
  double h = direction * std::min(control_.initial_step, control_.max_step);
  std::vector<double> y_new(dim_), k_new(dim_);
  long steps = 0;

  while (direction * (t1 - t) > 1e-300) {
    if (++steps > control_.max_steps) {
      throw IntegrationError("integration exceeded the step budget");
    }
    double remaining = t1 - t;
    if (std::abs(h) > std::abs(remaining)) h = remaining;
    if (std::abs(h) > control_.max_step) h = direction * control_.max_step;
    if (std::abs(h) < 1e-14 * std::max(1.0, std::abs(t))) {
      throw IntegrationError("integration step underflow near t=" + std::to_string(t));
    }

    DenseStep step;
    double error_norm = 0;
    if (attempt_step(t, y, k1, h, step, y_new, k_new, error_norm)) {
      t = step.t0 + step.h;
      y = y_new;
      k1 = k_new;
      if (on_step && !on_step(step, y)) {
        return y;
      }
      double err = std::max(error_norm, 1e-10);
      double factor = 0.9 * std::pow(err, -0.17) * std::pow(previous_error_, 0.04);
      factor = std::clamp(factor, 0.2, 5.0);
      previous_error_ = err;
      h = direction * std::min(std::abs(h) * factor, control_.max_step);
    } else {
      double factor = std::max(0.1, 0.9 * std::pow(error_norm, -0.2));
      h *= std::min(factor, 1.0);
      if (!std::isfinite(error_norm) || !std::isfinite(h)) {
        throw IntegrationError("integration diverged near t=" + std::to_string(t));
      }
    }
  }
  return y;
}

}  // namespace dlimp
