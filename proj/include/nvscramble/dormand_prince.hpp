#pragma once

// Embedded Runge-Kutta 5(4) pair of Dormand and Prince with PI step-size
// control and the standard 4th-order continuous extension.

#include <cstddef>
#include <functional>
#include <stdexcept>
#include <string>

#include <Eigen/Dense>

namespace nvs {

class IntegrationError : public std::runtime_error {
 public:
  IntegrationError(const std::string& what, double t) : std::runtime_error(what), t_(t) {}
  /// Time at which the integrator gave up.
  double time() const noexcept { return t_; }

 private:
  double t_;
};

struct StepControl {
  double rtol = 1e-9;
  double atol = 1e-9;
  double h_initial = 0.0;  // 0 selects a step automatically
  double h_max = 0.0;      // 0 means unbounded
  std::size_t max_steps = 10'000'000;
};

struct IntegratorStats {
  std::size_t accepted = 0;
  std::size_t rejected = 0;
  std::size_t rhs_evaluations = 0;
  double last_step = 0.0;
};

class DormandPrince {
 public:
  using Vec = Eigen::VectorXd;
  using Rhs = std::function<void(double t, const Vec& y, Vec& dydt)>;
  /// Called at each sample time with the interpolated state.
  using Sampler = std::function<void(double t, const Vec& y)>;
  /// Called after each accepted step; may modify y in place and must return
  /// true if it did, so the cached derivative is refreshed.
  using PostStep = std::function<bool(double t, Vec& y)>;

  DormandPrince(Rhs rhs, StepControl control);

  /// Integrates from t0 to t1 (t1 may be smaller than t0). Samples are taken at
  /// t0 + k * dt_out for every k with the sample time inside [t0, t1], and at
  /// t1 itself when it is not on that grid and `include_end` is set.
  /// Returns the state at t1.
  Vec integrate(double t0, const Vec& y0, double t1, double dt_out, const Sampler& sample,
                const PostStep& post = {}, bool include_end = false);

  const IntegratorStats& stats() const { return stats_; }

 private:
  double initial_step(double t0, const Vec& y0, const Vec& f0, double direction);
  double error_norm(const Vec& y0, const Vec& y1, const Vec& err) const;

  Rhs rhs_;
  StepControl control_;
  IntegratorStats stats_;
};

}  // namespace nvs
