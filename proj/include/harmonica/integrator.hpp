#pragma once

#include <Eigen/Dense>
#include <functional>

namespace harmonica {

struct OdeOptions {
  double rtol = 1e-9;
  double atol = 1e-12;
  double initial_step = 0.0;  // 0: automatic
  double max_step = 0.0;      // 0: unbounded
  long max_steps = 50'000'000;
};

/// dy/dt = f(t, y), written into `dy`.
using OdeRhs = std::function<void(double, const Eigen::VectorXd&, Eigen::VectorXd&)>;

/// Dormand-Prince 5(4) with FSAL, local extrapolation and the 4th-order
/// continuous extension for dense output. Holds mutable stepping state; one
/// instance per trajectory.
class DormandPrince45 {
 public:
  DormandPrince45(OdeRhs rhs, double t0, Eigen::VectorXd y0, OdeOptions opts = {});

  /// Optional domain predicate: trial states for which it returns false are
  /// rejected and the step is shrunk.
  void set_admissible(std::function<bool(const Eigen::VectorXd&)> pred) {
    admissible_ = std::move(pred);
  }

  /// Advance by one accepted step, never past `t_limit`.
  void step(double t_limit);

  /// Advance until time() == t_end.
  void advance_to(double t_end);

  double time() const { return t_; }
  double previous_time() const { return t_prev_; }
  const Eigen::VectorXd& state() const { return y_; }
  double step_size() const { return h_; }

  /// Interpolated state inside the last accepted step [previous_time, time].
  Eigen::VectorXd dense(double t) const;

  long accepted_steps() const { return accepted_; }
  long rejected_steps() const { return rejected_; }

 private:
  double initial_step() const;
  double error_norm(const Eigen::VectorXd& err, const Eigen::VectorXd& y0,
                    const Eigen::VectorXd& y1) const;

  OdeRhs rhs_;
  OdeOptions opts_;
  std::function<bool(const Eigen::VectorXd&)> admissible_;

  double t_ = 0.0, t_prev_ = 0.0, h_ = 0.0;
  Eigen::VectorXd y_, k1_;
  // Continuous-extension coefficients of the last step.
  Eigen::VectorXd r1_, r2_, r3_, r4_, r5_;
  long accepted_ = 0, rejected_ = 0;
};

}  // namespace harmonica
