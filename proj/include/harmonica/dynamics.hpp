#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "harmonica/game.hpp"
#include "harmonica/geometry.hpp"
#include "harmonica/integrator.hpp"

namespace harmonica {

// ---------------------------------------------------------------------------
// Choice maps

/// Softmax of one score block, shifted by its maximum so large scores do not
/// overflow.
template <class Derived>
Eigen::Matrix<typename Derived::Scalar, Eigen::Dynamic, 1> logit(
    const Eigen::MatrixBase<Derived>& y) {
  using Vec = Eigen::Matrix<typename Derived::Scalar, Eigen::Dynamic, 1>;
  Vec e = (y.array() - y.maxCoeff()).exp().matrix();
  return e / e.sum();
}

/// log softmax of one score block; exact where the softmax itself underflows.
template <class Derived>
Eigen::Matrix<typename Derived::Scalar, Eigen::Dynamic, 1> log_logit(
    const Eigen::MatrixBase<Derived>& y) {
  using std::log;
  const auto top = y.maxCoeff();
  const auto lse = top + log((y.array() - top).exp().sum());
  return (y.array() - lse).matrix();
}

MixedProfile logit(const ScoreState& y);

// ---------------------------------------------------------------------------
// Replicator fields

/// xi_{ia} = x_{ia} [v_{ia}(x) - u_i(x)]; defined on the closed simplex.
Tangent replicator_field(const Game& g, const MixedProfile& x);

/// Effective replicator field xt_{il} [vt_{il} - sum_k xt_{ik} vt_{ik}].
EffTangent eff_replicator_field(const Game& g, const EffProfile& xt);

/// Dense Jacobian of the effective replicator field in flattened effective
/// coordinates, from the chain rule on the effective payoff field.
Eigen::MatrixXd eff_replicator_jacobian(const Game& g, const EffProfile& xt);

/// The effective replicator field packaged for `shah_divergence`.
EffVectorField replicator_vector_field(const Game& g);

// ---------------------------------------------------------------------------
// Constant of motion

/// E(x) = sum_i n_i KL(b_i || x_i) = -(sum_{i,a} log x_{ia} + sum_i n_i log n_i).
double constant_of_motion(const Game& g, const MixedProfile& x);
/// Same, evaluated from logit scores without forming x.
double constant_of_motion(const ScoreState& y);

// ---------------------------------------------------------------------------
// Trajectories

enum class Stepper {
  scores,     // dy_i/dt = v_i(logit(y)), the default
  effective,  // dxt/dt = eff replicator field, for cross-validation
};

struct IntegrateOptions {
  double rtol = 1e-9;
  double atol = 1e-12;
  double sample_dt = 0.1;  // output spacing; <= 0 records every accepted step
  Stepper stepper = Stepper::scores;
  bool track_volume = false;  // record log of the flow volume via the divergence integral
};

struct TrajectoryRecord {
  std::vector<double> times;
  std::vector<MixedProfile> states;
  std::vector<double> energy;
  std::vector<double> divergence;
  /// regret[k][i]: regret of player i over [0, times[k]].
  std::vector<Eigen::VectorXd> regret;
  /// cumulative_payoff[k][i][a] = int_0^{t_k} v_{ia} dt and
  /// cumulative_utility[k][i] = int_0^{t_k} u_i dt, both integrated with
  /// the trajectory.
  std::vector<PayoffField> cumulative_payoff;
  std::vector<Eigen::VectorXd> cumulative_utility;
  std::optional<std::vector<double>> logvol;
  long accepted_steps = 0;
  long rejected_steps = 0;
};

/// Integrate exponential weights / replicator dynamics from interior x0 on
/// [0, t_end]. Throws StiffnessError on step-size collapse.
TrajectoryRecord integrate(const Game& g, const MixedProfile& x0, double t_end,
                           const IntegrateOptions& opts = {});

/// Regret of `player` at the final recorded time:
/// max_b int [u_i(b; x_{-i}) - u_i(x)] dt. Uses the integrated payoff
/// quadratures when present, trapezoid on the sample grid otherwise.
double regret(const TrajectoryRecord& record, const Game& g, int player);
/// Regret at every recorded time.
std::vector<double> regret_series(const TrajectoryRecord& record, const Game& g, int player);
/// Trapezoid quadrature on the sample grid only.
std::vector<double> regret_series_trapezoid(const TrajectoryRecord& record, const Game& g,
                                            int player);

// ---------------------------------------------------------------------------
// Volume

struct VolumeTrack {
  std::vector<double> times;
  std::vector<EffProfile> states;
  /// log(sqrt(det G(xt(t))) |det J(t)|) - log sqrt(det G(xt0)), J the flow
  /// Jacobian from the variational equation.
  std::vector<double> logvol_jacobian;
  /// int_0^t div(xi)(xt(s)) ds.
  std::vector<double> logvol_divergence;
};

VolumeTrack volume_tracker(const Game& g, const EffProfile& xt0, double t_end,
                           const IntegrateOptions& opts = {});

// ---------------------------------------------------------------------------
// Recurrence

enum class RecurrenceVerdict { recurrent, not_observed };

struct RecurrenceReport {
  double epsilon = 0.0;
  double t_max = 0.0;
  std::optional<double> exit_time;  // first time |x(t) - x0| > epsilon
  std::vector<double> return_times;
  /// (window end time, min distance in the window), 200 windows.
  std::vector<std::pair<double, double>> min_distance_envelope;
  RecurrenceVerdict verdict = RecurrenceVerdict::not_observed;
};

/// Euclidean returns of the orbit of x0 to its epsilon-ball. A return is
/// counted only after the orbit has left the 2 epsilon-ball; three returns
/// make the verdict recurrent.
RecurrenceReport detect_recurrence(const Game& g, const MixedProfile& x0, double epsilon,
                                   double t_max, const IntegrateOptions& opts = {});

std::string to_string(RecurrenceVerdict v);

// ---------------------------------------------------------------------------
// Rest points

/// Damped Gauss-Newton on vt(xt) = 0 with the analytic Jacobian; steps are
/// halved until they stay interior and reduce |vt|. Empty on failure.
std::optional<EffProfile> interior_rest_point(const Game& g, const EffProfile& xt_init,
                                              double newton_tol = 1e-12, int max_iter = 100);

}  // namespace harmonica
