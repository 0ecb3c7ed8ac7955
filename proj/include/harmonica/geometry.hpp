#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <functional>
#include <optional>

#include "harmonica/game.hpp"
#include "harmonica/profile.hpp"

namespace harmonica {

// ---------------------------------------------------------------------------
// Shahshahani metric in effective coordinates. `xt` is one player's block
// (strategy 0 dropped); x_0 = 1 - sum(xt).

template <class Derived>
Eigen::Matrix<typename Derived::Scalar, Eigen::Dynamic, Eigen::Dynamic> metric_eff(
    const Eigen::MatrixBase<Derived>& xt) {
  using Scalar = typename Derived::Scalar;
  using Mat = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
  const Scalar x0 = Scalar(1) - xt.sum();
  Mat g = Mat::Constant(xt.size(), xt.size(), Scalar(1) / x0);
  g.diagonal().array() += xt.array().inverse();
  return g;
}

/// Sherman-Morrison inverse: diag(xt) - xt xt^T.
template <class Derived>
Eigen::Matrix<typename Derived::Scalar, Eigen::Dynamic, Eigen::Dynamic> metric_eff_inverse(
    const Eigen::MatrixBase<Derived>& xt) {
  using Scalar = typename Derived::Scalar;
  using Mat = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
  Mat inv = -xt * xt.transpose();
  inv.diagonal() += xt;
  return inv;
}

/// log det G = -log x_0 - sum_l log xt_l.
template <class Derived>
typename Derived::Scalar metric_eff_log_det(const Eigen::MatrixBase<Derived>& xt) {
  using std::log;
  using Scalar = typename Derived::Scalar;
  return -log(Scalar(1) - xt.sum()) - xt.array().log().sum();
}

/// Checked versions on a full effective profile; throw BoundaryError off the
/// open corner of cube.
Eigen::MatrixXd metric_eff(const EffProfile& xt, int player);
Eigen::MatrixXd metric_eff_inverse(const EffProfile& xt, int player);

/// Shahshahani gradient of a function with ambient partials `partials` at
/// the interior simplex point `x`: x_a (d_a f - sum_b x_b d_b f).
template <class DerivedP, class DerivedX>
Eigen::Matrix<typename DerivedX::Scalar, Eigen::Dynamic, 1> shah_gradient(
    const Eigen::MatrixBase<DerivedP>& partials, const Eigen::MatrixBase<DerivedX>& x) {
  const auto mean = x.dot(partials);
  return x.cwiseProduct((partials.array() - mean).matrix());
}

/// <a, b>_x = sum_a a_a b_a / x_a on one simplex block.
template <class DA, class DB, class DX>
typename DX::Scalar shah_inner(const Eigen::MatrixBase<DA>& a, const Eigen::MatrixBase<DB>& b,
                               const Eigen::MatrixBase<DX>& x) {
  return (a.array() * b.array() / x.array()).sum();
}

/// Smooth scalar function on the product of simplices. `partials(x, i)`
/// returns the ambient partial derivatives of the block-i coordinates; when
/// absent they are taken by central differences.
struct SmoothFunction {
  std::function<double(const MixedProfile&)> value;
  std::function<Eigen::VectorXd(const MixedProfile&, int)> partials;
};

/// Ambient partials of `f` along block `player` (analytic if supplied).
Eigen::VectorXd ambient_partials(const SmoothFunction& f, const MixedProfile& x, int player);

/// Block `player` of the Shahshahani gradient; components sum to zero.
Eigen::VectorXd shah_gradient(const SmoothFunction& f, const MixedProfile& x, int player);

// ---------------------------------------------------------------------------
// Vector fields and divergence on the open corner of cube

/// Vector field xt -> blocks in R^{m_i}. `jacobian`, when set, returns the
/// dense (sum m_i)^2 Jacobian in flattened effective coordinates.
struct EffVectorField {
  std::function<EffTangent(const EffProfile&)> field;
  std::function<Eigen::MatrixXd(const EffProfile&)> jacobian;
};

enum class JacobianMode { analytic, finite_difference };

/// Central-difference step for one player's block: 1e-6 * min(xt, x_0)
/// clamped to [1e-9, 1e-6].
double divergence_step(const Eigen::VectorXd& xt_block);

/// Riemannian divergence of F, computed player by player:
///   sum_i sum_l [ d_l F_il + F_il d_l log sqrt(det G_i) ].
double shah_divergence(const EffVectorField& field, const EffProfile& xt, JacobianMode mode);

/// Both closed forms of the Shahshahani divergence of the effective
/// replicator field.
struct DivergenceForms {
  double payoff_form;       // 1/2 sum_i sum_a (v_ia - u_i)
  double barycentric_form;  // -1/2 sum_i n_i v_i . (x_i - b_i)
};
DivergenceForms replicator_divergence_forms(const Game& g, const MixedProfile& x);

/// Divergence of the replicator field at interior x; checks that the two
/// closed forms agree.
double replicator_divergence_analytic(const Game& g, const MixedProfile& x);

// ---------------------------------------------------------------------------
// Volumes

/// Shahshahani volume of the open m-simplex: pi^{(m+1)/2} / Gamma((m+1)/2).
double simplex_volume_shah(int m);

/// Product of per-player simplex volumes.
double strategy_space_volume(const Game& g);

struct VolumeEstimate {
  double value = 0.0;
  int points = 0;        // points per axis of the last rule used
  double change = 0.0;   // |last - previous| refinement difference
  bool converged = false;
};

/// Quadrature of sqrt(det G) over the open corner of cube for m = 1, 2 with
/// Gauss-Jacobi rules that absorb the inverse-square-root edge singularity.
/// Doubles the rule size from `points` until two refinements agree to `tol`.
VolumeEstimate simplex_volume_numeric(int m, int points = 4, double tol = 1e-12,
                                      int max_points = 512);

/// m = 1 only: integral of sqrt(det G) over [eps, 1 - eps].
double simplex_volume_truncated(double eps, int points = 64);

}  // namespace harmonica
