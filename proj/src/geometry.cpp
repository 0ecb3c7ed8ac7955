#include "harmonica/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

#include "harmonica/errors.hpp"
#include "harmonica/quadrature.hpp"

namespace harmonica {

namespace {

const Eigen::VectorXd& checked_block(const EffProfile& xt, int player) {
  if (player < 0 || player >= static_cast<int>(xt.size()))
    throw DimensionError("player index out of range");
  const Eigen::VectorXd& b = xt[player];
  if (!(b.array() > 0.0).all() || !(b.sum() < 1.0))
    throw BoundaryError("effective block " + std::to_string(player) +
                        " is not in the open corner of cube");
  return b;
}

void require_finite(const EffTangent& v) {
  for (const auto& b : v.blocks)
    if (!b.allFinite()) throw std::domain_error("vector field returned a non-finite value");
}

}  // namespace

Eigen::MatrixXd metric_eff(const EffProfile& xt, int player) {
  return metric_eff(checked_block(xt, player));
}

Eigen::MatrixXd metric_eff_inverse(const EffProfile& xt, int player) {
  return metric_eff_inverse(checked_block(xt, player));
}

Eigen::VectorXd ambient_partials(const SmoothFunction& f, const MixedProfile& x, int player) {
  if (f.partials) return f.partials(x, player);
  const Eigen::Index n = x[player].size();
  Eigen::VectorXd d(n);
  const double h = std::clamp(1e-6 * x[player].minCoeff(), 1e-9, 1e-6);
  MixedProfile probe = x;
  for (Eigen::Index a = 0; a < n; ++a) {
    probe[player][a] = x[player][a] + h;
    const double up = f.value(probe);
    probe[player][a] = x[player][a] - h;
    const double down = f.value(probe);
    probe[player][a] = x[player][a];
    d[a] = (up - down) / (2.0 * h);
  }
  return d;
}

Eigen::VectorXd shah_gradient(const SmoothFunction& f, const MixedProfile& x, int player) {
  if (!(x[player].array() > 0.0).all()) throw BoundaryError("shah_gradient needs an interior point");
  return shah_gradient(ambient_partials(f, x, player), x[player]);
}

double divergence_step(const Eigen::VectorXd& xt_block) {
  const double x0 = 1.0 - xt_block.sum();
  return std::clamp(1e-6 * std::min(xt_block.minCoeff(), x0), 1e-9, 1e-6);
}

double shah_divergence(const EffVectorField& field, const EffProfile& xt, JacobianMode mode) {
  for (int i = 0; i < static_cast<int>(xt.size()); ++i) checked_block(xt, i);
  const EffTangent f0 = field.field(xt);
  require_finite(f0);

  double div = 0.0;
  if (mode == JacobianMode::analytic) {
    if (!field.jacobian) throw std::invalid_argument("field has no analytic Jacobian");
    const Eigen::MatrixXd jac = field.jacobian(xt);
    Eigen::Index off = 0;
    for (std::size_t i = 0; i < xt.size(); ++i) {
      const Eigen::VectorXd& b = xt[i];
      const double x0 = 1.0 - b.sum();
      for (Eigen::Index l = 0; l < b.size(); ++l) {
        div += jac(off + l, off + l);
        div += 0.5 * f0[i][l] * (1.0 / x0 - 1.0 / b[l]);
      }
      off += b.size();
    }
    return div;
  }

  // Difference sqrt(det G_i) F_il directly, then divide by sqrt(det G_i).
  EffProfile probe = xt;
  for (std::size_t i = 0; i < xt.size(); ++i) {
    const Eigen::VectorXd& b = xt[i];
    const double h = divergence_step(b);
    const double vol0 = std::exp(0.5 * metric_eff_log_det(b));
    for (Eigen::Index l = 0; l < b.size(); ++l) {
      probe[i][l] = b[l] + h;
      const EffTangent up = field.field(probe);
      const double vol_up = std::exp(0.5 * metric_eff_log_det(probe[i]));
      probe[i][l] = b[l] - h;
      const EffTangent down = field.field(probe);
      const double vol_down = std::exp(0.5 * metric_eff_log_det(probe[i]));
      probe[i][l] = b[l];
      require_finite(up);
      require_finite(down);
      div += (vol_up * up[i][l] - vol_down * down[i][l]) / (2.0 * h) / vol0;
    }
  }
  return div;
}

DivergenceForms replicator_divergence_forms(const Game& g, const MixedProfile& x) {
  validate_mixed(g, x, 1e-10);
  if (!is_interior(x)) throw BoundaryError("divergence needs an interior profile");
  const PayoffField v = payoff_field(g, x);
  DivergenceForms out{0.0, 0.0};
  for (int i = 0; i < g.num_players(); ++i) {
    const double n = g.actions(i);
    const double u = v[i].dot(x[i]);
    out.payoff_form += 0.5 * (v[i].sum() - n * u);
    out.barycentric_form -= 0.5 * n * v[i].dot((x[i].array() - 1.0 / n).matrix());
  }
  return out;
}

double replicator_divergence_analytic(const Game& g, const MixedProfile& x) {
  const DivergenceForms f = replicator_divergence_forms(g, x);
  double scale = 1.0;
  for (int i = 0; i < g.num_players(); ++i)
    scale = std::max(scale, g.actions(i) * g.payoffs(i).cwiseAbs().maxCoeff());
  if (std::abs(f.payoff_form - f.barycentric_form) > 1e-10 * scale)
    throw std::logic_error("closed forms of the replicator divergence disagree");
  return f.payoff_form;
}

double simplex_volume_shah(int m) {
  if (m < 1) throw std::invalid_argument("simplex_volume_shah: m must be >= 1");
  const double h = 0.5 * (m + 1);
  return std::pow(std::numbers::pi, h) / std::tgamma(h);
}

double strategy_space_volume(const Game& g) {
  double v = 1.0;
  for (int n : g.action_counts()) v *= simplex_volume_shah(n - 1);
  return v;
}

namespace {

// sqrt(det G) at the block xt, through the metric itself rather than the
// closed-form determinant.
double volume_density(const Eigen::VectorXd& xt) { return std::sqrt(metric_eff(xt).determinant()); }

double volume_rule(int m, int n) {
  if (m == 1) {
    // Weight x^{-1/2} (1 - x)^{-1/2} on [0, 1].
    const QuadratureRule r = gauss_jacobi_unit(n, -0.5, -0.5);
    double s = 0.0;
    for (int k = 0; k < n; ++k) {
      const double x = r.nodes[k];
      s += r.weights[k] * volume_density(Eigen::VectorXd::Constant(1, x)) *
           std::sqrt(x * (1.0 - x));
    }
    return s;
  }
  // m = 2: xt = (u, (1 - u) s), dxt = (1 - u) du ds. Weights u^{-1/2} and
  // s^{-1/2} (1 - s)^{-1/2} carry the edge singularities.
  const QuadratureRule ru = gauss_jacobi_unit(n, -0.5, 0.0);
  const QuadratureRule rs = gauss_jacobi_unit(n, -0.5, -0.5);
  double s = 0.0;
  for (int a = 0; a < n; ++a) {
    const double u = ru.nodes[a];
    for (int b = 0; b < n; ++b) {
      const double t = rs.nodes[b];
      Eigen::Vector2d xt(u, (1.0 - u) * t);
      const double weight_fn = std::sqrt(u) * std::sqrt(t * (1.0 - t));
      s += ru.weights[a] * rs.weights[b] * volume_density(xt) * (1.0 - u) * weight_fn;
    }
  }
  return s;
}

}  // namespace

VolumeEstimate simplex_volume_numeric(int m, int points, double tol, int max_points) {
  if (m != 1 && m != 2) throw std::invalid_argument("simplex_volume_numeric supports m = 1, 2");
  if (points < 1) throw std::invalid_argument("simplex_volume_numeric: points must be positive");
  VolumeEstimate est;
  double prev = volume_rule(m, points);
  for (int n = 2 * points; n <= max_points; n *= 2) {
    const double cur = volume_rule(m, n);
    est.value = cur;
    est.points = n;
    est.change = std::abs(cur - prev);
    if (est.change <= tol) {
      est.converged = true;
      return est;
    }
    prev = cur;
  }
  if (est.points == 0) {
    est.value = prev;
    est.points = points;
  }
  return est;
}

double simplex_volume_truncated(double eps, int points) {
  if (!(eps > 0.0) || !(eps < 0.5)) throw std::invalid_argument("eps must lie in (0, 1/2)");
  // x = sin^2(theta) removes the singularity: dx = 2 sin cos dtheta.
  const double lo = std::asin(std::sqrt(eps));
  const double hi = std::asin(std::sqrt(1.0 - eps));
  const QuadratureRule r = gauss_legendre(points, lo, hi);
  double s = 0.0;
  for (int k = 0; k < points; ++k) {
    const double th = r.nodes[k];
    const double x = std::sin(th) * std::sin(th);
    s += r.weights[k] * volume_density(Eigen::VectorXd::Constant(1, x)) * 2.0 * std::sin(th) *
         std::cos(th);
  }
  return s;
}

}  // namespace harmonica
