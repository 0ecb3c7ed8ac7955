#include "harmonica/dynamics.hpp"

#include <Eigen/QR>
#include <algorithm>
#include <cmath>
#include <limits>

#include "harmonica/errors.hpp"

namespace harmonica {

namespace {

std::vector<int> full_sizes(const Game& g) { return g.action_counts(); }

Eigen::Index total(const std::vector<int>& sizes) {
  Eigen::Index n = 0;
  for (int s : sizes) n += s;
  return n;
}

// embed() without the boundary check; Runge-Kutta stages may leave the
// domain briefly and the polynomial fields are defined everywhere.
MixedProfile embed_unchecked(const EffProfile& xt) {
  MixedProfile x;
  x.blocks.reserve(xt.size());
  for (const auto& b : xt.blocks) {
    Eigen::VectorXd full(b.size() + 1);
    full[0] = 1.0 - b.sum();
    full.tail(b.size()) = b;
    x.blocks.push_back(std::move(full));
  }
  return x;
}

double divergence_from_field(const Game& g, const MixedProfile& x, const PayoffField& v) {
  double div = 0.0;
  for (int i = 0; i < g.num_players(); ++i)
    div += 0.5 * (v[i].sum() - g.actions(i) * v[i].dot(x[i]));
  return div;
}

double energy_constant(const Game& g) {
  double c = 0.0;
  for (int n : g.action_counts()) c += n * std::log(static_cast<double>(n));
  return c;
}

// Effective replicator field (flattened) and its Jacobian at xt, without
// domain checks. Jacobian entries:
//   own block   d xi_il / d xt_ik = delta_lk (vt_il - mean_i) - xt_il vt_ik
//   other block d xi_il / d xt_jk = xt_il (B_il,jk - sum_m xt_im B_im,jk)
// with B the effective payoff Jacobian (zero on own blocks).
void assemble_replicator(const Game& g, const EffProfile& xt, Eigen::VectorXd* field,
                         Eigen::MatrixXd* jac) {
  const auto sizes = g.effective_sizes();
  std::vector<Eigen::Index> off(sizes.size() + 1, 0);
  for (std::size_t i = 0; i < sizes.size(); ++i) off[i + 1] = off[i] + sizes[i];
  const Eigen::Index d = off.back();

  const MixedProfile x = embed_unchecked(xt);
  const PayoffField v = payoff_field(g, x);
  Eigen::MatrixXd dv;
  if (jac) {
    dv = eff_payoff_jacobian(g, x);
    jac->setZero(d, d);
  }
  if (field) field->resize(d);

  for (std::size_t i = 0; i < sizes.size(); ++i) {
    const int m = sizes[i];
    const Eigen::VectorXd& b = xt[i];
    const Eigen::VectorXd vt = v[i].tail(m).array() - v[i][0];
    const double mean = vt.dot(b);
    if (field) field->segment(off[i], m) = b.cwiseProduct((vt.array() - mean).matrix());
    if (!jac) continue;
    auto own = jac->block(off[i], off[i], m, m);
    own = -b * vt.transpose();
    own.diagonal().array() += vt.array() - mean;
    for (std::size_t j = 0; j < sizes.size(); ++j) {
      if (j == i) continue;
      const Eigen::MatrixXd bij = dv.block(off[i], off[j], m, sizes[j]);
      const Eigen::RowVectorXd avg = b.transpose() * bij;
      jac->block(off[i], off[j], m, sizes[j]) = b.asDiagonal() * (bij.rowwise() - avg);
    }
  }
}

}  // namespace

MixedProfile logit(const ScoreState& y) {
  MixedProfile x;
  x.blocks.reserve(y.size());
  for (const auto& b : y.blocks) {
    if (!b.allFinite()) throw std::domain_error("logit: non-finite score");
    x.blocks.push_back(logit(b));
  }
  return x;
}

Tangent replicator_field(const Game& g, const MixedProfile& x) {
  validate_mixed(g, x, 1e-9);
  const PayoffField v = payoff_field(g, x);
  Tangent xi;
  xi.blocks.reserve(v.size());
  for (int i = 0; i < g.num_players(); ++i)
    xi.blocks.emplace_back(x[i].cwiseProduct((v[i].array() - v[i].dot(x[i])).matrix()));
  return xi;
}

EffTangent eff_replicator_field(const Game& g, const EffProfile& xt) {
  validate_effective(g, xt);
  const EffPayoffField vt = eff_payoff_field(g, embed(xt));
  EffTangent xi;
  xi.blocks.reserve(vt.size());
  for (std::size_t i = 0; i < vt.size(); ++i)
    xi.blocks.emplace_back(xt[i].cwiseProduct((vt[i].array() - vt[i].dot(xt[i])).matrix()));
  return xi;
}

Eigen::MatrixXd eff_replicator_jacobian(const Game& g, const EffProfile& xt) {
  validate_effective(g, xt);
  Eigen::MatrixXd jac;
  assemble_replicator(g, xt, nullptr, &jac);
  return jac;
}

EffVectorField replicator_vector_field(const Game& g) {
  return EffVectorField{[g](const EffProfile& xt) { return eff_replicator_field(g, xt); },
                        [g](const EffProfile& xt) { return eff_replicator_jacobian(g, xt); }};
}

double constant_of_motion(const Game& g, const MixedProfile& x) {
  validate_mixed(g, x, 1e-9);
  if (!is_interior(x)) throw BoundaryError("constant of motion is infinite on the boundary");
  double s = 0.0;
  for (const auto& b : x.blocks) s += b.array().log().sum();
  return -(s + energy_constant(g));
}

double constant_of_motion(const ScoreState& y) {
  double s = 0.0, c = 0.0;
  for (const auto& b : y.blocks) {
    s += log_logit(b).sum();
    const double n = static_cast<double>(b.size());
    c += n * std::log(n);
  }
  return -(s + c);
}

// ---------------------------------------------------------------------------

TrajectoryRecord integrate(const Game& g, const MixedProfile& x0, double t_end,
                           const IntegrateOptions& opts) {
  validate_mixed(g, x0, 1e-10);
  if (!is_interior(x0)) throw BoundaryError("integrate needs an interior initial profile");
  if (!(t_end > 0.0)) throw std::invalid_argument("integrate: t_end must be positive");

  const int players = g.num_players();
  const std::vector<int> sizes = full_sizes(g);
  const std::vector<int> eff_sizes = g.effective_sizes();
  const Eigen::Index n_full = total(sizes);
  const Eigen::Index n_eff = total(eff_sizes);
  const bool scores = opts.stepper == Stepper::scores;

  // Layout: [position | cumulative v (effective stepper only) | int u | int div]
  const Eigen::Index n_pos = scores ? n_full : n_eff;
  const Eigen::Index off_cumv = n_pos;
  const Eigen::Index off_cumu = scores ? n_pos : n_pos + n_full;
  const Eigen::Index off_div = off_cumu + players;
  const Eigen::Index n_state = off_div + (opts.track_volume ? 1 : 0);

  Eigen::VectorXd z0 = Eigen::VectorXd::Zero(n_state);
  Eigen::VectorXd y_init;
  if (scores) {
    ScoreState y;
    for (const auto& b : x0.blocks) y.blocks.emplace_back(b.array().log().matrix());
    y_init = y.flat();
    z0.head(n_full) = y_init;
  } else {
    z0.head(n_eff) = reduce(x0).flat();
  }

  auto position = [&](const Eigen::VectorXd& z) -> MixedProfile {
    if (scores) return logit(ScoreState::from_flat(z.head(n_full), sizes));
    return embed_unchecked(EffProfile::from_flat(z.head(n_eff), eff_sizes));
  };

  OdeRhs rhs = [&](double, const Eigen::VectorXd& z, Eigen::VectorXd& dz) {
    const MixedProfile x = position(z);
    const PayoffField v = payoff_field(g, x);
    dz.setZero(z.size());
    Eigen::Index off = 0, eoff = 0;
    for (int i = 0; i < players; ++i) {
      const double u = v[i].dot(x[i]);
      if (scores) {
        dz.segment(off, sizes[i]) = v[i];
      } else {
        const Eigen::VectorXd vt = v[i].tail(eff_sizes[i]).array() - v[i][0];
        const Eigen::VectorXd xt = x[i].tail(eff_sizes[i]);
        dz.segment(eoff, eff_sizes[i]) = xt.cwiseProduct((vt.array() - vt.dot(xt)).matrix());
        dz.segment(off_cumv + off, sizes[i]) = v[i];
      }
      dz[off_cumu + i] = u;
      off += sizes[i];
      eoff += eff_sizes[i];
    }
    if (opts.track_volume) dz[off_div] = divergence_from_field(g, x, v);
  };

  OdeOptions ode;
  ode.rtol = opts.rtol;
  ode.atol = opts.atol;
  DormandPrince45 solver(rhs, 0.0, z0, ode);
  if (!scores) {
    solver.set_admissible([&](const Eigen::VectorXd& z) {
      return is_interior(EffProfile::from_flat(z.head(n_eff), eff_sizes));
    });
  }

  TrajectoryRecord rec;
  if (opts.track_volume) rec.logvol.emplace();
  const double e_const = energy_constant(g);

  auto record = [&](double t, const Eigen::VectorXd& z) {
    const MixedProfile x = position(z);
    const PayoffField v = payoff_field(g, x);
    rec.times.push_back(t);
    if (scores) {
      const ScoreState y = ScoreState::from_flat(z.head(n_full), sizes);
      rec.energy.push_back(constant_of_motion(y));
    } else {
      double s = 0.0;
      for (const auto& b : x.blocks) s += b.array().log().sum();
      rec.energy.push_back(-(s + e_const));
    }
    rec.divergence.push_back(divergence_from_field(g, x, v));

    const Eigen::VectorXd cumv_flat =
        scores ? Eigen::VectorXd(z.head(n_full) - y_init) : Eigen::VectorXd(z.segment(off_cumv, n_full));
    PayoffField cumv = PayoffField::from_flat(cumv_flat, sizes);
    Eigen::VectorXd cumu = z.segment(off_cumu, players);
    Eigen::VectorXd reg(players);
    for (int i = 0; i < players; ++i) reg[i] = cumv[i].maxCoeff() - cumu[i];
    rec.regret.push_back(reg);
    rec.cumulative_payoff.push_back(std::move(cumv));
    rec.cumulative_utility.push_back(std::move(cumu));
    if (opts.track_volume) rec.logvol->push_back(z[off_div]);
    rec.states.push_back(x);
  };

  record(0.0, z0);
  long next = 1;
  while (solver.time() < t_end) {
    solver.step(t_end);
    if (opts.sample_dt <= 0.0) {
      record(solver.time(), solver.state());
      continue;
    }
    for (;; ++next) {
      const double ts = std::min(next * opts.sample_dt, t_end);
      if (ts > solver.time()) break;
      if (ts > rec.times.back()) record(ts, ts == solver.time() ? solver.state() : solver.dense(ts));
      if (ts == t_end) break;
    }
  }
  if (rec.times.back() < t_end) record(t_end, solver.state());
  rec.accepted_steps = solver.accepted_steps();
  rec.rejected_steps = solver.rejected_steps();
  return rec;
}

std::vector<double> regret_series(const TrajectoryRecord& record, const Game& g, int player) {
  if (record.times.empty()) throw std::invalid_argument("regret: empty trajectory");
  if (player < 0 || player >= g.num_players()) throw DimensionError("player index out of range");
  if (record.cumulative_payoff.size() != record.times.size())
    return regret_series_trapezoid(record, g, player);
  std::vector<double> out(record.times.size());
  for (std::size_t k = 0; k < out.size(); ++k)
    out[k] = record.cumulative_payoff[k][player].maxCoeff() - record.cumulative_utility[k][player];
  return out;
}

std::vector<double> regret_series_trapezoid(const TrajectoryRecord& record, const Game& g,
                                            int player) {
  if (record.times.empty()) throw std::invalid_argument("regret: empty trajectory");
  const int n = g.actions(player);
  Eigen::VectorXd acc = Eigen::VectorXd::Zero(n);
  std::vector<double> out(record.times.size(), 0.0);
  // Integrand u_i(b; x_{-i}) - u_i(x) = v_ib - <v_i, x_i>.
  auto gap = [&](std::size_t k) {
    const Eigen::VectorXd v = contract_except(g.payoffs(player), g.action_counts(),
                                              record.states[k], player);
    return Eigen::VectorXd(v.array() - v.dot(record.states[k][player]));
  };
  Eigen::VectorXd prev = gap(0);
  for (std::size_t k = 1; k < record.times.size(); ++k) {
    const Eigen::VectorXd cur = gap(k);
    acc += 0.5 * (record.times[k] - record.times[k - 1]) * (prev + cur);
    out[k] = acc.maxCoeff();
    prev = cur;
  }
  out[0] = 0.0;
  return out;
}

double regret(const TrajectoryRecord& record, const Game& g, int player) {
  return regret_series(record, g, player).back();
}

// ---------------------------------------------------------------------------

VolumeTrack volume_tracker(const Game& g, const EffProfile& xt0, double t_end,
                           const IntegrateOptions& opts) {
  validate_effective(g, xt0);
  const std::vector<int> eff_sizes = g.effective_sizes();
  const Eigen::Index d = total(eff_sizes);
  // Layout: [xt (d) | J column-major (d*d) | int div]
  const Eigen::Index n_state = d + d * d + 1;

  Eigen::VectorXd z0 = Eigen::VectorXd::Zero(n_state);
  z0.head(d) = xt0.flat();
  Eigen::Map<Eigen::MatrixXd>(z0.data() + d, d, d).setIdentity();

  OdeRhs rhs = [&](double, const Eigen::VectorXd& z, Eigen::VectorXd& dz) {
    const EffProfile xt = EffProfile::from_flat(z.head(d), eff_sizes);
    Eigen::VectorXd xi;
    Eigen::MatrixXd jac;
    assemble_replicator(g, xt, &xi, &jac);
    const MixedProfile x = embed_unchecked(xt);
    dz.resize(z.size());
    dz.head(d) = xi;
    Eigen::Map<const Eigen::MatrixXd> J(z.data() + d, d, d);
    Eigen::Map<Eigen::MatrixXd>(dz.data() + d, d, d) = jac * J;
    dz[d + d * d] = divergence_from_field(g, x, payoff_field(g, x));
  };

  OdeOptions ode;
  ode.rtol = opts.rtol;
  ode.atol = opts.atol;
  DormandPrince45 solver(rhs, 0.0, z0, ode);
  solver.set_admissible([&](const Eigen::VectorXd& z) {
    return is_interior(EffProfile::from_flat(z.head(d), eff_sizes));
  });

  double logdet0 = 0.0;
  for (const auto& b : xt0.blocks) logdet0 += metric_eff_log_det(b);

  VolumeTrack track;
  auto record = [&](double t, const Eigen::VectorXd& z) {
    EffProfile xt = EffProfile::from_flat(z.head(d), eff_sizes);
    double logdet = 0.0;
    for (const auto& b : xt.blocks) logdet += metric_eff_log_det(b);
    Eigen::Map<const Eigen::MatrixXd> J(z.data() + d, d, d);
    const double logj = Eigen::PartialPivLU<Eigen::MatrixXd>(J).matrixLU().diagonal().array().abs().log().sum();
    track.times.push_back(t);
    track.states.push_back(std::move(xt));
    track.logvol_jacobian.push_back(0.5 * (logdet - logdet0) + logj);
    track.logvol_divergence.push_back(z[d + d * d]);
  };

  record(0.0, z0);
  const double dt = opts.sample_dt;
  long next = 1;
  while (solver.time() < t_end) {
    solver.step(t_end);
    if (dt <= 0.0) {
      record(solver.time(), solver.state());
      continue;
    }
    for (;; ++next) {
      const double ts = std::min(next * dt, t_end);
      if (ts > solver.time()) break;
      if (ts > track.times.back()) record(ts, ts == solver.time() ? solver.state() : solver.dense(ts));
      if (ts == t_end) break;
    }
  }
  if (track.times.back() < t_end) record(t_end, solver.state());
  return track;
}

// ---------------------------------------------------------------------------

std::string to_string(RecurrenceVerdict v) {
  return v == RecurrenceVerdict::recurrent ? "recurrent" : "not-observed";
}

RecurrenceReport detect_recurrence(const Game& g, const MixedProfile& x0, double epsilon,
                                   double t_max, const IntegrateOptions& opts) {
  validate_mixed(g, x0, 1e-10);
  if (!is_interior(x0)) throw BoundaryError("detect_recurrence needs an interior start");
  if (!(epsilon > 0.0)) throw std::invalid_argument("epsilon must be positive");
  if (!(t_max > 0.0)) throw std::invalid_argument("t_max must be positive");

  const std::vector<int> sizes = g.action_counts();
  const Eigen::Index n = total(sizes);
  const Eigen::VectorXd x0_flat = x0.flat();

  OdeRhs rhs = [&](double, const Eigen::VectorXd& y, Eigen::VectorXd& dy) {
    dy = payoff_field(g, logit(ScoreState::from_flat(y, sizes))).flat();
  };
  Eigen::VectorXd y0(n);
  y0 = x0_flat.array().log();

  OdeOptions ode;
  ode.rtol = opts.rtol;
  ode.atol = opts.atol;
  DormandPrince45 solver(rhs, 0.0, y0, ode);

  RecurrenceReport rep;
  rep.epsilon = epsilon;
  rep.t_max = t_max;

  constexpr int windows = 200;
  const double window = t_max / windows;
  double window_min = std::numeric_limits<double>::infinity();
  int window_idx = 0;
  bool armed = false;  // left the 2 epsilon-ball since the last return

  auto distance = [&](const Eigen::VectorXd& y) {
    return (logit(ScoreState::from_flat(y, sizes)).flat() - x0_flat).norm();
  };
  auto visit = [&](double t, double dist) {
    while (t > (window_idx + 1) * window && window_idx < windows) {
      rep.min_distance_envelope.emplace_back((window_idx + 1) * window, window_min);
      window_min = std::numeric_limits<double>::infinity();
      ++window_idx;
    }
    window_min = std::min(window_min, dist);
    if (!rep.exit_time && dist > epsilon) rep.exit_time = t;
    if (dist > 2.0 * epsilon) armed = true;
    if (armed && dist < epsilon) {
      rep.return_times.push_back(t);
      armed = false;
    }
  };

  visit(0.0, 0.0);
  Eigen::VectorXd x_prev = x0_flat;
  while (solver.time() < t_max) {
    solver.step(t_max);
    const Eigen::VectorXd x_now = logit(ScoreState::from_flat(solver.state(), sizes)).flat();
    // Enough dense samples that consecutive ones are at most epsilon/8 apart
    // along a straight chord.
    const int k = std::max(4, static_cast<int>(std::ceil(8.0 * (x_now - x_prev).norm() / epsilon)));
    const double t0 = solver.previous_time(), t1 = solver.time();
    for (int s = 1; s <= k; ++s) {
      const double t = t0 + (t1 - t0) * s / k;
      visit(t, s == k ? (x_now - x0_flat).norm() : distance(solver.dense(t)));
    }
    x_prev = x_now;
  }
  while (window_idx < windows) {
    rep.min_distance_envelope.emplace_back((window_idx + 1) * window, window_min);
    window_min = std::numeric_limits<double>::infinity();
    ++window_idx;
  }
  rep.verdict = rep.return_times.size() >= 3 ? RecurrenceVerdict::recurrent
                                             : RecurrenceVerdict::not_observed;
  return rep;
}

// ---------------------------------------------------------------------------

std::optional<EffProfile> interior_rest_point(const Game& g, const EffProfile& xt_init,
                                              double newton_tol, int max_iter) {
  validate_effective(g, xt_init);
  const auto sizes = g.effective_sizes();
  Eigen::VectorXd xt = xt_init.flat();

  auto residual = [&](const Eigen::VectorXd& p) {
    return eff_payoff_field(g, embed(EffProfile::from_flat(p, sizes))).flat();
  };

  Eigen::VectorXd r = residual(xt);
  for (int it = 0; it <= max_iter; ++it) {
    if (r.lpNorm<Eigen::Infinity>() <= newton_tol)
      return EffProfile::from_flat(xt, sizes);
    if (it == max_iter) break;
    const Eigen::MatrixXd jac = eff_payoff_jacobian(g, embed(EffProfile::from_flat(xt, sizes)));
    const Eigen::VectorXd step = -jac.completeOrthogonalDecomposition().solve(r);
    if (!step.allFinite() || step.norm() <= 1e-15 * (1.0 + xt.norm())) return std::nullopt;

    double lambda = 1.0;
    bool moved = false;
    for (int half = 0; half < 60; ++half, lambda *= 0.5) {
      const Eigen::VectorXd trial = xt + lambda * step;
      if (!is_interior(EffProfile::from_flat(trial, sizes))) continue;
      const Eigen::VectorXd rt = residual(trial);
      if (rt.norm() < r.norm()) {
        xt = trial;
        r = rt;
        moved = true;
        break;
      }
    }
    if (!moved) return std::nullopt;
  }
  return std::nullopt;
}

}  // namespace harmonica
