#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "harmonica/decomposition.hpp"
#include "harmonica/dynamics.hpp"
#include "harmonica/errors.hpp"
#include "harmonica/fixtures.hpp"
#include "harmonica/random.hpp"

using namespace harmonica;

namespace {

Eigen::VectorXd vec(std::initializer_list<double> v) {
  Eigen::VectorXd out(v.size());
  int k = 0;
  for (double e : v) out[k++] = e;
  return out;
}

MixedProfile mixed(std::vector<Eigen::VectorXd> blocks) {
  MixedProfile x;
  x.blocks = std::move(blocks);
  return x;
}

EffProfile eff(std::vector<Eigen::VectorXd> blocks) {
  EffProfile xt;
  xt.blocks = std::move(blocks);
  return xt;
}

double max_drift(const std::vector<double>& series) {
  double d = 0.0;
  for (double e : series) d = std::max(d, std::abs(e - series.front()));
  return d;
}

}  // namespace

TEST(Logit, Values) {
  ScoreState y;
  y.blocks = {vec({0, 0}), vec({0, std::log(3.0)}), vec({1000, 1000 + std::log(2.0)})};
  const MixedProfile x = logit(y);
  EXPECT_DOUBLE_EQ(x[0][0], 0.5);
  EXPECT_NEAR(x[1][0], 0.25, 1e-15);
  EXPECT_NEAR(x[1][1], 0.75, 1e-15);
  EXPECT_NEAR(x[2][0], 1.0 / 3, 1e-12);  // 1000 + ln 2 is rounded at 1e-13
  EXPECT_NEAR(x[2][1], 2.0 / 3, 1e-12);
  EXPECT_TRUE(x[2].allFinite());
}

TEST(Logit, LogFormIsExact) {
  const Eigen::VectorXd y = vec({0, -800});
  EXPECT_NEAR(log_logit(y)[1], -800.0, 1e-12);
}

TEST(ReplicatorField, PureProfilesAreRest) {
  const Game g = random_game({3, 2}, 51);
  for (int a = 0; a < 3; ++a)
    for (int b = 0; b < 2; ++b) {
      const Tangent xi =
          replicator_field(g, mixed({Eigen::VectorXd::Unit(3, a), Eigen::VectorXd::Unit(2, b)}));
      EXPECT_EQ(xi.flat().cwiseAbs().maxCoeff(), 0.0);
    }
}

TEST(ReplicatorField, MatchingPenniesBarycenter) {
  const Tangent xi = replicator_field(fixtures::matching_pennies(), barycenter({2, 2}));
  EXPECT_EQ(xi.flat().cwiseAbs().maxCoeff(), 0.0);
}

TEST(ReplicatorField, SinglePlayer) {
  const double xa = 0.2, xb = 0.8;
  const Tangent xi = replicator_field(fixtures::single_player_ab(), mixed({vec({xa, xb})}));
  EXPECT_NEAR(xi[0][0], -xa * xb, 1e-16);
  EXPECT_NEAR(xi[0][1], xb - xb * xb, 1e-16);
}

TEST(ReplicatorField, BlocksSumToZero) {
  Rng rng(52);
  const Game g = random_game({3, 4, 2}, rng);
  for (int s = 0; s < 20; ++s) {
    const Tangent xi = replicator_field(g, random_interior(g.action_counts(), rng));
    for (const auto& b : xi.blocks) EXPECT_NEAR(b.sum(), 0.0, 1e-12);
  }
  EXPECT_THROW(replicator_field(g, barycenter({3, 3, 2})), DimensionError);
}

TEST(EffReplicator, LogisticSystem) {
  Rng rng(53);
  const Game g = random_game({2, 2}, rng);
  const EffProfile xt = random_interior_effective({2, 2}, rng);
  const EffTangent xi = eff_replicator_field(g, xt);
  const EffPayoffField vt = eff_payoff_field(g, xt);
  for (int i = 0; i < 2; ++i)
    EXPECT_NEAR(xi[i][0], xt[i][0] * (1 - xt[i][0]) * vt[i][0], 1e-15);
}

TEST(EffReplicator, ConsistentWithFullField) {
  Rng rng(54);
  const Game g = random_game({3, 2, 4}, rng);
  for (int s = 0; s < 50; ++s) {
    const EffProfile xt = random_interior_effective(g.action_counts(), rng);
    const Tangent full = replicator_field(g, embed(xt));
    const EffTangent red = eff_replicator_field(g, xt);
    for (int i = 0; i < 3; ++i)
      EXPECT_LT((full[i].tail(full[i].size() - 1) - red[i]).cwiseAbs().maxCoeff(), 1e-12);
  }
  EXPECT_EQ(eff_replicator_field(fixtures::matching_pennies(), reduce(barycenter({2, 2}))).flat()
                .cwiseAbs()
                .maxCoeff(),
            0.0);
  EXPECT_THROW(eff_replicator_field(g, eff({vec({0.6, 0.5}), vec({0.5}), vec({0.1, 0.1, 0.1})})),
               BoundaryError);
}

TEST(EffReplicator, GradientSystemIdentity) {
  Rng rng(55);
  for (const auto& shape : std::vector<std::vector<int>>{{2, 2}, {3, 3}, {2, 3, 2}}) {
    const Game g = random_game(shape, rng);
    for (int s = 0; s < 100; ++s) {
      const EffProfile xt = random_interior_effective(shape, rng);
      const EffTangent xi = eff_replicator_field(g, xt);
      const EffPayoffField vt = eff_payoff_field(g, xt);
      for (std::size_t i = 0; i < shape.size(); ++i) {
        const Eigen::VectorXd rhs = metric_eff_inverse(xt, static_cast<int>(i)) * vt[i];
        EXPECT_LT((xi[i] - rhs).cwiseAbs().maxCoeff(), 1e-12);
      }
    }
  }
}

TEST(EffReplicator, JacobianMatchesFiniteDifference) {
  Rng rng(56);
  const Game g = random_game({3, 2, 3}, rng);
  const EffProfile xt = random_interior_effective(g.action_counts(), rng);
  const Eigen::MatrixXd jac = eff_replicator_jacobian(g, xt);
  const Eigen::VectorXd flat = xt.flat();
  const double h = 1e-6;
  for (Eigen::Index c = 0; c < flat.size(); ++c) {
    Eigen::VectorXd up = flat, dn = flat;
    up[c] += h;
    dn[c] -= h;
    const Eigen::VectorXd fd =
        (eff_replicator_field(g, EffProfile::from_flat(up, xt.sizes())).flat() -
         eff_replicator_field(g, EffProfile::from_flat(dn, xt.sizes())).flat()) /
        (2 * h);
    EXPECT_LT((jac.col(c) - fd).cwiseAbs().maxCoeff(), 1e-8);
  }
}

TEST(ConstantOfMotion, Values) {
  EXPECT_NEAR(constant_of_motion(fixtures::matching_pennies(), barycenter({2, 2})), 0.0, 1e-15);
  // sum_i n_i KL(b_i || x_i) with x_i = (3/4, 1/4), written out term by term.
  const double kl = 0.5 * std::log(0.5 / 0.75) + 0.5 * std::log(0.5 / 0.25);
  const double e = constant_of_motion(fixtures::matching_pennies(),
                                      mixed({vec({0.75, 0.25}), vec({0.75, 0.25})}));
  EXPECT_NEAR(e, 2 * 2 * kl, 1e-14);
  EXPECT_NEAR(e, 0.575364144903562, 1e-12);
  EXPECT_THROW(constant_of_motion(fixtures::matching_pennies(), mixed({vec({1, 0}), vec({0.5, 0.5})})),
               BoundaryError);
}

TEST(ConstantOfMotion, ScoreFormMatches) {
  Rng rng(57);
  std::normal_distribution<double> normal;
  ScoreState y;
  y.blocks = {Eigen::VectorXd(3), Eigen::VectorXd(2)};
  for (auto& b : y.blocks)
    for (auto& e : b) e = 3 * normal(rng);
  EXPECT_NEAR(constant_of_motion(y), constant_of_motion(random_game({3, 2}, 1), logit(y)), 1e-12);
}

TEST(ConstantOfMotion, RateIsMinusTwiceDivergence) {
  Rng rng(58);
  const Game g = random_game({3, 2, 2}, rng);
  const EffProfile xt = random_interior_effective(g.action_counts(), rng);
  const Eigen::VectorXd xi = eff_replicator_field(g, xt).flat();
  const double h = 1e-6;
  auto energy = [&](double s) {
    return constant_of_motion(g, embed(EffProfile::from_flat(xt.flat() + s * xi, xt.sizes())));
  };
  const double rate = (energy(h) - energy(-h)) / (2 * h);
  EXPECT_NEAR(rate, -2 * replicator_divergence_analytic(g, embed(xt)), 1e-7);
}

TEST(Integrate, MatchingPenniesConservesEnergy) {
  const Game mp = fixtures::matching_pennies();
  const TrajectoryRecord rec = integrate(mp, embed(eff({vec({0.3}), vec({0.3})})), 100.0);
  ASSERT_EQ(rec.times.size(), 1001u);
  EXPECT_LT(max_drift(rec.energy), 1e-7);
  for (double d : rec.divergence) EXPECT_NEAR(d, 0.0, 1e-14);
  for (std::size_t k = 1; k < rec.times.size(); ++k) EXPECT_GT(rec.times[k], rec.times[k - 1]);
  for (const auto& x : rec.states)
    for (const auto& b : x.blocks) {
      EXPECT_GT(b.minCoeff(), 1e-12);
      EXPECT_NEAR(b.sum(), 1.0, 1e-10);
    }
}

TEST(Integrate, PrisonersDilemmaConverges) {
  const Game pd = fixtures::prisoners_dilemma();
  Rng rng(59);
  for (int s = 0; s < 5; ++s) {
    const TrajectoryRecord rec = integrate(pd, random_interior({2, 2}, rng), 50.0);
    const MixedProfile& x = rec.states.back();
    EXPECT_LT(std::hypot(1 - x[0][1], 1 - x[1][1]) * std::sqrt(2.0), 1e-3);
    EXPECT_GT(max_drift(rec.energy), 1e-2);
  }
}

TEST(Integrate, PotentialIsLyapunov) {
  const Game g = random_potential({3, 2, 2}, 60);
  const Eigen::VectorXd phi = *extract_potential(g).phi;
  const Game pot = common_interest(g.action_counts(), phi);
  Rng rng(61);
  const TrajectoryRecord rec = integrate(g, random_interior(g.action_counts(), rng), 30.0);
  for (std::size_t k = 1; k < rec.states.size(); ++k)
    EXPECT_GE(mixed_payoff(pot, rec.states[k], 0), mixed_payoff(pot, rec.states[k - 1], 0) - 1e-9);
}

TEST(Integrate, MixtureEndpointConverges) {
  Rng rng(62);
  const TrajectoryRecord rec =
      integrate(fixtures::mixture_222(1.0), random_interior({2, 2, 2}, rng), 200.0);
  double dist = 0.0;
  for (const auto& b : rec.states.back().blocks) dist += (1.0 - b.maxCoeff()) * (1.0 - b.maxCoeff()) * 2;
  EXPECT_LT(std::sqrt(dist), 1e-3);
}

TEST(Integrate, ScoreAndEffectiveSteppersAgree) {
  Rng rng(63);
  const Game g = random_game({3, 2, 2}, rng);
  const MixedProfile x0 = random_interior(g.action_counts(), rng);
  IntegrateOptions a, b;
  b.stepper = Stepper::effective;
  const TrajectoryRecord ra = integrate(g, x0, 10.0, a);
  const TrajectoryRecord rb = integrate(g, x0, 10.0, b);
  ASSERT_EQ(ra.times.size(), rb.times.size());
  for (std::size_t k = 0; k < ra.times.size(); ++k)
    EXPECT_LT((ra.states[k].flat() - rb.states[k].flat()).cwiseAbs().maxCoeff(), 1e-6);
  for (int i = 0; i < 3; ++i) EXPECT_NEAR(regret(ra, g, i), regret(rb, g, i), 1e-6);
}

TEST(Integrate, RejectsBoundaryStart) {
  EXPECT_THROW(integrate(fixtures::matching_pennies(), mixed({vec({1, 0}), vec({0.5, 0.5})}), 1.0),
               BoundaryError);
}

TEST(Regret, BoundFromUniformStart) {
  const std::vector<Game> games{fixtures::matching_pennies(), fixtures::prisoners_dilemma(),
                                fixtures::harmonic_two_by_three(), fixtures::mixture_harmonic_222()};
  for (const Game& g : games) {
    const TrajectoryRecord rec = integrate(g, barycenter(g.action_counts()), 50.0);
    for (int i = 0; i < g.num_players(); ++i)
      for (double r : regret_series(rec, g, i)) EXPECT_LE(r, std::log(g.actions(i)) + 1e-6);
  }
}

TEST(Regret, ScoreIdentity) {
  // Starting from y(0) = 0: int u_i = LSE(y(T)) - log n_i and y(T) = int v_i.
  Rng rng(64);
  const Game g = random_game({3, 2}, rng);
  const TrajectoryRecord rec = integrate(g, barycenter(g.action_counts()), 20.0);
  for (int i = 0; i < 2; ++i) {
    const Eigen::VectorXd y = rec.cumulative_payoff.back()[i];
    const double lse = y.maxCoeff() + std::log((y.array() - y.maxCoeff()).exp().sum());
    EXPECT_NEAR(rec.cumulative_utility.back()[i], lse - std::log(g.actions(i)), 1e-7);
    const Eigen::VectorXd logx = rec.states.back()[i].array().log();
    EXPECT_LT((y.array() - lse - logx.array()).abs().maxCoeff(), 1e-7);
  }
}

TEST(Regret, TrapezoidAgreesWithIntegratedQuadrature) {
  Rng rng(65);
  const Game g = random_game({2, 3}, rng);
  IntegrateOptions opts;
  opts.sample_dt = 0.01;
  const TrajectoryRecord rec = integrate(g, random_interior({2, 3}, rng), 10.0, opts);
  for (int i = 0; i < 2; ++i) {
    const auto exact = regret_series(rec, g, i);
    const auto trap = regret_series_trapezoid(rec, g, i);
    for (std::size_t k = 0; k < exact.size(); k += 100) EXPECT_NEAR(exact[k], trap[k], 1e-3);
  }
}

TEST(Regret, PureEquilibriumHasNone) {
  const Game pd = fixtures::prisoners_dilemma();
  TrajectoryRecord rec;
  for (int k = 0; k <= 10; ++k) {
    rec.times.push_back(k);
    rec.states.push_back(mixed({vec({0, 1}), vec({0, 1})}));
  }
  for (int i = 0; i < 2; ++i) EXPECT_LE(regret(rec, pd, i), 0.0);
}

TEST(Volume, HarmonicPreservesAndMethodsAgree) {
  Rng rng(66);
  for (const Game& g : {fixtures::matching_pennies(), fixtures::mixture_harmonic_222(),
                        random_harmonic({3, 2}, 67)}) {
    const VolumeTrack v = volume_tracker(g, random_interior_effective(g.action_counts(), rng), 100.0);
    for (std::size_t k = 0; k < v.times.size(); ++k) {
      EXPECT_LT(std::abs(v.logvol_jacobian[k]), 1e-5);
      EXPECT_LT(std::abs(v.logvol_jacobian[k] - v.logvol_divergence[k]), 1e-5);
    }
  }
}

TEST(Volume, MethodsAgreeOnGenericGame) {
  Rng rng(68);
  const Game g = random_game({2, 3}, rng);
  const VolumeTrack v = volume_tracker(g, random_interior_effective(g.action_counts(), rng), 5.0);
  for (std::size_t k = 0; k < v.times.size(); ++k)
    EXPECT_NEAR(v.logvol_jacobian[k], v.logvol_divergence[k],
                1e-5 * std::max(1.0, std::abs(v.logvol_divergence[k])));
}

TEST(Volume, PrisonersDilemmaContractsNearVertex) {
  const VolumeTrack v =
      volume_tracker(fixtures::prisoners_dilemma(), eff({vec({0.9}), vec({0.9})}), 2.0);
  for (std::size_t k = 1; k < v.times.size(); ++k)
    EXPECT_LT(v.logvol_jacobian[k], v.logvol_jacobian[k - 1]);
}

TEST(Recurrence, MatchingPenniesIsPeriodic) {
  const RecurrenceReport r =
      detect_recurrence(fixtures::matching_pennies(), embed(eff({vec({0.3}), vec({0.3})})), 1e-3, 200.0);
  EXPECT_EQ(r.verdict, RecurrenceVerdict::recurrent);
  EXPECT_GE(r.return_times.size(), 3u);
  ASSERT_TRUE(r.exit_time);
  for (std::size_t k = 1; k < r.return_times.size(); ++k)
    EXPECT_GT(r.return_times[k], r.return_times[k - 1]);
  EXPECT_EQ(r.min_distance_envelope.size(), 200u);
  EXPECT_EQ(to_string(r.verdict), "recurrent");
}

TEST(Recurrence, RandomHarmonicReturns) {
  Rng rng(69);
  const Game g = random_harmonic({2, 2, 2}, 70);
  const RecurrenceReport r = detect_recurrence(g, random_interior({2, 2, 2}, rng), 1e-2, 500.0);
  EXPECT_EQ(r.verdict, RecurrenceVerdict::recurrent);
}

TEST(Recurrence, PrisonersDilemmaNotObserved) {
  const RecurrenceReport r =
      detect_recurrence(fixtures::prisoners_dilemma(), barycenter({2, 2}), 1e-3, 200.0);
  EXPECT_EQ(r.verdict, RecurrenceVerdict::not_observed);
  EXPECT_TRUE(r.return_times.empty());
  EXPECT_EQ(to_string(r.verdict), "not-observed");
  EXPECT_THROW(detect_recurrence(fixtures::prisoners_dilemma(), barycenter({2, 2}), 0.0, 1.0),
               std::invalid_argument);
}

TEST(RestPoint, MatchingPennies) {
  const auto xt = interior_rest_point(fixtures::matching_pennies(), eff({vec({0.2}), vec({0.7})}));
  ASSERT_TRUE(xt);
  EXPECT_NEAR((*xt)[0][0], 0.5, 1e-12);
  EXPECT_NEAR((*xt)[1][0], 0.5, 1e-12);
}

TEST(RestPoint, HarmonicFamily) {
  const Game g = fixtures::harmonic_two_by_three();
  const auto xt = interior_rest_point(g, reduce(barycenter({2, 3})));
  ASSERT_TRUE(xt);
  EXPECT_LE(eff_payoff_field(g, *xt).flat().cwiseAbs().maxCoeff(), 1e-10);
}

TEST(RestPoint, PrisonersDilemmaHasNone) {
  EXPECT_FALSE(interior_rest_point(fixtures::prisoners_dilemma(), eff({vec({0.5}), vec({0.5})})));
}
