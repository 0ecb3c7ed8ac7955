// Acceptance suite: one PASS/FAIL line per criterion, nonzero exit on any failure.
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <limits>
#include <numbers>
#include <string>
#include <vector>

#include "commands.hpp"
#include "harmonica/decomposition.hpp"
#include "harmonica/dynamics.hpp"
#include "harmonica/fixtures.hpp"
#include "harmonica/geometry.hpp"
#include "harmonica/random.hpp"

using namespace harmonica;

namespace {

// Tolerances and budgets, fixed here.
constexpr double kClassTol = 1e-8;
constexpr double kMultilinearTol = 1e-9;
constexpr double kC1Seconds = 30;
constexpr double kDivRelTol = 1e-5;
constexpr double kC2Seconds = 60;
constexpr double kEnergyDriftTol = 1e-6;
constexpr double kPdEnergyDriftMin = 1e-2;
constexpr double kLogvolTol = 1e-5;
constexpr double kPdLogvolDropMin = 0.1;
constexpr double kRecurrenceEps = 1e-2;
constexpr double kRecurrenceTmax = 500;
constexpr double kRegretSlack = 1e-6;
constexpr double kDecompTol = 1e-8;
constexpr double kVolumeTolM1 = 1e-6;
constexpr double kVolumeTolM2 = 1e-3;
constexpr double kGradientSystemTol = 1e-12;
constexpr double kGradientRelTol = 1e-5;
constexpr double kC10Seconds = 300;

const std::vector<std::vector<int>> kShapes{{2, 2}, {2, 3}, {3, 3}, {2, 2, 2}};

struct Outcome {
  bool pass;
  std::string detail;
};

std::string fmt(const char* f, double a) {
  char buf[128];
  std::snprintf(buf, sizeof buf, f, a);
  return buf;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

// Multilinear extension by enumerating every pure profile.
double multilinear(const Eigen::VectorXd& f, const Game& shape_of, const MixedProfile& x) {
  double total = 0.0;
  for (Eigen::Index a = 0; a < shape_of.num_profiles(); ++a) {
    double w = 1.0;
    for (int j = 0; j < shape_of.num_players(); ++j) w *= x[j][shape_of.action_at(a, j)];
    total += w * f[a];
  }
  return total;
}

// F(a) straight from its definition on pure profiles.
Eigen::VectorXd defect_by_definition(const Game& g) {
  Eigen::VectorXd f = Eigen::VectorXd::Zero(g.num_profiles());
  for (Eigen::Index a = 0; a < g.num_profiles(); ++a)
    for (int i = 0; i < g.num_players(); ++i)
      for (int b = 0; b < g.actions(i); ++b) f[a] += g.payoffs(i)[g.deviate(a, i, b)] - g.payoffs(i)[a];
  return f;
}

double max_drift(const std::vector<double>& s) {
  double d = 0.0;
  for (double e : s) d = std::max(d, std::abs(e - s.front()));
  return d;
}

Outcome criterion1() {
  const auto t0 = std::chrono::steady_clock::now();
  Rng rng(1001);
  int games = 0, disagreements = 0, harmonic_seen = 0;
  double worst = 0.0;
  for (const auto& shape : kShapes) {
    for (int k = 0; k < 200; ++k) {
      const Game g = random_game(shape, rng);
      for (const Game& h : {g, decompose(g).harmonic_game}) {
        ++games;
        const bool harm = is_harmonic(h, kClassTol);
        harmonic_seen += harm;
        if (harm != is_incompressible(h, 16, kClassTol, rng())) ++disagreements;
        const Eigen::VectorXd f = defect_by_definition(h);
        for (int s = 0; s < 20; ++s) {
          const MixedProfile x = random_interior(shape, rng);
          worst = std::max(worst, std::abs(0.5 * multilinear(f, h, x) -
                                           replicator_divergence_analytic(h, x)));
        }
      }
    }
  }
  const double secs = seconds_since(t0);
  return {disagreements == 0 && harmonic_seen == games / 2 && worst <= kMultilinearTol &&
              secs < kC1Seconds,
          std::to_string(games) + " games, " + std::to_string(disagreements) +
              " disagreements, " + std::to_string(harmonic_seen) + " harmonic" +
              fmt(", max |F/2 - div| %.2e", worst) + fmt(", %.2f s", secs)};
}

Outcome criterion2() {
  const auto t0 = std::chrono::steady_clock::now();
  Rng rng(1002);
  std::vector<Game> games;
  for (int k = 0; k < 20; ++k) games.push_back(random_game(kShapes[k % kShapes.size()], rng));
  double worst = 0.0;
  for (int p = 0; p < 50; ++p) {
    const Game& g = games[p % games.size()];
    const EffProfile xt = random_interior_effective(g.action_counts(), rng);
    const double a = replicator_divergence_analytic(g, embed(xt));
    const double f = shah_divergence(replicator_vector_field(g), xt, JacobianMode::finite_difference);
    worst = std::max(worst, std::abs(a - f) / std::max(1.0, std::abs(a)));
  }
  const double secs = seconds_since(t0);
  return {worst <= kDivRelTol && secs < kC2Seconds,
          fmt("50 points over 20 games, max rel error %.2e", worst) + fmt(", %.2f s", secs)};
}

Outcome criterion3() {
  Rng rng(1003);
  double worst = 0.0;
  for (int k = 0; k < 20; ++k) {
    const auto& shape = kShapes[k % kShapes.size()];
    const Game h = random_harmonic(shape, 3000 + k);
    const TrajectoryRecord rec = integrate(h, random_interior(shape, rng), 100.0);
    worst = std::max(worst, max_drift(rec.energy));
  }
  const TrajectoryRecord pd = integrate(fixtures::prisoners_dilemma(), barycenter({2, 2}), 100.0);
  const double pd_drift = max_drift(pd.energy);
  return {worst < kEnergyDriftTol && pd_drift > kPdEnergyDriftMin,
          fmt("harmonic max drift %.2e", worst) + fmt(", PD drift %.2f", pd_drift)};
}

Outcome criterion4() {
  Rng rng(1004);
  double drift = 0.0, gap = 0.0;
  for (const Game& g : {fixtures::matching_pennies(), fixtures::harmonic_two_by_three(),
                        fixtures::mixture_harmonic_222(), random_harmonic({2, 2, 2}, 4004)}) {
    const VolumeTrack v = volume_tracker(g, random_interior_effective(g.action_counts(), rng), 50.0);
    for (std::size_t k = 0; k < v.times.size(); ++k) {
      drift = std::max(drift, std::abs(v.logvol_jacobian[k]));
      gap = std::max(gap, std::abs(v.logvol_jacobian[k] - v.logvol_divergence[k]));
    }
  }
  // Start near the attracting (Defect, Defect) vertex.
  EffProfile near;
  near.blocks = {Eigen::VectorXd::Constant(1, 0.9), Eigen::VectorXd::Constant(1, 0.9)};
  const VolumeTrack pd = volume_tracker(fixtures::prisoners_dilemma(), near, 5.0);
  bool monotone = true;
  for (std::size_t k = 1; k < pd.times.size(); ++k)
    monotone = monotone && pd.logvol_jacobian[k] < pd.logvol_jacobian[k - 1];
  const double drop = pd.logvol_jacobian.front() - pd.logvol_jacobian.back();
  return {drift < kLogvolTol && gap < kLogvolTol && monotone && drop >= kPdLogvolDropMin,
          fmt("harmonic logvol drift %.2e", drift) + fmt(", method gap %.2e", gap) +
              fmt(", PD logvol drop %.3f", drop) + (monotone ? " (monotone)" : " (not monotone)")};
}

Outcome criterion5() {
  Rng rng(1005);
  const RecurrenceReport mp = detect_recurrence(
      fixtures::matching_pennies(), random_interior({2, 2}, rng), kRecurrenceEps, kRecurrenceTmax);
  const RecurrenceReport h = detect_recurrence(random_harmonic({2, 2, 2}, 5005),
                                               random_interior({2, 2, 2}, rng), kRecurrenceEps,
                                               kRecurrenceTmax);
  const RecurrenceReport pd = detect_recurrence(
      fixtures::prisoners_dilemma(), random_interior({2, 2}, rng), kRecurrenceEps, kRecurrenceTmax);
  return {mp.return_times.size() >= 3 && h.return_times.size() >= 3 && pd.return_times.empty(),
          "returns: MP " + std::to_string(mp.return_times.size()) + ", harmonic 2x2x2 " +
              std::to_string(h.return_times.size()) + ", PD " +
              std::to_string(pd.return_times.size())};
}

Outcome criterion6() {
  std::vector<Game> games{fixtures::matching_pennies(), fixtures::prisoners_dilemma(),
                          fixtures::harmonic_two_by_three(), fixtures::single_player_ab(),
                          fixtures::mixture_potential_222(), fixtures::mixture_harmonic_222()};
  for (int k = 0; k < 10; ++k) games.push_back(random_game(kShapes[k % kShapes.size()], 6000 + k));
  double worst = -1e300;
  for (const Game& g : games) {
    const TrajectoryRecord rec = integrate(g, barycenter(g.action_counts()), 100.0);
    for (int i = 0; i < g.num_players(); ++i)
      for (double r : regret_series(rec, g, i))
        worst = std::max(worst, r - std::log(static_cast<double>(g.actions(i))));
  }
  return {worst <= kRegretSlack,
          std::to_string(games.size()) + fmt(" games, max Reg - log|A_i| = %.3e", worst)};
}

Outcome criterion7() {
  Rng rng(1007);
  // The harmonic part is defined as G - P and must match that subtraction bit for bit;
  // adding P back can only differ from G by the rounding of that one addition.
  long subtraction_mismatches = 0;
  double recon_ratio = 0.0, defect = 0.0;
  for (const auto& shape : kShapes)
    for (int k = 0; k < 25; ++k) {
      const Game g = random_game(shape, rng);
      const DecompositionResult d = decompose(g);
      const Game sum = d.potential_game + d.harmonic_game;
      for (int i = 0; i < g.num_players(); ++i) {
        const Eigen::VectorXd& u = g.payoffs(i);
        const Eigen::VectorXd& p = d.potential_game.payoffs(i);
        const Eigen::VectorXd& h = d.harmonic_game.payoffs(i);
        for (Eigen::Index a = 0; a < u.size(); ++a) {
          subtraction_mismatches += h[a] != u[a] - p[a];
          const double bound = 0.5 * std::numeric_limits<double>::epsilon() * (std::abs(h[a]) + std::abs(u[a]));
          const double err = std::abs(sum.payoffs(i)[a] - u[a]);
          if (err > 0.0) recon_ratio = std::max(recon_ratio, bound > 0.0 ? err / bound : HUGE_VAL);
        }
      }
      defect = std::max(defect, defect_by_definition(d.harmonic_game).cwiseAbs().maxCoeff());
    }
  const bool ns_pd = is_non_strategic(decompose(fixtures::prisoners_dilemma()).harmonic_game, kDecompTol);
  const bool ns_p = is_non_strategic(decompose(fixtures::mixture_potential_222()).harmonic_game, kDecompTol);

  const Eigen::VectorXd phi_p = decompose(fixtures::mixture_potential_222()).potential_fn;
  const Eigen::VectorXd phi_h = decompose(fixtures::mixture_harmonic_222()).potential_fn;
  double lin = 0.0;
  for (int k = 0; k <= 7; ++k) {
    const double l = k / 7.0;
    lin = std::max(lin, (decompose(fixtures::mixture_222(l)).potential_fn - (l * phi_p + (1 - l) * phi_h))
                            .cwiseAbs()
                            .maxCoeff());
  }

  const Eigen::VectorXd phi_pd = decompose(fixtures::prisoners_dilemma()).potential_fn;
  const Eigen::Vector4d expected(-1, 0, 0, 1);
  const double pd_err = (phi_pd.array() - phi_pd[0] - 1.0 - expected.array()).abs().maxCoeff();

  return {subtraction_mismatches == 0 && recon_ratio <= 1.0 && defect <= kDecompTol && ns_pd && ns_p && lin <= kDecompTol &&
              pd_err <= kDecompTol,
          std::to_string(subtraction_mismatches) + " entries with H != G - P" +
              fmt(", P + H - G at %.2f of one rounding", recon_ratio) +
              fmt(", harmonic defect %.2e", defect) +
              fmt(", linearity %.2e", lin) + fmt(", PD phi error %.2e", pd_err) +
              (ns_pd && ns_p ? ", potential remainders non-strategic" : ", remainder strategic")};
}

Outcome criterion8() {
  constexpr double pi = std::numbers::pi;
  const bool closed = simplex_volume_shah(1) == pi && simplex_volume_shah(2) == 2 * pi &&
                      simplex_volume_shah(3) == pi * pi;
  const VolumeEstimate v1 = simplex_volume_numeric(1);
  const VolumeEstimate v2 = simplex_volume_numeric(2);
  const double e1 = std::abs(v1.value - pi), e2 = std::abs(v2.value - 2 * pi);
  return {closed && v1.converged && v2.converged && e1 <= kVolumeTolM1 && e2 <= kVolumeTolM2,
          std::string(closed ? "closed form exact" : "closed form inexact") +
              fmt(", quadrature error m=1 %.2e", e1) + fmt(", m=2 %.2e", e2)};
}

Outcome criterion9() {
  Rng rng(1009);
  std::normal_distribution<double> normal;
  double field_err = 0.0;
  for (int p = 0; p < 1000; ++p) {
    const auto& shape = kShapes[p % kShapes.size()];
    const Game g = random_game(shape, 9000 + p % 20);
    const EffProfile xt = random_interior_effective(shape, rng);
    const EffTangent xi = eff_replicator_field(g, xt);
    const EffPayoffField vt = eff_payoff_field(g, xt);
    for (std::size_t i = 0; i < shape.size(); ++i)
      field_err = std::max(field_err, (xi[i] - metric_eff_inverse(xt, static_cast<int>(i)) * vt[i])
                                          .cwiseAbs()
                                          .maxCoeff());
  }
  // <grad f, z>_Shah against the directional derivative of f along tangent z.
  const Game g = random_game({3, 2, 2}, 9100);
  const SmoothFunction f{[&](const MixedProfile& y) {
                           return mixed_payoff(g, y, 0) * mixed_payoff(g, y, 1) + std::log(y[0][0]);
                         },
                         nullptr};
  double grad_err = 0.0;
  for (int p = 0; p < 100; ++p) {
    const MixedProfile x = random_interior(g.action_counts(), rng);
    const int i = p % 3;
    const Eigen::VectorXd grad = shah_gradient(f, x, i);
    Eigen::VectorXd z(g.actions(i));
    for (auto& e : z) e = normal(rng);
    z.array() -= z.mean();
    const double h = 1e-5 * x[i].minCoeff() / z.cwiseAbs().maxCoeff();
    MixedProfile up = x, dn = x;
    up.blocks[i] += h * z;
    dn.blocks[i] -= h * z;
    const double dir = (f.value(up) - f.value(dn)) / (2 * h);
    grad_err = std::max(grad_err, std::abs(shah_inner(grad, z, x[i]) - dir) / std::max(1.0, std::abs(dir)));
  }
  return {field_err < kGradientSystemTol && grad_err < kGradientRelTol,
          fmt("field vs G^-1 v max error %.2e", field_err) +
              fmt(", gradient relation rel error %.2e", grad_err)};
}

Outcome criterion10() {
  const auto t0 = std::chrono::steady_clock::now();
  cli::ExperimentConfig cfg;
  cfg.threads = 1;
  const auto rows = cli::run_mixture(cfg);
  const double secs = seconds_since(t0);
  const bool first = rows.front().lambda == 0.0 && rows.front().verdict == RecurrenceVerdict::recurrent;
  const bool last = rows.back().lambda == 1.0 && rows.back().converged_to_pure;
  return {rows.size() == 8 && first && last && secs < kC10Seconds,
          std::string("lambda=0 ") + to_string(rows.front().verdict) +
              ", lambda=1 converged_to_pure=" + (last ? "true" : "false") +
              fmt(", 8-point sweep %.2f s single-threaded", secs)};
}

}  // namespace

int main() {
  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria{
      {"harmonic iff incompressible", criterion1},
      {"divergence formula", criterion2},
      {"constant of motion", criterion3},
      {"volume preservation", criterion4},
      {"recurrence", criterion5},
      {"regret bound", criterion6},
      {"decomposition correctness", criterion7},
      {"simplex volume", criterion8},
      {"gradient identity", criterion9},
      {"mixture experiment", criterion10},
  };
  int failures = 0;
  for (std::size_t k = 0; k < criteria.size(); ++k) {
    Outcome o;
    try {
      o = criteria[k].second();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    failures += !o.pass;
    std::printf("%s criterion %zu (%s): %s\n", o.pass ? "PASS" : "FAIL", k + 1,
                criteria[k].first.c_str(), o.detail.c_str());
    std::fflush(stdout);
  }
  return failures == 0 ? 0 : 1;
}
