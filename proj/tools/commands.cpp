#include "commands.hpp"

#include <CLI11.hpp>
#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <future>
#include <iostream>
#include <sstream>

#include "harmonica/errors.hpp"
#include "harmonica/geometry.hpp"
#include "harmonica/io.hpp"
#include "harmonica/fixtures.hpp"
#include "harmonica/random.hpp"

namespace harmonica::cli {

using nlohmann::ordered_json;

namespace {

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

ordered_json game_json(const Game& g) { return ordered_json::parse(dump_game(g)); }

std::vector<double> to_std(const Eigen::VectorXd& v) { return {v.data(), v.data() + v.size()}; }

double vertex_distance(const MixedProfile& x) {
  // Nearest vertex of the product of simplices: argmax per block.
  double s = 0.0;
  for (const auto& b : x.blocks) {
    Eigen::Index top;
    b.maxCoeff(&top);
    Eigen::VectorXd e = Eigen::VectorXd::Zero(b.size());
    e[top] = 1.0;
    s += (b - e).squaredNorm();
  }
  return std::sqrt(s);
}

double energy_drift(const TrajectoryRecord& rec) {
  double d = 0.0;
  for (double e : rec.energy) d = std::max(d, std::abs(e - rec.energy.front()));
  return d;
}

// Run `body` translating library exceptions into exit codes.
template <class Body>
int guarded(std::ostream& err, Body&& body) {
  try {
    return body();
  } catch (const SolverError& e) {
    err << "error: " << e.what() << " (iterations " << e.iterations() << ", residual "
        << e.residual() << ")\n";
    return kSolverFailure;
  } catch (const StiffnessError& e) {
    err << "error: " << e.what() << " at t = " << e.time() << "\n";
    return kSolverFailure;
  } catch (const InputError& e) {
    err << "error: " << e.what() << "\n";
    return kInputError;
  } catch (const DimensionError& e) {
    err << "error: " << e.what() << "\n";
    return kInputError;
  } catch (const BoundaryError& e) {
    err << "error: " << e.what() << "\n";
    return kInputError;
  } catch (const std::invalid_argument& e) {
    err << "error: " << e.what() << "\n";
    return kInputError;
  }
}

void write_text(const std::string& path, const std::string& text, std::ostream& fallback) {
  if (path.empty() || path == "-") {
    fallback << text;
    return;
  }
  std::ofstream f(path);
  if (!f) throw InputError("cannot write " + path);
  f << text;
}

}  // namespace

ordered_json decomposition_to_json(const DecompositionResult& d) {
  ordered_json j;
  j["phi"] = to_std(d.potential_fn);
  j["potential_game"] = game_json(d.potential_game);
  j["harmonic_game"] = game_json(d.harmonic_game);
  j["residuals"] = {{"harmonicity", d.residual_harmonicity},
                    {"solver_residual", d.solver_stats.residual},
                    {"iterations", d.solver_stats.iterations},
                    {"method", d.solver_stats.method}};
  j["metadata"] = {{"pinned_profile", 0},
                   {"non_strategic_defect_of_harmonic", non_strategic_defect(d.harmonic_game)}};
  return j;
}

int cmd_decompose(const std::string& game_path, const std::string& out_path,
                  const CommonOptions& common, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    const Game g = load_game(game_path);
    const DecompositionResult d = decompose(g, std::min(common.tol, 1e-12));
    write_text(out_path, decomposition_to_json(d).dump(2) + "\n", out);
    return kOk;
  });
}

void write_trajectory_csv(const TrajectoryRecord& rec, std::ostream& out) {
  out << "t";
  if (!rec.states.empty())
    for (std::size_t i = 0; i < rec.states.front().size(); ++i)
      for (Eigen::Index a = 0; a < rec.states.front()[i].size(); ++a)
        out << ",x_" << i << "_" << a;
  out << ",energy,divergence\n";
  for (std::size_t k = 0; k < rec.times.size(); ++k) {
    out << fmt(rec.times[k]);
    for (const auto& b : rec.states[k].blocks)
      for (Eigen::Index a = 0; a < b.size(); ++a) out << "," << fmt(b[a]);
    out << "," << fmt(rec.energy[k]) << "," << fmt(rec.divergence[k]) << "\n";
  }
}

ordered_json recurrence_to_json(const RecurrenceReport& r) {
  ordered_json j;
  j["epsilon"] = r.epsilon;
  j["t_max"] = r.t_max;
  j["exit_time"] = r.exit_time ? ordered_json(*r.exit_time) : ordered_json(nullptr);
  j["return_times"] = r.return_times;
  auto env = ordered_json::array();
  for (const auto& [t, d] : r.min_distance_envelope) env.push_back({t, d});
  j["min_distance_envelope"] = std::move(env);
  j["verdict"] = to_string(r.verdict);
  return j;
}

int cmd_simulate(const SimulateOptions& opts, const CommonOptions& common, std::ostream& out,
                 std::ostream& err) {
  return guarded(err, [&] {
    const Game g = load_game(opts.game_path);
    MixedProfile x0;
    if (opts.x0.empty()) {
      Rng rng(common.seed);
      x0 = random_interior(g.action_counts(), rng);
    } else {
      Eigen::Map<const Eigen::VectorXd> flat(opts.x0.data(), static_cast<Eigen::Index>(opts.x0.size()));
      Eigen::Index need = 0;
      for (int n : g.action_counts()) need += n;
      if (flat.size() != need)
        throw InputError("--x0 needs " + std::to_string(need) + " entries");
      x0 = MixedProfile::from_flat(flat, g.action_counts());
    }

    IntegrateOptions io;
    io.rtol = common.rtol;
    io.atol = common.atol;
    io.sample_dt = opts.sample_dt;
    io.stepper = opts.effective_stepper ? Stepper::effective : Stepper::scores;
    const TrajectoryRecord rec = integrate(g, x0, opts.t_end, io);

    std::ostringstream csv;
    write_trajectory_csv(rec, csv);
    write_text(opts.csv_path, csv.str(), out);

    ordered_json report;
    report["t_end"] = opts.t_end;
    report["initial_state"] = to_std(x0.flat());
    report["final_state"] = to_std(rec.states.back().flat());
    report["energy_drift"] = energy_drift(rec);
    report["vertex_distance"] = vertex_distance(rec.states.back());
    std::vector<double> reg;
    for (int i = 0; i < g.num_players(); ++i) reg.push_back(regret(rec, g, i));
    report["regret"] = reg;
    report["steps"] = {{"accepted", rec.accepted_steps}, {"rejected", rec.rejected_steps}};
    if (opts.recurrence)
      report["recurrence"] = recurrence_to_json(detect_recurrence(g, x0, opts.epsilon, opts.t_end, io));
    if (!opts.report_path.empty()) write_text(opts.report_path, report.dump(2) + "\n", out);
    else if (!opts.csv_path.empty()) out << report.dump(2) << "\n";
    return kOk;
  });
}

void validate(const ExperimentConfig& cfg) {
  if (!(cfg.t_end > 0.0)) throw std::invalid_argument("t_end must be positive");
  if (!(cfg.epsilon > 0.0)) throw std::invalid_argument("epsilon must be positive");
  for (double l : cfg.lambda_grid)
    if (!(l >= 0.0 && l <= 1.0)) throw std::invalid_argument("lambda values must lie in [0, 1]");
  if (cfg.shape.empty()) throw std::invalid_argument("shape must be non-empty");
  for (int n : cfg.shape)
    if (n < 2) throw std::invalid_argument("every player needs at least two actions");
}

std::pair<Game, Game> mixture_endpoints(const ExperimentConfig& cfg) {
  if (cfg.shape == std::vector<int>{2, 2, 2})
    return {fixtures::mixture_potential_222(), fixtures::mixture_harmonic_222()};
  return {random_potential(cfg.shape, cfg.seed), random_harmonic(cfg.shape, cfg.seed + 1)};
}

std::vector<MixtureRow> run_mixture(const ExperimentConfig& cfg) {
  validate(cfg);
  std::vector<double> grid = cfg.lambda_grid;
  if (grid.empty())
    for (int k = 0; k <= 7; ++k) grid.push_back(k / 7.0);

  const auto [potential, harmonic] = mixture_endpoints(cfg);
  Rng rng(cfg.seed);
  const MixedProfile x0 = random_interior(cfg.shape, rng);

  IntegrateOptions io;
  io.rtol = cfg.rtol;
  io.atol = cfg.atol;

  auto run_one = [&](double lambda) {
    const Game g = lambda * potential + (1.0 - lambda) * harmonic;
    const TrajectoryRecord rec = integrate(g, x0, cfg.t_end, io);
    const RecurrenceReport rep = detect_recurrence(g, x0, cfg.epsilon, cfg.t_end, io);
    MixtureRow row;
    row.lambda = lambda;
    row.verdict = rep.verdict;
    row.returns = static_cast<int>(rep.return_times.size());
    row.energy_drift = energy_drift(rec);
    row.vertex_distance = vertex_distance(rec.states.back());
    row.converged_to_pure = row.vertex_distance <= cfg.vertex_tol;
    if (!cfg.output_dir.empty()) {
      std::filesystem::create_directories(cfg.output_dir);
      std::ofstream f(std::filesystem::path(cfg.output_dir) / ("mixture_" + fmt(lambda) + ".csv"));
      write_trajectory_csv(rec, f);
    }
    return row;
  };

  std::vector<MixtureRow> rows(grid.size());
  const int workers = std::max(1, std::min<int>(cfg.threads, static_cast<int>(grid.size())));
  if (workers == 1) {
    for (std::size_t k = 0; k < grid.size(); ++k) rows[k] = run_one(grid[k]);
    return rows;
  }
  // Strided assignment; every worker owns its integrators.
  std::vector<std::future<void>> jobs;
  for (int w = 0; w < workers; ++w) {
    jobs.push_back(std::async(std::launch::async, [&, w] {
      for (std::size_t k = w; k < grid.size(); k += workers) rows[k] = run_one(grid[k]);
    }));
  }
  for (auto& j : jobs) j.get();
  return rows;
}

int cmd_mixture(const ExperimentConfig& cfg, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    const auto rows = run_mixture(cfg);
    out << "lambda,verdict,returns,energy_drift,vertex_distance,converged_to_pure\n";
    for (const auto& r : rows)
      out << fmt(r.lambda) << "," << to_string(r.verdict) << "," << r.returns << ","
          << fmt(r.energy_drift) << "," << fmt(r.vertex_distance) << ","
          << (r.converged_to_pure ? "true" : "false") << "\n";
    return kOk;
  });
}

Game generate_game(const std::vector<int>& shape, GameClass cls, std::uint64_t seed, double scale) {
  switch (cls) {
    case GameClass::harmonic:
      return random_harmonic(shape, seed, scale);
    case GameClass::potential:
      return random_potential(shape, seed, scale);
    case GameClass::random:
      break;
  }
  return random_game(shape, seed, scale);
}

int cmd_generate(const std::vector<int>& shape, GameClass cls, std::uint64_t seed, double scale,
                 const std::string& out_path, const CommonOptions& common, std::ostream& out,
                 std::ostream& err) {
  return guarded(err, [&] {
    const Game g = generate_game(shape, cls, seed, scale);
    const double tol = std::max(common.tol, 1e-8);
    if (cls == GameClass::harmonic && !is_harmonic(g, tol)) {
      err << "error: generated game failed the harmonicity check\n";
      return static_cast<int>(kSolverFailure);
    }
    if (cls == GameClass::potential && !extract_potential(g, tol).phi) {
      err << "error: generated game failed the potential check\n";
      return static_cast<int>(kSolverFailure);
    }
    write_text(out_path, dump_game(g), out);
    return static_cast<int>(kOk);
  });
}

int cmd_div(const std::string& game_path, int grid, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    if (grid < 1) throw std::invalid_argument("--grid must be positive");
    const Game g = load_game(game_path);
    const auto sizes = g.effective_sizes();
    Eigen::Index d = 0;
    for (int s : sizes) d += s;
    const EffVectorField field = replicator_vector_field(g);

    for (std::size_t i = 0; i < sizes.size(); ++i)
      for (int l = 1; l <= sizes[i]; ++l) out << "xt_" << i << "_" << l << ",";
    out << "div_analytic,div_finite_difference\n";

    // Odometer over grid^d points with coordinates (k + 1) / (grid + 1).
    std::vector<int> idx(d, 0);
    for (;;) {
      Eigen::VectorXd flat(d);
      for (Eigen::Index c = 0; c < d; ++c) flat[c] = (idx[c] + 1.0) / (grid + 1.0);
      const EffProfile xt = EffProfile::from_flat(flat, sizes);
      if (is_interior(xt)) {
        const double a = replicator_divergence_analytic(g, embed(xt));
        const double f = shah_divergence(field, xt, JacobianMode::finite_difference);
        for (Eigen::Index c = 0; c < d; ++c) out << fmt(flat[c]) << ",";
        out << fmt(a) << "," << fmt(f) << "\n";
      }
      Eigen::Index c = 0;
      while (c < d && ++idx[c] == grid) idx[c++] = 0;
      if (c == d) break;
    }
    return kOk;
  });
}

int cmd_volume(double tol, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    ordered_json j = ordered_json::array();
    for (int m = 1; m <= 3; ++m) {
      ordered_json row;
      row["m"] = m;
      row["closed_form"] = simplex_volume_shah(m);
      if (m <= 2) {
        const VolumeEstimate e = simplex_volume_numeric(m, 4, tol);
        row["quadrature"] = e.value;
        row["points_per_axis"] = e.points;
        row["refinement_change"] = e.change;
        row["converged"] = e.converged;
        row["abs_difference"] = std::abs(e.value - simplex_volume_shah(m));
      }
      j.push_back(std::move(row));
    }
    out << j.dump(2) << "\n";
    return kOk;
  });
}

int thread_cap(int fallback) {
  const char* env = std::getenv("HARMONICA_THREADS");
  if (!env) return fallback;
  try {
    const int v = std::stoi(env);
    return v >= 1 ? v : fallback;
  } catch (const std::exception&) {
    return fallback;
  }
}

int run(int argc, char** argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"harmonica: potential/harmonic decomposition of finite games and replicator dynamics"};
  app.require_subcommand(1);

  CommonOptions common;
  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--tol", common.tol, "Absolute tolerance for exact identities")
        ->capture_default_str();
    sub->add_option("--seed", common.seed, "Random seed")->capture_default_str();
    sub->add_option("--rtol", common.rtol, "Integrator relative tolerance")->capture_default_str();
    sub->add_option("--atol", common.atol, "Integrator absolute tolerance")->capture_default_str();
  };

  std::string game_path, out_path;

  auto* dec = app.add_subcommand("decompose", "Potential + harmonic decomposition of a game");
  dec->add_option("game", game_path, "Game JSON file")->required();
  dec->add_option("--out", out_path, "Output JSON (default stdout)");
  add_common(dec);

  SimulateOptions sim;
  auto* simc = app.add_subcommand("simulate", "Integrate exponential weights / replicator dynamics");
  simc->add_option("game", sim.game_path, "Game JSON file")->required();
  simc->add_option("--x0", sim.x0, "Initial mixed profile, flat comma-separated")->delimiter(',');
  simc->add_option("--t-end", sim.t_end, "Final time")->capture_default_str();
  simc->add_option("--dt", sim.sample_dt, "Output spacing")->capture_default_str();
  simc->add_option("--csv", sim.csv_path, "Trajectory CSV (default stdout)");
  simc->add_option("--report", sim.report_path, "Report JSON");
  simc->add_flag("--recurrence", sim.recurrence, "Detect Poincare recurrence");
  simc->add_option("--eps", sim.epsilon, "Recurrence ball radius")->capture_default_str();
  simc->add_flag("--effective-stepper", sim.effective_stepper,
                 "Integrate in effective coordinates instead of scores");
  add_common(simc);

  ExperimentConfig mix;
  auto* mixc = app.add_subcommand("mixture", "Sweep lambda * potential + (1 - lambda) * harmonic");
  mixc->add_option("--shape", mix.shape, "Action counts")->delimiter(',')->capture_default_str();
  mixc->add_option("--lambda", mix.lambda_grid, "Lambda values (default 0, 1/7, ..., 1)")
      ->delimiter(',');
  mixc->add_option("--t-end", mix.t_end, "Final time")->capture_default_str();
  mixc->add_option("--eps", mix.epsilon, "Recurrence ball radius")->capture_default_str();
  mixc->add_option("--out-dir", mix.output_dir, "Write per-lambda trajectory CSVs here");
  add_common(mixc);

  std::vector<int> shape;
  std::string cls_name = "harmonic";
  double scale = 1.0;
  auto* gen = app.add_subcommand("generate", "Random game of a given class");
  gen->add_option("--shape", shape, "Action counts, e.g. 2,2,2")->delimiter(',')->required();
  gen->add_option("--class", cls_name, "harmonic | potential | random")
      ->check(CLI::IsMember({"harmonic", "potential", "random"}))
      ->capture_default_str();
  gen->add_option("--scale", scale, "Payoff range [-scale, scale]")->capture_default_str();
  gen->add_option("--out", out_path, "Output JSON (default stdout)");
  add_common(gen);

  int grid = 5;
  auto* div = app.add_subcommand("div", "Sample the replicator divergence on a grid");
  div->add_option("game", game_path, "Game JSON file")->required();
  div->add_option("--grid", grid, "Points per effective coordinate")->capture_default_str();
  add_common(div);

  auto* vol = app.add_subcommand("volume", "Shahshahani simplex volumes: closed form vs quadrature");
  add_common(vol);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    out << app.help();
    return kOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n";
    return kInputError;
  }

  if (dec->parsed()) return cmd_decompose(game_path, out_path, common, out, err);
  if (simc->parsed()) return cmd_simulate(sim, common, out, err);
  if (mixc->parsed()) {
    mix.seed = common.seed;
    mix.rtol = common.rtol;
    mix.atol = common.atol;
    mix.threads = thread_cap(static_cast<int>(std::max(1u, std::thread::hardware_concurrency())));
    return cmd_mixture(mix, out, err);
  }
  if (gen->parsed()) {
    const GameClass cls = cls_name == "harmonic"    ? GameClass::harmonic
                          : cls_name == "potential" ? GameClass::potential
                                                    : GameClass::random;
    return cmd_generate(shape, cls, common.seed, scale, out_path, common, out, err);
  }
  if (div->parsed()) return cmd_div(game_path, grid, out, err);
  if (vol->parsed()) return cmd_volume(std::min(common.tol, 1e-9), out, err);
  return kInputError;
}

}  // namespace harmonica::cli
