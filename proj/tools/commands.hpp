#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include <json.hpp>

#include "harmonica/decomposition.hpp"
#include "harmonica/dynamics.hpp"
#include "harmonica/game.hpp"

namespace harmonica::cli {

/// Exit codes of the command-line tool.
enum ExitCode : int { kOk = 0, kSolverFailure = 1, kInputError = 2 };

struct CommonOptions {
  double tol = 1e-9;
  std::uint64_t seed = 0;
  double rtol = 1e-9;
  double atol = 1e-12;
};

nlohmann::ordered_json decomposition_to_json(const DecompositionResult& d);

int cmd_decompose(const std::string& game_path, const std::string& out_path,
                  const CommonOptions& common, std::ostream& out, std::ostream& err);

struct SimulateOptions {
  std::string game_path;
  std::vector<double> x0;  // flat mixed profile; empty: random interior from seed
  double t_end = 100.0;
  double sample_dt = 0.1;
  std::string csv_path;     // empty: stdout
  std::string report_path;  // empty: no report file
  bool recurrence = false;
  double epsilon = 1e-2;
  bool effective_stepper = false;
};

/// Trajectory CSV: header `t,x_0_0,...,x_{N-1}_{n-1},energy,divergence`.
void write_trajectory_csv(const TrajectoryRecord& rec, std::ostream& out);

nlohmann::ordered_json recurrence_to_json(const RecurrenceReport& r);

int cmd_simulate(const SimulateOptions& opts, const CommonOptions& common, std::ostream& out,
                 std::ostream& err);

/// Lambda-mixture sweep between a potential and a harmonic game.
struct ExperimentConfig {
  std::uint64_t seed = 0;
  std::vector<int> shape{2, 2, 2};
  std::vector<double> lambda_grid;  // empty: {0, 1/7, ..., 1}
  double t_end = 200.0;
  double rtol = 1e-9;
  double atol = 1e-12;
  double epsilon = 1e-2;
  double vertex_tol = 1e-3;
  std::string output_dir;  // empty: no per-lambda trajectory files
  int threads = 1;
};

void validate(const ExperimentConfig& cfg);

struct MixtureRow {
  double lambda = 0.0;
  RecurrenceVerdict verdict = RecurrenceVerdict::not_observed;
  int returns = 0;
  double energy_drift = 0.0;
  double vertex_distance = 0.0;
  bool converged_to_pure = false;
};

/// Potential / harmonic endpoints of the sweep: the shipped 2x2x2 tables for
/// shape (2,2,2), seeded random games otherwise.
std::pair<Game, Game> mixture_endpoints(const ExperimentConfig& cfg);

std::vector<MixtureRow> run_mixture(const ExperimentConfig& cfg);

int cmd_mixture(const ExperimentConfig& cfg, std::ostream& out, std::ostream& err);

enum class GameClass { harmonic, potential, random };

Game generate_game(const std::vector<int>& shape, GameClass cls, std::uint64_t seed,
                   double scale = 1.0);

int cmd_generate(const std::vector<int>& shape, GameClass cls, std::uint64_t seed, double scale,
                 const std::string& out_path, const CommonOptions& common, std::ostream& out,
                 std::ostream& err);

/// Divergence of the replicator field on a grid of the open corner of cube:
/// analytic closed form next to the finite-difference Riemannian divergence.
int cmd_div(const std::string& game_path, int grid, std::ostream& out, std::ostream& err);

/// Closed-form simplex volumes for m = 1..3 and quadrature cross-checks for m = 1, 2.
int cmd_volume(double tol, std::ostream& out, std::ostream& err);

/// Worker cap from HARMONICA_THREADS (unset or invalid: `fallback`).
int thread_cap(int fallback);

/// Parse argv and dispatch; returns the process exit code.
int run(int argc, char** argv, std::ostream& out, std::ostream& err);

}  // namespace harmonica::cli
