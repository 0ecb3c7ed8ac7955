#pragma once

#include <Eigen/Dense>
#include <Eigen/Sparse>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "harmonica/game.hpp"

namespace harmonica {

/// F(a) = sum_i sum_b [u_i(b; a_{-i}) - u_i(a)], the net incentive to deviate
/// away from every pure profile. Zero everywhere iff the game is harmonic.
Eigen::VectorXd harmonicity_defect(const Game& g);

bool is_harmonic(const Game& g, double tol = 1e-8);

/// Zero Shahshahani divergence of the replicator field: checks the exact
/// multilinear certificate max|F| <= tol and, redundantly, the analytic
/// divergence at `samples` random interior points.
bool is_incompressible(const Game& g, int samples = 16, double tol = 1e-8,
                       std::uint64_t seed = 0);

struct PotentialExtraction {
  std::optional<Eigen::VectorXd> phi;  // phi(0, ..., 0) = 0
  double max_violation = 0.0;          // worst mismatch of the potential identity
};

/// Exact-potential test by path integration from the all-zeros profile
/// (player 0 first, then 1, ...). `phi` is empty if any deviation violates
/// the potential identity by more than `tol`.
PotentialExtraction extract_potential(const Game& g, double tol = 1e-9);

enum class LaplacianSolver { automatic, dense, conjugate_gradient };

struct SolverStats {
  long iterations = 0;
  double residual = 0.0;  // relative residual of the pinned normal equations
  std::string method;
};

struct DecompositionResult {
  Eigen::VectorXd potential_fn;
  Game potential_game;
  Game harmonic_game;
  double residual_harmonicity = 0.0;  // max |F| of the harmonic component
  SolverStats solver_stats;
};

/// Response-graph Laplacian: nodes are pure profiles, edges join profiles
/// differing in one player's action. Every node has degree sum_i (|A_i| - 1).
Eigen::SparseMatrix<double> response_graph_laplacian(const std::vector<int>& shape);

/// Matrix-free L * phi.
Eigen::VectorXd apply_laplacian(const std::vector<int>& shape, const Eigen::VectorXd& phi);

/// Least-squares projection of the deviation flow onto potential flows:
/// solve L phi = -F with phi(0, ..., 0) pinned to zero. Potential part is the
/// common-interest game u^P_i = phi, harmonic part is u - u^P.
/// `automatic` picks dense Cholesky below 10^4 profiles, CG above.
DecompositionResult decompose(const Game& g, double solver_tol = 1e-12, long max_iter = 10000,
                              LaplacianSolver solver = LaplacianSolver::automatic);

/// Harmonic component of a game with uniform [-scale, scale] payoffs.
Game random_harmonic(const std::vector<int>& shape, std::uint64_t seed, double scale = 1.0);

/// u_i = phi + f_i(a_{-i}) with phi and (unless `non_strategic` is false)
/// f_i uniform on [-scale, scale].
Game random_potential(const std::vector<int>& shape, std::uint64_t seed, double scale = 1.0,
                      bool non_strategic = true);

}  // namespace harmonica
