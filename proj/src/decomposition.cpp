#include "harmonica/decomposition.hpp"

#include <Eigen/IterativeLinearSolvers>
#include <algorithm>
#include <cmath>

#include "harmonica/errors.hpp"
#include "harmonica/geometry.hpp"
#include "harmonica/random.hpp"

namespace harmonica {

Eigen::VectorXd harmonicity_defect(const Game& g) {
  Eigen::VectorXd f = Eigen::VectorXd::Zero(g.num_profiles());
  for (int i = 0; i < g.num_players(); ++i) {
    const Eigen::VectorXd& u = g.payoffs(i);
    const double n = g.actions(i);
    for (Eigen::Index a = 0; a < g.num_profiles(); ++a) {
      if (g.action_at(a, i) != 0) continue;
      double fiber = 0.0;
      for (int b = 0; b < g.actions(i); ++b) fiber += u[g.deviate(a, i, b)];
      for (int b = 0; b < g.actions(i); ++b) {
        const Eigen::Index ab = g.deviate(a, i, b);
        f[ab] += fiber - n * u[ab];
      }
    }
  }
  return f;
}

bool is_harmonic(const Game& g, double tol) {
  return harmonicity_defect(g).cwiseAbs().maxCoeff() <= tol;
}

bool is_incompressible(const Game& g, int samples, double tol, std::uint64_t seed) {
  if (samples < 1) throw std::invalid_argument("is_incompressible: samples must be >= 1");
  const bool exact = is_harmonic(g, tol);
  Rng rng(seed);
  bool sampled = true;
  for (int s = 0; s < samples; ++s) {
    const MixedProfile x = random_interior(g.action_counts(), rng);
    if (std::abs(replicator_divergence_analytic(g, x)) > tol) {
      sampled = false;
      break;
    }
  }
  return exact && sampled;
}

PotentialExtraction extract_potential(const Game& g, double tol) {
  const Eigen::Index n = g.num_profiles();
  Eigen::VectorXd phi(n);
  for (Eigen::Index a = 0; a < n; ++a) {
    // Walk 0 -> a switching player 0 first, then player 1, ...
    Eigen::Index cur = 0;
    double acc = 0.0;
    for (int i = 0; i < g.num_players(); ++i) {
      const Eigen::Index next = g.deviate(cur, i, g.action_at(a, i));
      acc += g.payoffs(i)[next] - g.payoffs(i)[cur];
      cur = next;
    }
    phi[a] = acc;
  }

  PotentialExtraction out;
  for (int i = 0; i < g.num_players(); ++i) {
    const Eigen::VectorXd& u = g.payoffs(i);
    for (Eigen::Index a = 0; a < n; ++a) {
      for (int b = 0; b < g.actions(i); ++b) {
        const Eigen::Index ab = g.deviate(a, i, b);
        const double gap = std::abs((u[ab] - u[a]) - (phi[ab] - phi[a]));
        out.max_violation = std::max(out.max_violation, gap);
      }
    }
  }
  if (out.max_violation <= tol) out.phi = std::move(phi);
  return out;
}

Eigen::SparseMatrix<double> response_graph_laplacian(const std::vector<int>& shape) {
  const Game z = Game::zeros(shape);
  const Eigen::Index n = z.num_profiles();
  int degree = 0;
  for (int a : shape) degree += a - 1;

  std::vector<Eigen::Triplet<double>> trip;
  trip.reserve(static_cast<std::size_t>(n) * (degree + 1));
  for (Eigen::Index a = 0; a < n; ++a) {
    trip.emplace_back(a, a, degree);
    for (int i = 0; i < z.num_players(); ++i)
      for (int b = 0; b < shape[i]; ++b)
        if (b != z.action_at(a, i)) trip.emplace_back(a, z.deviate(a, i, b), -1.0);
  }
  Eigen::SparseMatrix<double> lap(n, n);
  lap.setFromTriplets(trip.begin(), trip.end());
  return lap;
}

Eigen::VectorXd apply_laplacian(const std::vector<int>& shape, const Eigen::VectorXd& phi) {
  const Game z = Game::zeros(shape);
  Eigen::VectorXd out = Eigen::VectorXd::Zero(z.num_profiles());
  for (Eigen::Index a = 0; a < z.num_profiles(); ++a)
    for (int i = 0; i < z.num_players(); ++i)
      for (int b = 0; b < shape[i]; ++b) out[a] += phi[a] - phi[z.deviate(a, i, b)];
  return out;
}

namespace {

// Drop row and column 0 (the pinned profile).
Eigen::SparseMatrix<double> pinned(const Eigen::SparseMatrix<double>& lap) {
  const Eigen::Index n = lap.rows();
  return lap.bottomRightCorner(n - 1, n - 1);
}

}  // namespace

DecompositionResult decompose(const Game& g, double solver_tol, long max_iter,
                              LaplacianSolver solver) {
  const auto& shape = g.action_counts();
  const Eigen::Index n = g.num_profiles();
  const Eigen::VectorXd rhs_full = -harmonicity_defect(g);

  if (solver == LaplacianSolver::automatic)
    solver = n > 10000 ? LaplacianSolver::conjugate_gradient : LaplacianSolver::dense;

  const Eigen::SparseMatrix<double> lap = pinned(response_graph_laplacian(shape));
  const Eigen::VectorXd rhs = rhs_full.tail(n - 1);
  const double rhs_norm = rhs.norm();

  SolverStats stats;
  Eigen::VectorXd phi = Eigen::VectorXd::Zero(n);
  if (rhs_norm > 0.0) {
    Eigen::VectorXd sol;
    if (solver == LaplacianSolver::dense) {
      const Eigen::MatrixXd dense_lap(lap);
      Eigen::LLT<Eigen::MatrixXd> llt(dense_lap);
      if (llt.info() != Eigen::Success) throw SolverError("pinned Laplacian is not SPD", 0, 0.0);
      sol = llt.solve(rhs);
      stats.method = "dense-cholesky";
      stats.iterations = 1;
    } else {
      Eigen::ConjugateGradient<Eigen::SparseMatrix<double>, Eigen::Lower | Eigen::Upper,
                               Eigen::DiagonalPreconditioner<double>>
          cg;
      cg.setTolerance(solver_tol);
      cg.setMaxIterations(max_iter);
      cg.compute(lap);
      sol = cg.solve(rhs);
      stats.method = "conjugate-gradient";
      stats.iterations = cg.iterations();
      if (cg.info() != Eigen::Success) {
        const double res = (lap * sol - rhs).norm() / rhs_norm;
        throw SolverError("conjugate gradient did not converge", cg.iterations(), res);
      }
    }
    phi.tail(n - 1) = sol;
    stats.residual = (lap * sol - rhs).norm() / rhs_norm;
  } else {
    stats.method = solver == LaplacianSolver::dense ? "dense-cholesky" : "conjugate-gradient";
  }

  Game potential = common_interest(shape, phi);
  Game harmonic = g - potential;
  const double defect = harmonicity_defect(harmonic).cwiseAbs().maxCoeff();
  return DecompositionResult{std::move(phi), std::move(potential), std::move(harmonic), defect,
                             stats};
}

Game random_harmonic(const std::vector<int>& shape, std::uint64_t seed, double scale) {
  return decompose(random_game(shape, seed, scale)).harmonic_game;
}

Game random_potential(const std::vector<int>& shape, std::uint64_t seed, double scale,
                      bool non_strategic) {
  Rng rng(seed);
  std::uniform_real_distribution<double> unif(-scale, scale);
  const Game z = Game::zeros(shape);
  Eigen::VectorXd phi(z.num_profiles());
  for (Eigen::Index a = 0; a < phi.size(); ++a) phi[a] = unif(rng);
  Game g = common_interest(shape, phi);
  if (non_strategic) g = g + random_non_strategic(shape, rng, scale);
  return g;
}

}  // namespace harmonica
