#include "harmonica/random.hpp"

namespace harmonica {

Game random_game(const std::vector<int>& shape, std::uint64_t seed, double scale) {
  Rng rng(seed);
  return random_game(shape, rng, scale);
}

Game random_game(const std::vector<int>& shape, Rng& rng, double scale) {
  std::uniform_real_distribution<double> unif(-scale, scale);
  Game z = Game::zeros(shape);
  std::vector<Eigen::VectorXd> p(shape.size(), Eigen::VectorXd(z.num_profiles()));
  for (auto& t : p)
    for (Eigen::Index a = 0; a < t.size(); ++a) t[a] = unif(rng);
  return Game(shape, std::move(p));
}

Game random_non_strategic(const std::vector<int>& shape, Rng& rng, double scale) {
  std::uniform_real_distribution<double> unif(-scale, scale);
  Game z = Game::zeros(shape);
  std::vector<Eigen::VectorXd> p(shape.size(), Eigen::VectorXd(z.num_profiles()));
  for (int i = 0; i < z.num_players(); ++i) {
    // Draw f_i on the profiles where player i plays 0, copy along the fiber.
    for (Eigen::Index a = 0; a < z.num_profiles(); ++a) {
      if (z.action_at(a, i) != 0) continue;
      const double f = unif(rng);
      for (int b = 0; b < shape[i]; ++b) p[i][z.deviate(a, i, b)] = f;
    }
  }
  return Game(shape, std::move(p));
}

MixedProfile random_interior(const std::vector<int>& shape, Rng& rng) {
  std::exponential_distribution<double> expo(1.0);
  MixedProfile x;
  for (int n : shape) {
    Eigen::VectorXd b(n);
    for (int a = 0; a < n; ++a) b[a] = expo(rng) + 1e-300;
    x.blocks.push_back(b / b.sum());
  }
  return x;
}

EffProfile random_interior_effective(const std::vector<int>& shape, Rng& rng) {
  return reduce(random_interior(shape, rng));
}

}  // namespace harmonica
