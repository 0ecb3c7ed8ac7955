#pragma once

#include <cstdint>
#include <random>
#include <vector>

#include "harmonica/game.hpp"

namespace harmonica {

using Rng = std::mt19937_64;

/// Payoff entries i.i.d. uniform on [-scale, scale].
Game random_game(const std::vector<int>& shape, std::uint64_t seed, double scale = 1.0);
Game random_game(const std::vector<int>& shape, Rng& rng, double scale = 1.0);

/// u_i(a) = f_i(a_{-i}) with f_i uniform on [-scale, scale].
Game random_non_strategic(const std::vector<int>& shape, Rng& rng, double scale = 1.0);

/// Uniform (flat Dirichlet) interior point of each simplex.
MixedProfile random_interior(const std::vector<int>& shape, Rng& rng);
EffProfile random_interior_effective(const std::vector<int>& shape, Rng& rng);

}  // namespace harmonica
