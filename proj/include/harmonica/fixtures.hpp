#pragma once

#include "harmonica/game.hpp"

namespace harmonica::fixtures {

/// u_1 = [[1, -1], [-1, 1]], u_2 = -u_1. Harmonic.
Game matching_pennies(double scale = 1.0);

/// u_1 = (2, 0, 3, 1), u_2 = (2, 3, 0, 1) row-major; action 1 defects.
/// Potential with phi = (-1, 0, 0, 1).
Game prisoners_dilemma();

/// 2x3 game u_1 = [[a, b, -a-b], [-a, -b, a+b]], u_2 = -(2/3) u_1; harmonic
/// for every a, b.
Game harmonic_two_by_three(double a = 1.0, double b = 2.0);

/// Single player, actions (A, B), u(A) = 0, u(B) = 1.
Game single_player_ab();

/// 2x2x2 potential and harmonic tables of the lambda-mixture experiment.
Game mixture_potential_222();
Game mixture_harmonic_222();

/// lambda * potential + (1 - lambda) * harmonic.
Game mixture_222(double lambda);

}  // namespace harmonica::fixtures
