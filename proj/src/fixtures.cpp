#include "harmonica/fixtures.hpp"

#include <array>

namespace harmonica::fixtures {

namespace {

// Tables are listed with player 1's action varying fastest:
// [0,0,0], [1,0,0], [0,1,0], [1,1,0], [0,0,1], ...
Eigen::VectorXd table_222(const std::array<double, 8>& listed) {
  Eigen::VectorXd t(8);
  for (int k = 0; k < 8; ++k) {
    const int a = k & 1, b = (k >> 1) & 1, c = (k >> 2) & 1;
    t[4 * a + 2 * b + c] = listed[k];
  }
  return t;
}

}  // namespace

Game matching_pennies(double scale) {
  Eigen::VectorXd u1(4);
  u1 << 1, -1, -1, 1;
  u1 *= scale;
  return Game({2, 2}, {u1, -u1});
}

Game prisoners_dilemma() {
  Eigen::VectorXd u1(4), u2(4);
  u1 << 2, 0, 3, 1;
  u2 << 2, 3, 0, 1;
  return Game({2, 2}, {u1, u2});
}

Game harmonic_two_by_three(double a, double b) {
  Eigen::VectorXd u1(6);
  u1 << a, b, -a - b, -a, -b, a + b;
  return Game({2, 3}, {u1, -2.0 / 3.0 * u1});
}

Game single_player_ab() {
  Eigen::VectorXd u(2);
  u << 0, 1;
  return Game({2}, {u});
}

Game mixture_potential_222() {
  return Game({2, 2, 2}, {table_222({-14, -8, -18, -7, 13, 8, -8, 1}),
                          table_222({-16, -16, 2, 7, 6, 0, -1, 7}),
                          table_222({-7, 0, 2, 8, 8, 4, -8, -4})});
}

Game mixture_harmonic_222() {
  return Game({2, 2, 2}, {table_222({7, 2, 1, 7, -29, -6, 24, 0}),
                          table_222({-15, -3, -10, 2, 23, -9, 0, 4}),
                          table_222({-8, 4, 1, -6, -8, -6, 0, 5})});
}

Game mixture_222(double lambda) {
  return lambda * mixture_potential_222() + (1.0 - lambda) * mixture_harmonic_222();
}

}  // namespace harmonica::fixtures
