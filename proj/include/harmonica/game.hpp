#pragma once

#include <Eigen/Dense>
#include <span>
#include <vector>

#include "harmonica/profile.hpp"

namespace harmonica {

/// Finite normal-form game. Payoff tensors are dense, stored row-major in
/// profile order: flat index = sum_i a_i * stride_i with the last player
/// varying fastest. Immutable after construction.
class Game {
 public:
  Game(std::vector<int> action_counts, std::vector<Eigen::VectorXd> payoffs);

  /// All-zero game of the given shape.
  static Game zeros(std::vector<int> action_counts);

  int num_players() const { return static_cast<int>(actions_.size()); }
  const std::vector<int>& action_counts() const { return actions_; }
  int actions(int player) const { return actions_[player]; }
  Eigen::Index num_profiles() const { return profiles_; }
  Eigen::Index stride(int player) const { return strides_[player]; }

  const Eigen::VectorXd& payoffs(int player) const { return payoffs_[player]; }
  const std::vector<Eigen::VectorXd>& all_payoffs() const { return payoffs_; }

  Eigen::Index index(std::span<const int> profile) const;
  std::vector<int> profile(Eigen::Index index) const;
  /// Action of `player` in the profile with the given flat index.
  int action_at(Eigen::Index index, int player) const {
    return static_cast<int>((index / strides_[player]) % actions_[player]);
  }
  /// Flat index of the profile obtained by switching `player` to `action`.
  Eigen::Index deviate(Eigen::Index index, int player, int action) const {
    return index + (action - action_at(index, player)) * strides_[player];
  }

  double payoff(int player, std::span<const int> profile) const {
    return payoffs_[player][index(profile)];
  }

  bool same_shape(const Game& other) const { return actions_ == other.actions_; }

  /// Sizes of the effective (corner-of-cube) blocks, |A_i| - 1.
  std::vector<int> effective_sizes() const;

  friend Game operator+(const Game& a, const Game& b);
  friend Game operator-(const Game& a, const Game& b);
  friend Game operator*(double s, const Game& g);

 private:
  std::vector<int> actions_;
  std::vector<Eigen::Index> strides_;
  Eigen::Index profiles_ = 0;
  std::vector<Eigen::VectorXd> payoffs_;
};

/// Game with u_i = phi for every player.
Game common_interest(const std::vector<int>& action_counts, const Eigen::VectorXd& phi);

// ---------------------------------------------------------------------------
// Multilinear evaluation

/// Contract a row-major tensor of the given shape against one vector per
/// axis: sum_a T(a) prod_j x_{j a_j}. One axis at a time, never enumerating
/// profiles.
double contract_all(const Eigen::VectorXd& tensor, const std::vector<int>& shape,
                    const MixedProfile& x);

/// Contract every axis except `keep`; returns a vector of length shape[keep].
Eigen::VectorXd contract_except(const Eigen::VectorXd& tensor, const std::vector<int>& shape,
                                const MixedProfile& x, int keep);

/// Contract every axis except `keep_a` < `keep_b`; returns a
/// shape[keep_a] x shape[keep_b] matrix.
Eigen::MatrixXd contract_except_pair(const Eigen::VectorXd& tensor, const std::vector<int>& shape,
                                     const MixedProfile& x, int keep_a, int keep_b);

/// u_i(x) = <v_i(x), x_i>.
double mixed_payoff(const Game& g, const MixedProfile& x, int player);

/// v_{i a}(x) = u_i(a; x_{-i}) for every player; block i does not depend on x_i.
PayoffField payoff_field(const Game& g, const MixedProfile& x);

/// Second derivatives of the multilinear payoffs: entry (a, b) of
/// result is d v_{i a} / d x_{j b} = u_i(a, b; x_{-ij}), for i != j.
Eigen::MatrixXd payoff_field_jacobian(const Game& g, const MixedProfile& x, int player,
                                      int other);

// ---------------------------------------------------------------------------
// Effective representation

/// x_{i0} = 1 - sum_l xt_{il}; rejects points outside the open corner of cube.
MixedProfile embed(const EffProfile& xt);
/// Drops action 0 of every block; rejects boundary points.
EffProfile reduce(const MixedProfile& x);

/// vt_{il} = v_{il}(x) - v_{i0}(x) with x = embed(xt).
EffPayoffField eff_payoff_field(const Game& g, const EffProfile& xt);
EffPayoffField eff_payoff_field(const Game& g, const MixedProfile& x);

/// Jacobian of the effective payoff field, in effective coordinates:
/// d vt_{il} / d xt_{jk}. Dense (sum m_i) x (sum m_i), with zero diagonal
/// player blocks.
Eigen::MatrixXd eff_payoff_jacobian(const Game& g, const MixedProfile& x);

// ---------------------------------------------------------------------------
// Validation

/// Throws DimensionError on shape mismatch, BoundaryError if a block is not
/// a probability vector (within `tol`).
void validate_mixed(const Game& g, const MixedProfile& x, double tol = 1e-12);
void validate_effective(const Game& g, const EffProfile& xt);
bool is_interior(const MixedProfile& x);
bool is_interior(const EffProfile& xt);

/// Uniform distribution on each player's actions.
MixedProfile barycenter(const std::vector<int>& action_counts);

// ---------------------------------------------------------------------------
// Strategic equivalence

/// Largest deviation-difference mismatch between g and h over pure profiles:
/// max |(u^g_i(b; a_{-i}) - u^g_i(a)) - (u^h_i(b; a_{-i}) - u^h_i(a))|.
double equivalence_defect(const Game& g, const Game& h);
bool is_strategically_equivalent(const Game& g, const Game& h, double tol = 1e-9);

/// max |u_i(b; a_{-i}) - u_i(a)| over all i, a, b.
double non_strategic_defect(const Game& g);
bool is_non_strategic(const Game& g, double tol = 1e-9);

}  // namespace harmonica
