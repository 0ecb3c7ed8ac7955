#include "harmonica/game.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "harmonica/errors.hpp"

namespace harmonica {

namespace {

// Remove `axis` from a row-major tensor by contracting it against `w`.
Eigen::VectorXd contract_axis(const Eigen::VectorXd& tensor, std::vector<int>& shape, int axis,
                              const Eigen::VectorXd& w) {
  Eigen::Index outer = 1, inner = 1;
  for (int a = 0; a < axis; ++a) outer *= shape[a];
  for (std::size_t a = axis + 1; a < shape.size(); ++a) inner *= shape[a];
  const Eigen::Index n = shape[axis];

  Eigen::VectorXd out(outer * inner);
  for (Eigen::Index o = 0; o < outer; ++o) {
    // Column-major view: rows = inner index, cols = contracted axis.
    Eigen::Map<const Eigen::MatrixXd> slab(tensor.data() + o * n * inner, inner, n);
    out.segment(o * inner, inner).noalias() = slab * w;
  }
  shape.erase(shape.begin() + axis);
  return out;
}

void check_shape(const std::vector<int>& shape, const MixedProfile& x) {
  if (x.size() != shape.size())
    throw DimensionError("profile has " + std::to_string(x.size()) + " blocks, game has " +
                         std::to_string(shape.size()) + " players");
  for (std::size_t i = 0; i < shape.size(); ++i)
    if (x[i].size() != shape[i])
      throw DimensionError("block " + std::to_string(i) + " has size " +
                           std::to_string(x[i].size()) + ", expected " +
                           std::to_string(shape[i]));
}

}  // namespace

Game::Game(std::vector<int> action_counts, std::vector<Eigen::VectorXd> payoffs)
    : actions_(std::move(action_counts)), payoffs_(std::move(payoffs)) {
  if (actions_.empty()) throw InputError("a game needs at least one player");
  for (int n : actions_)
    if (n < 2) throw InputError("every player needs at least two actions");
  if (payoffs_.size() != actions_.size())
    throw InputError("expected " + std::to_string(actions_.size()) + " payoff tensors, got " +
                     std::to_string(payoffs_.size()));

  strides_.assign(actions_.size(), 1);
  for (int i = static_cast<int>(actions_.size()) - 2; i >= 0; --i)
    strides_[i] = strides_[i + 1] * actions_[i + 1];
  profiles_ = strides_[0] * actions_[0];

  for (std::size_t i = 0; i < payoffs_.size(); ++i) {
    if (payoffs_[i].size() != profiles_)
      throw InputError("payoff tensor of player " + std::to_string(i) + " has " +
                       std::to_string(payoffs_[i].size()) + " entries, expected " +
                       std::to_string(profiles_));
    if (!payoffs_[i].allFinite())
      throw InputError("payoff tensor of player " + std::to_string(i) + " is not finite");
  }
}

Game Game::zeros(std::vector<int> action_counts) {
  Eigen::Index n = 1;
  for (int a : action_counts) n *= a;
  std::vector<Eigen::VectorXd> p(action_counts.size(), Eigen::VectorXd::Zero(n));
  return Game(std::move(action_counts), std::move(p));
}

Eigen::Index Game::index(std::span<const int> profile) const {
  if (profile.size() != actions_.size()) throw DimensionError("profile length mismatch");
  Eigen::Index idx = 0;
  for (std::size_t i = 0; i < actions_.size(); ++i) {
    if (profile[i] < 0 || profile[i] >= actions_[i]) throw DimensionError("action out of range");
    idx += profile[i] * strides_[i];
  }
  return idx;
}

std::vector<int> Game::profile(Eigen::Index index) const {
  std::vector<int> p(actions_.size());
  for (std::size_t i = 0; i < actions_.size(); ++i) p[i] = action_at(index, static_cast<int>(i));
  return p;
}

std::vector<int> Game::effective_sizes() const {
  std::vector<int> s(actions_);
  for (int& v : s) --v;
  return s;
}

Game operator+(const Game& a, const Game& b) {
  if (!a.same_shape(b)) throw DimensionError("cannot add games of different shapes");
  std::vector<Eigen::VectorXd> p(a.payoffs_.size());
  for (std::size_t i = 0; i < p.size(); ++i) p[i] = a.payoffs_[i] + b.payoffs_[i];
  return Game(a.actions_, std::move(p));
}

Game operator-(const Game& a, const Game& b) {
  if (!a.same_shape(b)) throw DimensionError("cannot subtract games of different shapes");
  std::vector<Eigen::VectorXd> p(a.payoffs_.size());
  for (std::size_t i = 0; i < p.size(); ++i) p[i] = a.payoffs_[i] - b.payoffs_[i];
  return Game(a.actions_, std::move(p));
}

Game operator*(double s, const Game& g) {
  std::vector<Eigen::VectorXd> p(g.payoffs_.size());
  for (std::size_t i = 0; i < p.size(); ++i) p[i] = s * g.payoffs_[i];
  return Game(g.actions_, std::move(p));
}

Game common_interest(const std::vector<int>& action_counts, const Eigen::VectorXd& phi) {
  return Game(action_counts, std::vector<Eigen::VectorXd>(action_counts.size(), phi));
}

double contract_all(const Eigen::VectorXd& tensor, const std::vector<int>& shape,
                    const MixedProfile& x) {
  check_shape(shape, x);
  std::vector<int> s = shape;
  Eigen::VectorXd t = tensor;
  for (int axis = static_cast<int>(s.size()) - 1; axis >= 0; --axis)
    t = contract_axis(t, s, axis, x[axis]);
  return t[0];
}

Eigen::VectorXd contract_except(const Eigen::VectorXd& tensor, const std::vector<int>& shape,
                                const MixedProfile& x, int keep) {
  check_shape(shape, x);
  std::vector<int> s = shape;
  Eigen::VectorXd t = tensor;
  // Back to front, so indices of the axes not yet visited stay valid.
  for (int axis = static_cast<int>(s.size()) - 1; axis >= 0; --axis) {
    if (axis == keep) continue;
    t = contract_axis(t, s, axis, x[axis]);
  }
  return t;
}

Eigen::MatrixXd contract_except_pair(const Eigen::VectorXd& tensor, const std::vector<int>& shape,
                                     const MixedProfile& x, int keep_a, int keep_b) {
  check_shape(shape, x);
  if (keep_a >= keep_b) throw DimensionError("contract_except_pair needs keep_a < keep_b");
  std::vector<int> s = shape;
  Eigen::VectorXd t = tensor;
  for (int axis = static_cast<int>(s.size()) - 1; axis >= 0; --axis) {
    if (axis == keep_a || axis == keep_b) continue;
    t = contract_axis(t, s, axis, x[axis]);
  }
  // Remaining row-major (shape[keep_a], shape[keep_b]) matrix.
  return Eigen::Map<const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>>(
      t.data(), shape[keep_a], shape[keep_b]);
}

double mixed_payoff(const Game& g, const MixedProfile& x, int player) {
  return contract_all(g.payoffs(player), g.action_counts(), x);
}

PayoffField payoff_field(const Game& g, const MixedProfile& x) {
  PayoffField v;
  v.blocks.reserve(g.num_players());
  for (int i = 0; i < g.num_players(); ++i)
    v.blocks.push_back(contract_except(g.payoffs(i), g.action_counts(), x, i));
  return v;
}

Eigen::MatrixXd payoff_field_jacobian(const Game& g, const MixedProfile& x, int player,
                                      int other) {
  if (player == other) return Eigen::MatrixXd::Zero(g.actions(player), g.actions(player));
  if (player < other)
    return contract_except_pair(g.payoffs(player), g.action_counts(), x, player, other);
  return contract_except_pair(g.payoffs(player), g.action_counts(), x, other, player)
      .transpose();
}

MixedProfile embed(const EffProfile& xt) {
  MixedProfile x;
  x.blocks.reserve(xt.size());
  for (const auto& b : xt.blocks) {
    const double x0 = 1.0 - b.sum();
    if (!(b.array() > 0.0).all() || !(x0 > 0.0))
      throw BoundaryError("effective profile is not in the open corner of cube");
    Eigen::VectorXd full(b.size() + 1);
    full[0] = x0;
    full.tail(b.size()) = b;
    x.blocks.push_back(std::move(full));
  }
  return x;
}

EffProfile reduce(const MixedProfile& x) {
  EffProfile xt;
  xt.blocks.reserve(x.size());
  for (const auto& b : x.blocks) {
    if (!(b.array() > 0.0).all()) throw BoundaryError("mixed profile is not interior");
    xt.blocks.emplace_back(b.tail(b.size() - 1));
  }
  return xt;
}

EffPayoffField eff_payoff_field(const Game& g, const MixedProfile& x) {
  const PayoffField v = payoff_field(g, x);
  EffPayoffField vt;
  vt.blocks.reserve(v.size());
  for (const auto& b : v.blocks)
    vt.blocks.emplace_back(b.tail(b.size() - 1).array() - b[0]);
  return vt;
}

EffPayoffField eff_payoff_field(const Game& g, const EffProfile& xt) {
  validate_effective(g, xt);
  return eff_payoff_field(g, embed(xt));
}

Eigen::MatrixXd eff_payoff_jacobian(const Game& g, const MixedProfile& x) {
  const auto sizes = g.effective_sizes();
  std::vector<Eigen::Index> offset(sizes.size() + 1, 0);
  for (std::size_t i = 0; i < sizes.size(); ++i) offset[i + 1] = offset[i] + sizes[i];

  Eigen::MatrixXd jac = Eigen::MatrixXd::Zero(offset.back(), offset.back());
  for (int i = 0; i < g.num_players(); ++i) {
    for (int j = 0; j < g.num_players(); ++j) {
      if (i == j) continue;
      // (d/dx_{jk} - d/dx_{j0}) (v_{il} - v_{i0})
      const Eigen::MatrixXd h = payoff_field_jacobian(g, x, i, j);
      for (int l = 1; l <= sizes[i]; ++l)
        for (int k = 1; k <= sizes[j]; ++k)
          jac(offset[i] + l - 1, offset[j] + k - 1) = h(l, k) - h(l, 0) - h(0, k) + h(0, 0);
    }
  }
  return jac;
}

void validate_mixed(const Game& g, const MixedProfile& x, double tol) {
  check_shape(g.action_counts(), x);
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (!x[i].allFinite() || (x[i].array() < 0.0).any() || std::abs(x[i].sum() - 1.0) > tol)
      throw BoundaryError("block " + std::to_string(i) + " is not a probability vector");
  }
}

void validate_effective(const Game& g, const EffProfile& xt) {
  const auto sizes = g.effective_sizes();
  if (xt.size() != sizes.size()) throw DimensionError("effective profile has wrong player count");
  for (std::size_t i = 0; i < sizes.size(); ++i)
    if (xt[i].size() != sizes[i])
      throw DimensionError("effective block " + std::to_string(i) + " has wrong size");
  if (!is_interior(xt)) throw BoundaryError("effective profile is not in the open corner of cube");
}

bool is_interior(const MixedProfile& x) {
  return std::all_of(x.blocks.begin(), x.blocks.end(),
                     [](const Eigen::VectorXd& b) { return (b.array() > 0.0).all(); });
}

bool is_interior(const EffProfile& xt) {
  return std::all_of(xt.blocks.begin(), xt.blocks.end(), [](const Eigen::VectorXd& b) {
    return (b.array() > 0.0).all() && b.sum() < 1.0;
  });
}

MixedProfile barycenter(const std::vector<int>& action_counts) {
  MixedProfile b;
  for (int n : action_counts) b.blocks.push_back(Eigen::VectorXd::Constant(n, 1.0 / n));
  return b;
}

double equivalence_defect(const Game& g, const Game& h) {
  if (!g.same_shape(h)) throw DimensionError("games have different shapes");
  return non_strategic_defect(g - h);
}

bool is_strategically_equivalent(const Game& g, const Game& h, double tol) {
  return equivalence_defect(g, h) <= tol;
}

double non_strategic_defect(const Game& g) {
  // A player is indifferent iff the payoff is constant along each of her
  // fibers; the worst pairwise difference on a fiber is its range.
  double worst = 0.0;
  for (int i = 0; i < g.num_players(); ++i) {
    const Eigen::VectorXd& u = g.payoffs(i);
    for (Eigen::Index a = 0; a < g.num_profiles(); ++a) {
      if (g.action_at(a, i) != 0) continue;
      double lo = u[a], hi = u[a];
      for (int b = 1; b < g.actions(i); ++b) {
        const double val = u[g.deviate(a, i, b)];
        lo = std::min(lo, val);
        hi = std::max(hi, val);
      }
      worst = std::max(worst, hi - lo);
    }
  }
  return worst;
}

bool is_non_strategic(const Game& g, double tol) { return non_strategic_defect(g) <= tol; }

}  // namespace harmonica
