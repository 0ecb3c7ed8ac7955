#pragma once

#include <Eigen/Dense>
#include <cstddef>
#include <vector>

namespace harmonica {

/// Per-player stack of dense vectors. The tag keeps full and effective
/// quantities from being mixed up at compile time.
template <class Tag, class Scalar = double>
struct BlockVector {
  using VectorType = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

  std::vector<VectorType> blocks;

  BlockVector() = default;
  explicit BlockVector(std::vector<VectorType> b) : blocks(std::move(b)) {}

  std::size_t size() const { return blocks.size(); }
  VectorType& operator[](std::size_t i) { return blocks[i]; }
  const VectorType& operator[](std::size_t i) const { return blocks[i]; }

  Eigen::Index total_size() const {
    Eigen::Index n = 0;
    for (const auto& b : blocks) n += b.size();
    return n;
  }

  VectorType flat() const {
    VectorType out(total_size());
    Eigen::Index off = 0;
    for (const auto& b : blocks) {
      out.segment(off, b.size()) = b;
      off += b.size();
    }
    return out;
  }

  /// Split `v` into consecutive blocks of the given sizes.
  template <class Derived>
  static BlockVector from_flat(const Eigen::MatrixBase<Derived>& v, const std::vector<int>& sizes) {
    BlockVector out;
    out.blocks.reserve(sizes.size());
    Eigen::Index off = 0;
    for (int s : sizes) {
      out.blocks.emplace_back(v.segment(off, s));
      off += s;
    }
    return out;
  }

  std::vector<int> sizes() const {
    std::vector<int> s;
    s.reserve(blocks.size());
    for (const auto& b : blocks) s.push_back(static_cast<int>(b.size()));
    return s;
  }
};

struct MixedTag;
struct EffTag;
struct PayoffTag;
struct EffPayoffTag;
struct ScoreTag;
struct TangentTag;
struct EffTangentTag;

/// Point of the product of simplices, blocks[i] in R^{|A_i|}.
using MixedProfile = BlockVector<MixedTag>;
/// Corner-of-cube coordinates: action 0 of every player dropped.
using EffProfile = BlockVector<EffTag>;
/// v_{i a}(x) = u_i(a; x_{-i}).
using PayoffField = BlockVector<PayoffTag>;
/// v_{i l} - v_{i 0}, l >= 1.
using EffPayoffField = BlockVector<EffPayoffTag>;
/// Cumulative payoff scores of exponential weights.
using ScoreState = BlockVector<ScoreTag>;
/// Tangent vector of the product of simplices (each block sums to zero).
using Tangent = BlockVector<TangentTag>;
/// Tangent vector in effective coordinates.
using EffTangent = BlockVector<EffTangentTag>;

}  // namespace harmonica
