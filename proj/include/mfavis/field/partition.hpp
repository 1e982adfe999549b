// Copyright 2026 The mfavis Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <vector>

#include "mfavis/field/grid.hpp"
#include "mfavis/vec3.hpp"

namespace mfavis {

// One leaf of the bisection tree. `index_lo..index_hi` is the inclusive sample
// range the block reads (its owned samples plus the shared plane on every +axis
// face that borders a sibling); `owned_lo..owned_hi` are the samples it alone
// accounts for.
struct Block {
  int id = 0;
  Index3 index_lo{};
  Index3 index_hi{};
  Index3 owned_lo{};
  Index3 owned_hi{};
  Aabb bounds;

  Index3 extent() const {
    return {index_hi[0] - index_lo[0] + 1, index_hi[1] - index_lo[1] + 1,
            index_hi[2] - index_lo[2] + 1};
  }
  Index3 owned_extent() const {
    return {owned_hi[0] - owned_lo[0] + 1, owned_hi[1] - owned_lo[1] + 1,
            owned_hi[2] - owned_lo[2] + 1};
  }
};

struct SplitNode {
  int axis = -1;             // -1 for leaves
  double split_coord = 0.0;  // physical coordinate of the shared plane
  int lower = -1;            // node index of the child below the plane
  int upper = -1;
  int block_id = -1;         // leaves only

  bool is_leaf() const { return axis < 0; }
};

// Recursive bisection with split axes cycling x, y, z. Block ids encode the
// path from the root, most significant bit first, so siblings at the deepest
// level differ only in bit 0.
class BlockDecomposition {
 public:
  BlockDecomposition(int levels, Index3 grid_dims, Aabb domain, std::vector<Block> blocks,
                     std::vector<SplitNode> nodes);

  int levels() const { return levels_; }
  const Index3& grid_dims() const { return grid_dims_; }
  const Aabb& domain() const { return domain_; }
  const std::vector<Block>& blocks() const { return blocks_; }
  const Block& block(int id) const { return blocks_.at(static_cast<std::size_t>(id)); }
  int block_count() const { return static_cast<int>(blocks_.size()); }
  const std::vector<SplitNode>& nodes() const { return nodes_; }
  int root() const { return 0; }

  /// Blocks per axis, e.g. {2,2,2} for three levels.
  Index3 arrangement() const;

 private:
  int levels_;
  Index3 grid_dims_;
  Aabb domain_;
  std::vector<Block> blocks_;
  std::vector<SplitNode> nodes_;
};

BlockDecomposition partition(Index3 grid_dims, const Aabb& domain, int levels);

inline BlockDecomposition partition(const ScalarGrid3D& grid, int levels) {
  return partition(grid.dims(), grid.bounds(), levels);
}

}  // namespace mfavis
