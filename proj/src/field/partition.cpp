// Copyright 2026 The mfavis Authors
// SPDX-License-Identifier: Apache-2.0

#include "mfavis/field/partition.hpp"

#include <algorithm>
#include <string>

#include "mfavis/error.hpp"

namespace mfavis {

namespace {

// Same arithmetic as ScalarGrid3D::coordinate so shared planes agree bitwise.
double lattice_coordinate(const Aabb& domain, const Index3& dims, int axis, int index) {
  return domain.lo[axis] + index * ((domain.hi[axis] - domain.lo[axis]) / (dims[axis] - 1));
}

struct Builder {
  Index3 dims;
  Aabb domain;
  int levels;
  std::vector<Block> blocks;
  std::vector<SplitNode> nodes;

  int build(Index3 owned_lo, Index3 owned_hi, int depth, int prefix) {
    const int node_index = static_cast<int>(nodes.size());
    nodes.emplace_back();
    if (depth == levels) {
      Block b;
      b.id = prefix;
      b.owned_lo = owned_lo;
      b.owned_hi = owned_hi;
      b.index_lo = owned_lo;
      for (int a = 0; a < 3; ++a) {
        b.index_hi[a] = std::min(owned_hi[a] + 1, dims[a] - 1);
        if (b.index_hi[a] - b.index_lo[a] < 1) {
          throw PartitionError("partition into " + std::to_string(1 << levels) +
                               " blocks leaves block " + std::to_string(prefix) +
                               " with fewer than 2 samples on axis " + std::to_string(a));
        }
        b.bounds.lo[a] = lattice_coordinate(domain, dims, a, b.index_lo[a]);
        b.bounds.hi[a] = lattice_coordinate(domain, dims, a, b.index_hi[a]);
      }
      blocks[static_cast<std::size_t>(prefix)] = b;
      nodes[static_cast<std::size_t>(node_index)].block_id = prefix;
      return node_index;
    }

    const int axis = depth % 3;
    const int count = owned_hi[axis] - owned_lo[axis] + 1;
    if (count < 2) {
      throw PartitionError("cannot split " + std::to_string(count) + " sample(s) on axis " +
                           std::to_string(axis) + " at level " + std::to_string(depth));
    }
    const int mid = owned_lo[axis] + (count + 1) / 2;

    Index3 lower_hi = owned_hi;
    lower_hi[axis] = mid - 1;
    Index3 upper_lo = owned_lo;
    upper_lo[axis] = mid;

    const int lower = build(owned_lo, lower_hi, depth + 1, prefix * 2);
    const int upper = build(upper_lo, owned_hi, depth + 1, prefix * 2 + 1);

    SplitNode& node = nodes[static_cast<std::size_t>(node_index)];
    node.axis = axis;
    node.split_coord = lattice_coordinate(domain, dims, axis, mid);
    node.lower = lower;
    node.upper = upper;
    return node_index;
  }
};

}  // namespace

BlockDecomposition::BlockDecomposition(int levels, Index3 grid_dims, Aabb domain,
                                       std::vector<Block> blocks, std::vector<SplitNode> nodes)
    : levels_(levels),
      grid_dims_(grid_dims),
      domain_(domain),
      blocks_(std::move(blocks)),
      nodes_(std::move(nodes)) {}

Index3 BlockDecomposition::arrangement() const {
  Index3 n{1, 1, 1};
  for (int level = 0; level < levels_; ++level) n[level % 3] *= 2;
  return n;
}

BlockDecomposition partition(Index3 grid_dims, const Aabb& domain, int levels) {
  if (levels < 0 || levels > 30) {
    throw PartitionError("partition levels must be in [0, 30], got " + std::to_string(levels));
  }
  for (int a = 0; a < 3; ++a) {
    if (grid_dims[a] < 2) throw PartitionError("grid dims must be >= 2 per axis");
  }
  if ((std::size_t{1} << levels) > product(grid_dims)) {
    throw PartitionError(std::to_string(levels) + " levels is too many for the grid");
  }
  Builder builder{grid_dims, domain, levels, {}, {}};
  builder.blocks.resize(std::size_t{1} << levels);
  builder.build({0, 0, 0}, {grid_dims[0] - 1, grid_dims[1] - 1, grid_dims[2] - 1}, 0, 0);
  return BlockDecomposition(levels, grid_dims, domain, std::move(builder.blocks),
                            std::move(builder.nodes));
}

}  // namespace mfavis
