// Copyright 2026 The mfavis Authors
// SPDX-License-Identifier: Apache-2.0

#include "mfavis/composite/visibility.hpp"

namespace mfavis {

std::vector<int> visibility_order(const BlockDecomposition& decomp, Vec3 eye) {
  std::vector<int> order;
  order.reserve(static_cast<std::size_t>(decomp.block_count()));
  std::vector<int> stack{decomp.root()};
  const auto& nodes = decomp.nodes();
  while (!stack.empty()) {
    const SplitNode& n = nodes[static_cast<std::size_t>(stack.back())];
    stack.pop_back();
    if (n.is_leaf()) {
      order.push_back(n.block_id);
      continue;
    }
    const bool upper_first = eye[n.axis] >= n.split_coord;
    // pushed in reverse: the far child waits underneath
    stack.push_back(upper_first ? n.lower : n.upper);
    stack.push_back(upper_first ? n.upper : n.lower);
  }
  return order;
}

std::vector<int> visibility_ranks(const std::vector<int>& order) {
  std::vector<int> rank(order.size());
  for (std::size_t i = 0; i < order.size(); ++i) rank[static_cast<std::size_t>(order[i])] = static_cast<int>(i);
  return rank;
}

}  // namespace mfavis
