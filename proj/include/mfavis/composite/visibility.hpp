// Copyright 2026 The mfavis Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <vector>

#include "mfavis/field/partition.hpp"
#include "mfavis/vec3.hpp"

namespace mfavis {

// Front-to-back block order for a viewpoint, from the bisection tree: at each
// split the child on the eye's side of the plane comes first (an eye exactly
// on the plane counts as the upper side).
std::vector<int> visibility_order(const BlockDecomposition& decomp, Vec3 eye);

/// rank[block_id] = position of the block in `order`.
std::vector<int> visibility_ranks(const std::vector<int>& order);

}  // namespace mfavis
