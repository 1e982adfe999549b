// Copyright 2026 The mfavis Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include "mfavis/field/grid.hpp"
#include "mfavis/vec3.hpp"

namespace mfavis {

// Marschner-Lobb test signal: a slow sinusoid along z plus a radial ripple
// in the xy-plane whose frequency is controlled by f_m.
struct MarschnerLobb {
  double f_m = 6.0;
  double alpha = 0.25;

  double value(Vec3 p) const;
  Vec3 gradient(Vec3 p) const;
};

inline constexpr Aabb kMarschnerLobbDomain{{0.0, 0.0, 0.0}, {7.0, 7.0, 7.0}};

ScalarGrid3D generate_marschner_lobb(Index3 dims, const Aabb& domain = kMarschnerLobbDomain,
                                     double f_m = 6.0, double alpha = 0.25);

}  // namespace mfavis
