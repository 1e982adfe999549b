// Copyright 2026 The mfavis Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <optional>
#include <string_view>

#include "mfavis/field/grid.hpp"
#include "mfavis/vec3.hpp"

namespace mfavis {

// Separable reconstruction kernels over the sample lattice. Taps that fall
// outside the grid clamp to the edge sample.
//   nearest      box, 0th order
//   trilinear    tent
//   tricubic     cubic B-spline (approximating, smooths the data)
//   catmull_rom  Keys cubic with a = -0.5 (interpolating)
enum class Filter { nearest, trilinear, tricubic, catmull_rom };

std::string_view to_string(Filter filter);
std::optional<Filter> parse_filter(std::string_view name);

double sample_baseline(const ScalarGrid3D& grid, Vec3 p, Filter filter);

// Central differences of sample_baseline with h = spacing / 2 per axis,
// one-sided where the stencil would leave the domain.
Vec3 gradient_baseline(const ScalarGrid3D& grid, Vec3 p, Filter filter);

}  // namespace mfavis
