// Copyright 2026 The mfavis Authors
// SPDX-License-Identifier: Apache-2.0

#include "mfavis/field/grid.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "mfavis/error.hpp"

namespace mfavis {

ScalarGrid3D::ScalarGrid3D(Index3 dims, Vec3 domain_min, Vec3 domain_max,
                           std::vector<double> values)
    : dims_(dims), domain_min_(domain_min), domain_max_(domain_max), values_(std::move(values)) {
  for (int a = 0; a < 3; ++a) {
    if (dims_[a] < 2) {
      throw ParameterError("grid dims must be >= 2 on every axis");
    }
    if (!(domain_max_[a] > domain_min_[a])) {
      throw ParameterError("grid domain_max must exceed domain_min on every axis");
    }
  }
  if (values_.size() != product(dims_)) {
    throw ParameterError("grid has " + std::to_string(values_.size()) +
                         " values, expected " + std::to_string(product(dims_)));
  }
  auto [lo, hi] = std::minmax_element(values_.begin(), values_.end());
  value_min_ = *lo;
  value_max_ = *hi;
}

ScalarGrid3D ScalarGrid3D::subgrid(Index3 lo, Index3 hi) const {
  Index3 n{};
  for (int a = 0; a < 3; ++a) {
    if (lo[a] < 0 || hi[a] >= dims_[a] || hi[a] - lo[a] < 1) {
      throw ParameterError("subgrid index range out of bounds");
    }
    n[a] = hi[a] - lo[a] + 1;
  }
  std::vector<double> out;
  out.reserve(product(n));
  for (int k = lo[2]; k <= hi[2]; ++k) {
    for (int j = lo[1]; j <= hi[1]; ++j) {
      const double* row = values_.data() + linear_index(lo[0], j, k);
      out.insert(out.end(), row, row + n[0]);
    }
  }
  return ScalarGrid3D(n, position(lo[0], lo[1], lo[2]), position(hi[0], hi[1], hi[2]),
                      std::move(out));
}

ScalarGrid3D downsample(const ScalarGrid3D& grid, int factor) {
  if (factor < 1) {
    throw ParameterError("downsample factor must be >= 1");
  }
  const Index3& d = grid.dims();
  Index3 n{};
  for (int a = 0; a < 3; ++a) {
    if ((d[a] - 1) % factor != 0) {
      throw ParameterError("downsample factor " + std::to_string(factor) +
                           " does not divide dims-1 on axis " + std::to_string(a));
    }
    n[a] = (d[a] - 1) / factor + 1;
  }
  std::vector<double> out;
  out.reserve(product(n));
  for (int k = 0; k < n[2]; ++k) {
    for (int j = 0; j < n[1]; ++j) {
      for (int i = 0; i < n[0]; ++i) {
        out.push_back(grid.at(i * factor, j * factor, k * factor));
      }
    }
  }
  return ScalarGrid3D(n, grid.domain_min(), grid.domain_max(), std::move(out));
}

}  // namespace mfavis
