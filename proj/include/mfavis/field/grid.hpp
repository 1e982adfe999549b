// Copyright 2026 The mfavis Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "mfavis/vec3.hpp"

namespace mfavis {

// Regular scalar field sampled on a Cartesian lattice. Sample (i,j,k) sits at
// domain_min + (i,j,k) * spacing; values are stored x-fastest.
class ScalarGrid3D {
 public:
  ScalarGrid3D(Index3 dims, Vec3 domain_min, Vec3 domain_max, std::vector<double> values);

  const Index3& dims() const { return dims_; }
  const Vec3& domain_min() const { return domain_min_; }
  const Vec3& domain_max() const { return domain_max_; }
  Aabb bounds() const { return {domain_min_, domain_max_}; }
  double value_min() const { return value_min_; }
  double value_max() const { return value_max_; }
  double value_range() const { return value_max_ - value_min_; }

  std::span<const double> values() const { return values_; }
  std::size_t size() const { return values_.size(); }

  std::size_t linear_index(int i, int j, int k) const {
    return static_cast<std::size_t>(i) +
           static_cast<std::size_t>(dims_[0]) *
               (static_cast<std::size_t>(j) + static_cast<std::size_t>(dims_[1]) * k);
  }
  double at(int i, int j, int k) const { return values_[linear_index(i, j, k)]; }

  double spacing(int axis) const {
    return (domain_max_[axis] - domain_min_[axis]) / (dims_[axis] - 1);
  }
  double coordinate(int axis, int index) const {
    return domain_min_[axis] + index * spacing(axis);
  }
  Vec3 position(int i, int j, int k) const {
    return {coordinate(0, i), coordinate(1, j), coordinate(2, k)};
  }

  /// Copies the inclusive sample-index box [lo, hi] into a new grid whose
  /// domain is the physical extent of that box.
  ScalarGrid3D subgrid(Index3 lo, Index3 hi) const;

 private:
  Index3 dims_;
  Vec3 domain_min_;
  Vec3 domain_max_;
  std::vector<double> values_;
  double value_min_ = 0.0;
  double value_max_ = 0.0;
};

/// Stride sampling keeping the first and last sample on every axis.
ScalarGrid3D downsample(const ScalarGrid3D& grid, int factor);

}  // namespace mfavis
