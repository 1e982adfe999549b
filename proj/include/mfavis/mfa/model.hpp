// Copyright 2026 The mfavis Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <array>
#include <span>
#include <vector>

#include "mfavis/mfa/knots.hpp"
#include "mfavis/vec3.hpp"

namespace mfavis {

// Tensor-product B-spline model of one scalar block. The physical domain maps
// affinely onto the parameter cube [0,1]^3; control points are stored x fastest.
class MfaModel {
 public:
  MfaModel(std::array<KnotVector, 3> knots, std::vector<double> ctrl, Aabb domain,
           Index3 source_dims, double e_max_achieved);

  const KnotVector& knots(int axis) const { return knots_[static_cast<std::size_t>(axis)]; }
  const std::array<KnotVector, 3>& knot_vectors() const { return knots_; }
  Index3 n_ctrl() const { return {knots_[0].n_ctrl(), knots_[1].n_ctrl(), knots_[2].n_ctrl()}; }
  Index3 degree() const { return {knots_[0].degree(), knots_[1].degree(), knots_[2].degree()}; }
  std::span<const double> ctrl() const { return ctrl_; }
  double ctrl_at(int i, int j, int k) const {
    const Index3 n = n_ctrl();
    return ctrl_[static_cast<std::size_t>(i) +
                 static_cast<std::size_t>(n[0]) *
                     (static_cast<std::size_t>(j) + static_cast<std::size_t>(n[1]) * k)];
  }
  const Aabb& domain() const { return domain_; }
  const Index3& source_dims() const { return source_dims_; }
  double e_max_achieved() const { return e_max_achieved_; }

  /// Parameter-space coordinate of a physical point; DomainError if outside.
  Vec3 to_parameter(Vec3 p) const;

  friend bool operator==(const MfaModel&, const MfaModel&) = default;

 private:
  std::array<KnotVector, 3> knots_;
  std::vector<double> ctrl_;
  Aabb domain_;
  Index3 source_dims_;
  double e_max_achieved_;
};

struct ValueGradient {
  double value = 0.0;
  Vec3 gradient;
};

// Local (p+1)^3 tensor sum after span lookup on each axis.
double decode_value(const MfaModel& model, Vec3 p);

// Physical-space gradient: parameter derivative times 1 / domain extent per axis.
Vec3 decode_gradient(const MfaModel& model, Vec3 p);

ValueGradient decode_value_gradient(const MfaModel& model, Vec3 p);

/// Source sample count over control-point count; knots are not counted.
double compression_ratio(const MfaModel& model);

}  // namespace mfavis
