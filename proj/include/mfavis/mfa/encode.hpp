// Copyright 2026 The mfavis Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <array>
#include <optional>
#include <vector>

#include "mfavis/field/grid.hpp"
#include "mfavis/mfa/model.hpp"

namespace mfavis {

struct EncodeConfig {
  int degree = 2;
  // Fixed mode: control points per axis.
  std::optional<Index3> ctrl_pts;
  // Adaptive mode: refine until every sample is within e_max relative error
  // or the per-axis cap is reached (cap defaults to the block's sample counts).
  bool adaptive = false;
  double e_max = 1e-3;
  std::optional<Index3> ctrl_cap;
  // Sample count credited to the model for compression accounting; defaults
  // to the block's dims.
  std::optional<Index3> source_dims;

  void validate() const;
};

struct RefinementRound {
  Index3 n_ctrl{};
  double max_rel_error = 0.0;
  double sum_sq_error = 0.0;
};

struct EncodeResult {
  MfaModel model;
  bool capped = false;  // adaptive tolerance not met within the cap
  std::vector<RefinementRound> rounds;
};

// Least-squares fit of the block with the given knot vectors. Uniform
// parameterization, solved axis by axis through banded normal equations.
MfaModel fit_block(const ScalarGrid3D& block, const std::array<KnotVector, 3>& knots,
                   Index3 source_dims);

// Uniform interior knots, except on axes where ctrl_pts equals the sample
// count: those interpolate with averaged knots (KnotVector::averaged).
MfaModel encode_fixed(const ScalarGrid3D& block, const EncodeConfig& cfg);
EncodeResult encode_adaptive(const ScalarGrid3D& block, const EncodeConfig& cfg);

/// Dispatches on cfg.adaptive.
EncodeResult encode(const ScalarGrid3D& block, const EncodeConfig& cfg);

// Model values at the uniform parameters i / (dims-1) of a lattice, x fastest.
std::vector<double> evaluate_on_lattice(const MfaModel& model, Index3 dims);

// max |model - data| / value_range over the block's samples (absolute error
// when the block is constant).
double max_relative_error(const MfaModel& model, const ScalarGrid3D& block);

// True when the collocation matrix of uniform parameters i/(n_samples-1)
// against kv has full column rank (Schoenberg-Whitney condition).
bool collocation_full_rank(const KnotVector& kv, int n_samples);

}  // namespace mfavis
