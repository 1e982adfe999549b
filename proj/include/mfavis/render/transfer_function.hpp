// Copyright 2026 The mfavis Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <array>
#include <string>
#include <string_view>
#include <vector>

#include "mfavis/vec3.hpp"

namespace mfavis {

struct Rgba {
  double r = 0.0;
  double g = 0.0;
  double b = 0.0;
  double a = 0.0;
  friend bool operator==(const Rgba&, const Rgba&) = default;
};

struct TfNode {
  double value = 0.0;  // normalized scalar in [0,1]
  Vec3 color;
  double opacity = 0.0;
  friend bool operator==(const TfNode&, const TfNode&) = default;
};

// Editable node list plus the 256-entry table built from it by piecewise
// linear interpolation (held constant beyond the first and last node).
// Opacities are defined per dt_ref of ray travel.
class TransferFunction {
 public:
  static constexpr int kTableSize = 256;

  TransferFunction(std::vector<TfNode> nodes, double dt_ref);

  const std::vector<TfNode>& nodes() const { return nodes_; }
  double dt_ref() const { return dt_ref_; }
  const std::array<Rgba, kTableSize>& table() const { return table_; }

  /// Linear interpolation between table entries; s is clamped to [0,1].
  Rgba lookup(double s) const;

  friend bool operator==(const TransferFunction& a, const TransferFunction& b) {
    return a.nodes_ == b.nodes_ && a.dt_ref_ == b.dt_ref_;
  }

 private:
  std::vector<TfNode> nodes_;
  double dt_ref_;
  std::array<Rgba, kTableSize> table_{};
};

struct TfPreset {
  std::string name;
  TransferFunction tf;
};

// grayscale, warm, spike
std::vector<TfPreset> tf_presets();
TransferFunction tf_preset(std::string_view name);  // ParameterError if unknown

}  // namespace mfavis
