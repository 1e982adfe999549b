// Copyright 2026 The mfavis Authors
// SPDX-License-Identifier: Apache-2.0

#include "mfavis/render/transfer_function.hpp"

#include <algorithm>
#include <cmath>

#include "mfavis/error.hpp"

namespace mfavis {

namespace {

bool unit(double v) { return v >= 0.0 && v <= 1.0; }

Rgba node_rgba(const TfNode& n) { return {n.color.x, n.color.y, n.color.z, n.opacity}; }

Rgba mix(const Rgba& a, const Rgba& b, double t) {
  return {a.r + (b.r - a.r) * t, a.g + (b.g - a.g) * t, a.b + (b.b - a.b) * t,
          a.a + (b.a - a.a) * t};
}

}  // namespace

TransferFunction::TransferFunction(std::vector<TfNode> nodes, double dt_ref)
    : nodes_(std::move(nodes)), dt_ref_(dt_ref) {
  if (nodes_.empty()) throw ParameterError("transfer function needs at least one node");
  if (!(dt_ref_ > 0.0) || !std::isfinite(dt_ref_)) throw ParameterError("dt_ref must be positive");
  for (std::size_t i = 0; i < nodes_.size(); ++i) {
    const TfNode& n = nodes_[i];
    if (!unit(n.value) || !unit(n.color.x) || !unit(n.color.y) || !unit(n.color.z) ||
        !unit(n.opacity)) {
      throw ParameterError("transfer function node " + std::to_string(i) + " outside [0,1]");
    }
    if (i > 0 && n.value < nodes_[i - 1].value) {
      throw ParameterError("transfer function nodes must be sorted by value");
    }
  }

  std::size_t seg = 0;
  for (int i = 0; i < kTableSize; ++i) {
    const double s = static_cast<double>(i) / (kTableSize - 1);
    Rgba out;
    if (s <= nodes_.front().value) {
      out = node_rgba(nodes_.front());
    } else if (s >= nodes_.back().value) {
      out = node_rgba(nodes_.back());
    } else {
      while (!(s >= nodes_[seg].value && s < nodes_[seg + 1].value)) ++seg;
      const TfNode& a = nodes_[seg];
      const TfNode& b = nodes_[seg + 1];
      out = mix(node_rgba(a), node_rgba(b), (s - a.value) / (b.value - a.value));
    }
    table_[static_cast<std::size_t>(i)] = out;
  }
}

Rgba TransferFunction::lookup(double s) const {
  if (!(s > 0.0)) return table_.front();  // also catches NaN
  if (s >= 1.0) return table_.back();
  const double x = s * (kTableSize - 1);
  const int i = static_cast<int>(x);
  return mix(table_[static_cast<std::size_t>(i)], table_[static_cast<std::size_t>(i + 1)], x - i);
}

std::vector<TfPreset> tf_presets() {
  constexpr double dt_ref = 0.01;
  std::vector<TfPreset> out;
  out.push_back({"grayscale", TransferFunction({{0.0, {0, 0, 0}, 0.0}, {1.0, {1, 1, 1}, 0.5}},
                                               dt_ref)});
  out.push_back({"warm", TransferFunction({{0.0, {0.1, 0.0, 0.0}, 0.0},
                                           {0.3, {0.7, 0.1, 0.05}, 0.02},
                                           {0.6, {1.0, 0.55, 0.1}, 0.15},
                                           {1.0, {1.0, 0.95, 0.7}, 0.6}},
                                          dt_ref)});
  out.push_back({"spike", TransferFunction({{0.0, {1.0, 1.0, 1.0}, 0.0},
                                            {0.45, {1.0, 1.0, 1.0}, 0.0},
                                            {0.5, {1.0, 0.85, 0.6}, 0.9},
                                            {0.55, {1.0, 1.0, 1.0}, 0.0},
                                            {1.0, {1.0, 1.0, 1.0}, 0.0}},
                                           dt_ref)});
  return out;
}

TransferFunction tf_preset(std::string_view name) {
  for (auto& p : tf_presets()) {
    if (p.name == name) return p.tf;
  }
  throw ParameterError("unknown transfer function preset '" + std::string(name) + "'");
}

}  // namespace mfavis
