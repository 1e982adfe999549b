// Copyright 2026 The mfavis Authors
// SPDX-License-Identifier: Apache-2.0

#include "mfavis/render/source.hpp"

namespace mfavis {

double source_value(const RenderSource& src, Vec3 p) {
  return std::visit([p](const auto& s) { return eval_value(s, p); }, src);
}

ValueGradient source_value_gradient(const RenderSource& src, Vec3 p) {
  return std::visit([p](const auto& s) { return eval_value_gradient(s, p); }, src);
}

}  // namespace mfavis
