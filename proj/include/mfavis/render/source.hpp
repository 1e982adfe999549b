// Copyright 2026 The mfavis Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <memory>
#include <variant>

#include "mfavis/field/filters.hpp"
#include "mfavis/field/grid.hpp"
#include "mfavis/field/marschner_lobb.hpp"
#include "mfavis/mfa/model.hpp"

namespace mfavis {

// What a ray samples: a block model, a discrete grid through a baseline
// filter, or the analytic test field itself (reference images).
struct MfaSource {
  std::shared_ptr<const MfaModel> model;
};

struct GridSource {
  std::shared_ptr<const ScalarGrid3D> grid;
  Filter filter = Filter::trilinear;
};

struct AnalyticSource {
  MarschnerLobb field;
};

using RenderSource = std::variant<MfaSource, GridSource, AnalyticSource>;

inline double eval_value(const MfaSource& s, Vec3 p) { return decode_value(*s.model, p); }
inline double eval_value(const GridSource& s, Vec3 p) {
  return sample_baseline(*s.grid, p, s.filter);
}
inline double eval_value(const AnalyticSource& s, Vec3 p) { return s.field.value(p); }

inline ValueGradient eval_value_gradient(const MfaSource& s, Vec3 p) {
  return decode_value_gradient(*s.model, p);
}
inline ValueGradient eval_value_gradient(const GridSource& s, Vec3 p) {
  return {sample_baseline(*s.grid, p, s.filter), gradient_baseline(*s.grid, p, s.filter)};
}
inline ValueGradient eval_value_gradient(const AnalyticSource& s, Vec3 p) {
  return {s.field.value(p), s.field.gradient(p)};
}

double source_value(const RenderSource& src, Vec3 p);
ValueGradient source_value_gradient(const RenderSource& src, Vec3 p);

}  // namespace mfavis
