// Copyright 2026 The mfavis Authors
// SPDX-License-Identifier: Apache-2.0

#include "mfavis/mfa/model.hpp"

#include <algorithm>
#include <string>

#include "mfavis/error.hpp"

namespace mfavis {

MfaModel::MfaModel(std::array<KnotVector, 3> knots, std::vector<double> ctrl, Aabb domain,
                   Index3 source_dims, double e_max_achieved)
    : knots_(std::move(knots)),
      ctrl_(std::move(ctrl)),
      domain_(domain),
      source_dims_(source_dims),
      e_max_achieved_(e_max_achieved) {
  if (ctrl_.size() != product(n_ctrl())) {
    throw ParameterError("control point count " + std::to_string(ctrl_.size()) +
                         " does not match knot vectors (" + std::to_string(product(n_ctrl())) +
                         ")");
  }
  for (int a = 0; a < 3; ++a) {
    if (!(domain_.hi[a] > domain_.lo[a])) throw ParameterError("model domain is empty");
  }
}

Vec3 MfaModel::to_parameter(Vec3 p) const {
  Vec3 u;
  for (int a = 0; a < 3; ++a) {
    const double lo = domain_.lo[a];
    const double extent = domain_.hi[a] - lo;
    const double t = (p[a] - lo) / extent;
    if (!(t >= -1e-9 && t <= 1.0 + 1e-9)) {
      throw DomainError("query point outside model domain on axis " + std::to_string(a));
    }
    u[a] = std::clamp(t, 0.0, 1.0);
  }
  return u;
}

namespace {

struct AxisBasis {
  int first = 0;  // index of the first nonzero basis function
  std::array<double, kMaxDegree + 1> n{};
  std::array<double, kMaxDegree + 1> dn{};
};

template <bool WithDerivative>
AxisBasis axis_basis(const KnotVector& kv, double u) {
  AxisBasis b;
  const int span = find_span(kv, u);
  const int p = kv.degree();
  b.first = span - p;
  if constexpr (WithDerivative) {
    std::array<double, 2 * (kMaxDegree + 1)> d{};
    ders_basis_funs(kv, span, u, 1, d);
    std::copy_n(d.begin(), p + 1, b.n.begin());
    std::copy_n(d.begin() + p + 1, p + 1, b.dn.begin());
  } else {
    basis_funs(kv, span, u, b.n);
  }
  return b;
}

}  // namespace

double decode_value(const MfaModel& model, Vec3 p) {
  const Vec3 u = model.to_parameter(p);
  const AxisBasis bx = axis_basis<false>(model.knots(0), u.x);
  const AxisBasis by = axis_basis<false>(model.knots(1), u.y);
  const AxisBasis bz = axis_basis<false>(model.knots(2), u.z);
  const Index3 deg = model.degree();
  const Index3 n = model.n_ctrl();
  const auto ctrl = model.ctrl();
  const std::size_t sx = static_cast<std::size_t>(n[0]);
  const std::size_t sy = sx * static_cast<std::size_t>(n[1]);

  double sum = 0.0;
  for (int c = 0; c <= deg[2]; ++c) {
    double plane = 0.0;
    for (int b = 0; b <= deg[1]; ++b) {
      const double* row = ctrl.data() + static_cast<std::size_t>(bx.first) +
                          sx * static_cast<std::size_t>(by.first + b) +
                          sy * static_cast<std::size_t>(bz.first + c);
      double line = 0.0;
      for (int a = 0; a <= deg[0]; ++a) line += bx.n[a] * row[a];
      plane += by.n[b] * line;
    }
    sum += bz.n[c] * plane;
  }
  return sum;
}

ValueGradient decode_value_gradient(const MfaModel& model, Vec3 p) {
  const Vec3 u = model.to_parameter(p);
  const AxisBasis bx = axis_basis<true>(model.knots(0), u.x);
  const AxisBasis by = axis_basis<true>(model.knots(1), u.y);
  const AxisBasis bz = axis_basis<true>(model.knots(2), u.z);
  const Index3 deg = model.degree();
  const Index3 n = model.n_ctrl();
  const auto ctrl = model.ctrl();
  const std::size_t sx = static_cast<std::size_t>(n[0]);
  const std::size_t sy = sx * static_cast<std::size_t>(n[1]);

  double v = 0.0, gx = 0.0, gy = 0.0, gz = 0.0;
  for (int c = 0; c <= deg[2]; ++c) {
    double pv = 0.0, pdx = 0.0, pdy = 0.0;
    for (int b = 0; b <= deg[1]; ++b) {
      const double* row = ctrl.data() + static_cast<std::size_t>(bx.first) +
                          sx * static_cast<std::size_t>(by.first + b) +
                          sy * static_cast<std::size_t>(bz.first + c);
      double line = 0.0, dline = 0.0;
      for (int a = 0; a <= deg[0]; ++a) {
        line += bx.n[a] * row[a];
        dline += bx.dn[a] * row[a];
      }
      pv += by.n[b] * line;
      pdx += by.n[b] * dline;
      pdy += by.dn[b] * line;
    }
    v += bz.n[c] * pv;
    gx += bz.n[c] * pdx;
    gy += bz.n[c] * pdy;
    gz += bz.dn[c] * pv;
  }
  const Vec3 ext = model.domain().extent();
  return {v, {gx / ext.x, gy / ext.y, gz / ext.z}};
}

Vec3 decode_gradient(const MfaModel& model, Vec3 p) {
  return decode_value_gradient(model, p).gradient;
}

double compression_ratio(const MfaModel& model) {
  return static_cast<double>(product(model.source_dims())) /
         static_cast<double>(product(model.n_ctrl()));
}

}  // namespace mfavis
