// Copyright 2026 The mfavis Authors
// SPDX-License-Identifier: Apache-2.0

#include "mfavis/field/filters.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <string>

#include "mfavis/error.hpp"

namespace mfavis {

namespace {

struct Taps {
  std::array<int, 4> index{};
  std::array<double, 4> weight{};
  int count = 0;
};

Taps kernel_taps(Filter filter, double g, int n) {
  Taps taps;
  auto clamp_index = [n](int i) { return std::clamp(i, 0, n - 1); };
  switch (filter) {
    case Filter::nearest: {
      taps.count = 1;
      taps.index[0] = clamp_index(static_cast<int>(std::floor(g + 0.5)));
      taps.weight[0] = 1.0;
      break;
    }
    case Filter::trilinear: {
      const int i0 = std::clamp(static_cast<int>(std::floor(g)), 0, n - 2);
      const double t = g - i0;
      taps.count = 2;
      taps.index = {i0, i0 + 1, 0, 0};
      taps.weight = {1.0 - t, t, 0.0, 0.0};
      break;
    }
    case Filter::tricubic:
    case Filter::catmull_rom: {
      const int i0 = static_cast<int>(std::floor(g));
      const double t = g - i0;
      const double t2 = t * t;
      const double t3 = t2 * t;
      taps.count = 4;
      for (int m = 0; m < 4; ++m) taps.index[m] = clamp_index(i0 - 1 + m);
      if (filter == Filter::tricubic) {
        const double u = 1.0 - t;
        taps.weight = {u * u * u / 6.0, (3.0 * t3 - 6.0 * t2 + 4.0) / 6.0,
                       (-3.0 * t3 + 3.0 * t2 + 3.0 * t + 1.0) / 6.0, t3 / 6.0};
      } else {
        taps.weight = {0.5 * (-t3 + 2.0 * t2 - t), 0.5 * (3.0 * t3 - 5.0 * t2 + 2.0),
                       0.5 * (-3.0 * t3 + 4.0 * t2 + t), 0.5 * (t3 - t2)};
      }
      break;
    }
  }
  return taps;
}

// Continuous lattice coordinate of p; tolerates rounding just outside the box.
Vec3 lattice_coordinates(const ScalarGrid3D& grid, Vec3 p) {
  Vec3 g;
  for (int a = 0; a < 3; ++a) {
    const double lo = grid.domain_min()[a];
    const double hi = grid.domain_max()[a];
    const double eps = 1e-9 * (hi - lo);
    if (!(p[a] >= lo - eps && p[a] <= hi + eps)) {
      throw DomainError("sample point outside grid domain on axis " + std::to_string(a));
    }
    g[a] = std::clamp((p[a] - lo) / grid.spacing(a), 0.0, static_cast<double>(grid.dims()[a] - 1));
  }
  return g;
}

}  // namespace

std::string_view to_string(Filter filter) {
  switch (filter) {
    case Filter::nearest: return "nearest";
    case Filter::trilinear: return "trilinear";
    case Filter::tricubic: return "tricubic";
    case Filter::catmull_rom: return "catmull_rom";
  }
  return "unknown";
}

std::optional<Filter> parse_filter(std::string_view name) {
  if (name == "nearest") return Filter::nearest;
  if (name == "trilinear") return Filter::trilinear;
  if (name == "tricubic") return Filter::tricubic;
  if (name == "catmull_rom" || name == "catmull-rom") return Filter::catmull_rom;
  return std::nullopt;
}

double sample_baseline(const ScalarGrid3D& grid, Vec3 p, Filter filter) {
  const Vec3 g = lattice_coordinates(grid, p);
  const Index3& d = grid.dims();
  const Taps tx = kernel_taps(filter, g.x, d[0]);
  const Taps ty = kernel_taps(filter, g.y, d[1]);
  const Taps tz = kernel_taps(filter, g.z, d[2]);

  double sum = 0.0;
  for (int c = 0; c < tz.count; ++c) {
    double plane = 0.0;
    for (int b = 0; b < ty.count; ++b) {
      double line = 0.0;
      for (int a = 0; a < tx.count; ++a) {
        line += tx.weight[a] * grid.at(tx.index[a], ty.index[b], tz.index[c]);
      }
      plane += ty.weight[b] * line;
    }
    sum += tz.weight[c] * plane;
  }
  return sum;
}

Vec3 gradient_baseline(const ScalarGrid3D& grid, Vec3 p, Filter filter) {
  lattice_coordinates(grid, p);
  Vec3 g;
  for (int a = 0; a < 3; ++a) {
    const double h = 0.5 * grid.spacing(a);
    const double lo = grid.domain_min()[a];
    const double hi = grid.domain_max()[a];
    Vec3 fwd = p;
    Vec3 bwd = p;
    fwd[a] = p[a] + h;
    bwd[a] = p[a] - h;
    if (bwd[a] < lo) {
      g[a] = (sample_baseline(grid, fwd, filter) - sample_baseline(grid, p, filter)) / h;
    } else if (fwd[a] > hi) {
      g[a] = (sample_baseline(grid, p, filter) - sample_baseline(grid, bwd, filter)) / h;
    } else {
      g[a] = (sample_baseline(grid, fwd, filter) - sample_baseline(grid, bwd, filter)) / (2.0 * h);
    }
  }
  return g;
}

}  // namespace mfavis
