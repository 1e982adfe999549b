// Copyright 2026 The mfavis Authors
// SPDX-License-Identifier: Apache-2.0

#include "mfavis/field/marschner_lobb.hpp"

#include <numbers>
#include <vector>

#include "mfavis/error.hpp"

namespace mfavis {

namespace {
constexpr double kPi = std::numbers::pi;
}

double MarschnerLobb::value(Vec3 p) const {
  const double r = std::sqrt(p.x * p.x + p.y * p.y);
  const double rho = std::cos(2.0 * kPi * f_m * std::cos(kPi * r / 2.0));
  return (1.0 - std::sin(kPi * p.z / 2.0) + alpha * (1.0 + rho)) / (2.0 * (1.0 + alpha));
}

Vec3 MarschnerLobb::gradient(Vec3 p) const {
  const double denom = 2.0 * (1.0 + alpha);
  const double r = std::sqrt(p.x * p.x + p.y * p.y);
  Vec3 g{0.0, 0.0, -(kPi / 2.0) * std::cos(kPi * p.z / 2.0) / denom};
  if (r > 0.0) {
    // d rho / dr = sin(2 pi f_m cos(pi r / 2)) * pi^2 f_m sin(pi r / 2)
    const double drho =
        std::sin(2.0 * kPi * f_m * std::cos(kPi * r / 2.0)) * kPi * kPi * f_m * std::sin(kPi * r / 2.0);
    const double s = alpha * drho / (denom * r);
    g.x = s * p.x;
    g.y = s * p.y;
  }
  return g;
}

ScalarGrid3D generate_marschner_lobb(Index3 dims, const Aabb& domain, double f_m, double alpha) {
  for (int a = 0; a < 3; ++a) {
    if (dims[a] < 2) throw ParameterError("Marschner-Lobb dims must be >= 2 per axis");
    if (!(domain.hi[a] > domain.lo[a])) throw ParameterError("Marschner-Lobb domain is empty");
  }
  if (!(alpha > -1.0)) throw ParameterError("Marschner-Lobb alpha must be > -1");

  const MarschnerLobb ml{f_m, alpha};
  Vec3 step;
  for (int a = 0; a < 3; ++a) step[a] = (domain.hi[a] - domain.lo[a]) / (dims[a] - 1);

  std::vector<double> values;
  values.reserve(product(dims));
  for (int k = 0; k < dims[2]; ++k) {
    for (int j = 0; j < dims[1]; ++j) {
      for (int i = 0; i < dims[0]; ++i) {
        const Vec3 p{domain.lo.x + i * step.x, domain.lo.y + j * step.y, domain.lo.z + k * step.z};
        values.push_back(ml.value(p));
      }
    }
  }
  return ScalarGrid3D(dims, domain.lo, domain.hi, std::move(values));
}

}  // namespace mfavis
