// Copyright 2026 The mfavis Authors
// SPDX-License-Identifier: Apache-2.0

#include "mfavis/mfa/knots.hpp"

#include <algorithm>
#include <array>
#include <string>

#include "mfavis/error.hpp"

namespace mfavis {

KnotVector::KnotVector(int degree, std::vector<double> knots)
    : degree_(degree), knots_(std::move(knots)) {
  if (degree_ < 1 || degree_ > kMaxDegree) {
    throw ParameterError("spline degree must be in [1, " + std::to_string(kMaxDegree) + "]");
  }
  const int n = static_cast<int>(knots_.size());
  if (n < 2 * (degree_ + 1)) {
    throw ParameterError("knot vector too short for degree " + std::to_string(degree_));
  }
  for (int i = 0; i <= degree_; ++i) {
    if (knots_[static_cast<std::size_t>(i)] != 0.0 ||
        knots_[static_cast<std::size_t>(n - 1 - i)] != 1.0) {
      throw ParameterError("knot vector is not clamped to [0,1]");
    }
  }
  for (int i = degree_ + 1; i < n - degree_ - 1; ++i) {
    const double u = knots_[static_cast<std::size_t>(i)];
    if (!(u > 0.0 && u < 1.0)) throw ParameterError("interior knots must lie strictly in (0,1)");
  }
  if (!std::is_sorted(knots_.begin(), knots_.end())) {
    throw ParameterError("knot vector is not nondecreasing");
  }
}

KnotVector KnotVector::uniform(int degree, int n_ctrl) {
  if (n_ctrl < degree + 1) {
    throw ParameterError("need at least degree+1 control points, got " + std::to_string(n_ctrl));
  }
  const int spans = n_ctrl - degree;
  std::vector<double> knots(static_cast<std::size_t>(n_ctrl + degree + 1), 0.0);
  for (int i = 1; i < spans; ++i) {
    knots[static_cast<std::size_t>(degree + i)] = static_cast<double>(i) / spans;
  }
  std::fill(knots.end() - degree - 1, knots.end(), 1.0);
  return KnotVector(degree, std::move(knots));
}

KnotVector KnotVector::averaged(int degree, int n_samples) {
  if (n_samples < degree + 1) {
    throw ParameterError("need at least degree+1 samples, got " + std::to_string(n_samples));
  }
  std::vector<double> knots(static_cast<std::size_t>(n_samples + degree + 1), 0.0);
  const double step = 1.0 / (n_samples - 1);
  for (int j = 1; j < n_samples - degree; ++j) {
    double sum = 0.0;
    for (int i = j; i < j + degree; ++i) sum += i * step;
    knots[static_cast<std::size_t>(j + degree)] = sum / degree;
  }
  std::fill(knots.end() - degree - 1, knots.end(), 1.0);
  return KnotVector(degree, std::move(knots));
}

KnotVector KnotVector::inserted(double u) const {
  if (!(u > 0.0 && u < 1.0)) throw ParameterError("inserted knot must lie strictly in (0,1)");
  std::vector<double> k = knots_;
  k.insert(std::upper_bound(k.begin(), k.end(), u), u);
  return KnotVector(degree_, std::move(k));
}

int find_span(const KnotVector& kv, double u) {
  if (!(u >= 0.0 && u <= 1.0)) {
    throw DomainError("parameter " + std::to_string(u) + " outside [0,1]");
  }
  const int n = kv.n_ctrl() - 1;
  const int p = kv.degree();
  if (u >= kv[n + 1]) return n;
  // First knot strictly greater than u, searched among knots p+1..n+1.
  const auto& k = kv.knots();
  const auto it = std::upper_bound(k.begin() + p + 1, k.begin() + n + 1, u);
  return static_cast<int>(it - k.begin()) - 1;
}

void basis_funs(const KnotVector& kv, int span, double u, std::span<double> out) {
  const int p = kv.degree();
  std::array<double, kMaxDegree + 1> left{};
  std::array<double, kMaxDegree + 1> right{};
  out[0] = 1.0;
  for (int j = 1; j <= p; ++j) {
    left[j] = u - kv[span + 1 - j];
    right[j] = kv[span + j] - u;
    double saved = 0.0;
    for (int r = 0; r < j; ++r) {
      const double temp = out[r] / (right[r + 1] + left[j - r]);
      out[r] = saved + right[r + 1] * temp;
      saved = left[j - r] * temp;
    }
    out[j] = saved;
  }
}

std::vector<double> basis_funs(const KnotVector& kv, int span, double u) {
  std::vector<double> out(static_cast<std::size_t>(kv.degree() + 1));
  basis_funs(kv, span, u, out);
  return out;
}

void ders_basis_funs(const KnotVector& kv, int span, double u, int order, std::span<double> out) {
  constexpr int kN = kMaxDegree + 1;
  const int p = kv.degree();
  const int width = p + 1;
  std::fill(out.begin(), out.begin() + (order + 1) * width, 0.0);

  // ndu: basis values (upper triangle incl. diagonal) and knot differences (lower).
  double ndu[kN][kN];
  std::array<double, kN> left{};
  std::array<double, kN> right{};
  ndu[0][0] = 1.0;
  for (int j = 1; j <= p; ++j) {
    left[j] = u - kv[span + 1 - j];
    right[j] = kv[span + j] - u;
    double saved = 0.0;
    for (int r = 0; r < j; ++r) {
      ndu[j][r] = right[r + 1] + left[j - r];
      const double temp = ndu[r][j - 1] / ndu[j][r];
      ndu[r][j] = saved + right[r + 1] * temp;
      saved = left[j - r] * temp;
    }
    ndu[j][j] = saved;
  }
  for (int j = 0; j <= p; ++j) out[j] = ndu[j][p];

  const int top = std::min(order, p);
  double a[2][kN];
  for (int r = 0; r <= p; ++r) {
    int s1 = 0;
    int s2 = 1;
    a[0][0] = 1.0;
    for (int k = 1; k <= top; ++k) {
      double d = 0.0;
      const int rk = r - k;
      const int pk = p - k;
      if (r >= k) {
        a[s2][0] = a[s1][0] / ndu[pk + 1][rk];
        d = a[s2][0] * ndu[rk][pk];
      }
      const int j1 = rk >= -1 ? 1 : -rk;
      const int j2 = (r - 1 <= pk) ? k - 1 : p - r;
      for (int j = j1; j <= j2; ++j) {
        a[s2][j] = (a[s1][j] - a[s1][j - 1]) / ndu[pk + 1][rk + j];
        d += a[s2][j] * ndu[rk + j][pk];
      }
      if (r <= pk) {
        a[s2][k] = -a[s1][k - 1] / ndu[pk + 1][r];
        d += a[s2][k] * ndu[r][pk];
      }
      out[k * width + r] = d;
      std::swap(s1, s2);
    }
  }
  double factor = p;
  for (int k = 1; k <= top; ++k) {
    for (int j = 0; j <= p; ++j) out[k * width + j] *= factor;
    factor *= (p - k);
  }
}

std::vector<std::vector<double>> ders_basis_funs(const KnotVector& kv, int span, double u,
                                                 int order) {
  const int width = kv.degree() + 1;
  std::vector<double> flat(static_cast<std::size_t>((order + 1) * width));
  ders_basis_funs(kv, span, u, order, flat);
  std::vector<std::vector<double>> rows;
  for (int k = 0; k <= order; ++k) {
    rows.emplace_back(flat.begin() + k * width, flat.begin() + (k + 1) * width);
  }
  return rows;
}

}  // namespace mfavis
