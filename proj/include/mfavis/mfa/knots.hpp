// Copyright 2026 The mfavis Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <span>
#include <vector>

namespace mfavis {

inline constexpr int kMaxDegree = 7;

// Clamped knot vector on [0,1]: the first and last degree+1 knots are 0 and 1,
// and knots().size() == n_ctrl() + degree() + 1.
class KnotVector {
 public:
  KnotVector(int degree, std::vector<double> knots);

  /// Clamped vector with n_ctrl - degree uniformly spaced spans.
  static KnotVector uniform(int degree, int n_ctrl);

  /// Interpolation knots for n_samples uniformly parameterized samples: each
  /// interior knot is the average of `degree` consecutive sample parameters,
  /// so knots sit on the sample lattice (midpoints for degree 2) and fits of
  /// overlapping sample ranges share knot lines.
  static KnotVector averaged(int degree, int n_samples);

  int degree() const { return degree_; }
  int n_ctrl() const { return static_cast<int>(knots_.size()) - degree_ - 1; }
  const std::vector<double>& knots() const { return knots_; }
  double operator[](int i) const { return knots_[static_cast<std::size_t>(i)]; }

  /// Copy with one extra interior knot at u (must lie strictly inside (0,1)).
  KnotVector inserted(double u) const;

  friend bool operator==(const KnotVector&, const KnotVector&) = default;

 private:
  int degree_;
  std::vector<double> knots_;
};

// Index i with knots[i] <= u < knots[i+1]; u == 1 maps to the last nonempty
// span. Throws DomainError outside [0,1].
int find_span(const KnotVector& kv, double u);

// The degree+1 basis functions that are nonzero on `span`, N_{span-p..span}(u).
void basis_funs(const KnotVector& kv, int span, double u, std::span<double> out);
std::vector<double> basis_funs(const KnotVector& kv, int span, double u);

// Analytic derivatives d^k/du^k of the nonzero basis functions for
// k = 0..order, written row-major as (order+1) x (degree+1). Rows with
// k > degree are zero.
void ders_basis_funs(const KnotVector& kv, int span, double u, int order, std::span<double> out);
std::vector<std::vector<double>> ders_basis_funs(const KnotVector& kv, int span, double u,
                                                 int order);

}  // namespace mfavis
