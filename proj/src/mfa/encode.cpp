// Copyright 2026 The mfavis Authors
// SPDX-License-Identifier: Apache-2.0

#include "mfavis/mfa/encode.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "mfavis/error.hpp"

namespace mfavis {

namespace {

// Sparse rows of the collocation matrix for uniform parameters on one axis:
// row s holds degree+1 basis values starting at column first[s].
struct Collocation {
  int n_samples = 0;
  int n_ctrl = 0;
  int width = 0;
  std::vector<int> first;
  std::vector<double> values;

  Collocation(const KnotVector& kv, int samples)
      : n_samples(samples), n_ctrl(kv.n_ctrl()), width(kv.degree() + 1) {
    first.resize(static_cast<std::size_t>(samples));
    values.resize(static_cast<std::size_t>(samples * width));
    for (int s = 0; s < samples; ++s) {
      const double u = static_cast<double>(s) / (samples - 1);
      const int span = find_span(kv, u);
      first[static_cast<std::size_t>(s)] = span - kv.degree();
      basis_funs(kv, span, u, std::span<double>(values.data() + s * width, width));
    }
  }

  const double* row(int s) const { return values.data() + s * width; }
};

// Cholesky factor of the banded SPD matrix N^T N (half bandwidth degree).
class BandedCholesky {
 public:
  explicit BandedCholesky(const Collocation& c) : n_(c.n_ctrl), bw_(c.width - 1) {
    // band_[i * (bw+1) + d] = M[i][i-d]
    band_.assign(static_cast<std::size_t>(n_ * (bw_ + 1)), 0.0);
    for (int s = 0; s < c.n_samples; ++s) {
      const double* r = c.row(s);
      const int f = c.first[static_cast<std::size_t>(s)];
      for (int a = 0; a < c.width; ++a) {
        for (int b = 0; b <= a; ++b) at(f + a, a - b) += r[a] * r[b];
      }
    }
    for (int j = 0; j < n_; ++j) {
      double diag = at(j, 0);
      for (int k = std::max(0, j - bw_); k < j; ++k) diag -= at(j, j - k) * at(j, j - k);
      if (!(diag > 0.0)) {
        throw NumericError("normal equations are singular at control point " + std::to_string(j));
      }
      at(j, 0) = std::sqrt(diag);
      for (int i = j + 1; i <= std::min(n_ - 1, j + bw_); ++i) {
        double v = at(i, i - j);
        for (int k = std::max(0, i - bw_); k < j; ++k) v -= at(i, i - k) * at(j, j - k);
        at(i, i - j) = v / at(j, 0);
      }
    }
  }

  void solve(std::span<double> x) const {
    for (int i = 0; i < n_; ++i) {
      double v = x[i];
      for (int k = std::max(0, i - bw_); k < i; ++k) v -= at(i, i - k) * x[k];
      x[i] = v / at(i, 0);
    }
    for (int i = n_ - 1; i >= 0; --i) {
      double v = x[i];
      for (int k = i + 1; k <= std::min(n_ - 1, i + bw_); ++k) v -= at(k, k - i) * x[k];
      x[i] = v / at(i, 0);
    }
  }

 private:
  double& at(int i, int d) { return band_[static_cast<std::size_t>(i * (bw_ + 1) + d)]; }
  double at(int i, int d) const { return band_[static_cast<std::size_t>(i * (bw_ + 1) + d)]; }

  int n_;
  int bw_;
  std::vector<double> band_;
};

// Applies a 1-D map along `axis` to every line of a 3-D array (x fastest),
// replacing the axis length with `out_len`.
template <typename LineMap>
std::vector<double> map_axis(const std::vector<double>& in, Index3 shape, int axis, int out_len,
                             LineMap&& line_map) {
  Index3 out_shape = shape;
  out_shape[axis] = out_len;
  std::vector<double> out(product(out_shape));

  const int in_len = shape[axis];
  std::array<std::size_t, 3> in_stride{1, static_cast<std::size_t>(shape[0]),
                                        static_cast<std::size_t>(shape[0]) * shape[1]};
  std::array<std::size_t, 3> out_stride{1, static_cast<std::size_t>(out_shape[0]),
                                        static_cast<std::size_t>(out_shape[0]) * out_shape[1]};
  const int o1 = axis == 0 ? 1 : 0;
  const int o2 = axis == 2 ? 1 : 2;

  std::vector<double> src(static_cast<std::size_t>(in_len));
  std::vector<double> dst(static_cast<std::size_t>(out_len));
  for (int j = 0; j < shape[o2]; ++j) {
    for (int i = 0; i < shape[o1]; ++i) {
      const std::size_t in_base = i * in_stride[o1] + j * in_stride[o2];
      const std::size_t out_base = i * out_stride[o1] + j * out_stride[o2];
      for (int s = 0; s < in_len; ++s) src[s] = in[in_base + s * in_stride[axis]];
      line_map(std::span<const double>(src), std::span<double>(dst));
      for (int s = 0; s < out_len; ++s) out[out_base + s * out_stride[axis]] = dst[s];
    }
  }
  return out;
}

double value_range_or_one(const ScalarGrid3D& block) {
  const double range = block.value_range();
  return range > 0.0 ? range : 1.0;
}

struct FitStats {
  double max_rel = 0.0;
  double sse = 0.0;
};

FitStats residual_stats(const std::vector<double>& approx, const ScalarGrid3D& block) {
  const double range = value_range_or_one(block);
  FitStats stats;
  const auto values = block.values();
  for (std::size_t i = 0; i < values.size(); ++i) {
    const double r = approx[i] - values[i];
    stats.sse += r * r;
    stats.max_rel = std::max(stats.max_rel, std::abs(r) / range);
  }
  return stats;
}

std::array<KnotVector, 3> uniform_knots(int degree, Index3 ctrl) {
  return {KnotVector::uniform(degree, ctrl[0]), KnotVector::uniform(degree, ctrl[1]),
          KnotVector::uniform(degree, ctrl[2])};
}

}  // namespace

void EncodeConfig::validate() const {
  if (degree < 1 || degree > kMaxDegree) {
    throw ParameterError("degree must be in [1, " + std::to_string(kMaxDegree) + "]");
  }
  if (adaptive) {
    if (!(e_max > 0.0 && e_max < 1.0)) throw ParameterError("e_max must be in (0,1)");
  } else if (!ctrl_pts) {
    throw ParameterError("fixed encoding needs ctrl_pts");
  }
  auto check_ctrl = [&](const Index3& c, const char* what) {
    for (int a = 0; a < 3; ++a) {
      if (c[a] < degree + 1) {
        throw ParameterError(std::string(what) + " must be >= degree+1 per axis");
      }
    }
  };
  if (ctrl_pts) check_ctrl(*ctrl_pts, "ctrl_pts");
  if (ctrl_cap) check_ctrl(*ctrl_cap, "ctrl_cap");
}

bool collocation_full_rank(const KnotVector& kv, int n_samples) {
  if (n_samples < kv.n_ctrl()) return false;
  const Collocation c(kv, n_samples);
  // Greedy matching of basis functions to distinct samples in increasing
  // order; exact for interval supports.
  int next_sample = 0;
  for (int col = 0; col < c.n_ctrl; ++col) {
    bool matched = false;
    for (int s = next_sample; s < n_samples; ++s) {
      const int f = c.first[static_cast<std::size_t>(s)];
      if (f > col) break;
      if (col < f + c.width && c.row(s)[col - f] > 0.0) {
        next_sample = s + 1;
        matched = true;
        break;
      }
    }
    if (!matched) return false;
  }
  return true;
}

std::vector<double> evaluate_on_lattice(const MfaModel& model, Index3 dims) {
  std::vector<double> data(model.ctrl().begin(), model.ctrl().end());
  Index3 shape = model.n_ctrl();
  for (int axis = 0; axis < 3; ++axis) {
    const Collocation c(model.knots(axis), dims[axis]);
    data = map_axis(data, shape, axis, dims[axis],
                    [&c](std::span<const double> ctrl, std::span<double> out) {
                      for (int s = 0; s < c.n_samples; ++s) {
                        const double* r = c.row(s);
                        const double* p = ctrl.data() + c.first[static_cast<std::size_t>(s)];
                        double v = 0.0;
                        for (int a = 0; a < c.width; ++a) v += r[a] * p[a];
                        out[s] = v;
                      }
                    });
    shape[axis] = dims[axis];
  }
  return data;
}

double max_relative_error(const MfaModel& model, const ScalarGrid3D& block) {
  return residual_stats(evaluate_on_lattice(model, block.dims()), block).max_rel;
}

MfaModel fit_block(const ScalarGrid3D& block, const std::array<KnotVector, 3>& knots,
                   Index3 source_dims) {
  const Index3 dims = block.dims();
  for (int axis = 0; axis < 3; ++axis) {
    if (knots[axis].n_ctrl() > dims[axis]) {
      throw ParameterError("axis " + std::to_string(axis) + " has more control points (" +
                           std::to_string(knots[axis].n_ctrl()) + ") than samples (" +
                           std::to_string(dims[axis]) + ")");
    }
  }

  std::vector<double> data(block.values().begin(), block.values().end());
  Index3 shape = dims;
  for (int axis = 0; axis < 3; ++axis) {
    const Collocation c(knots[axis], dims[axis]);
    const BandedCholesky normal(c);
    data = map_axis(data, shape, axis, c.n_ctrl,
                    [&](std::span<const double> q, std::span<double> rhs) {
                      std::fill(rhs.begin(), rhs.end(), 0.0);
                      for (int s = 0; s < c.n_samples; ++s) {
                        const double* r = c.row(s);
                        const int f = c.first[static_cast<std::size_t>(s)];
                        for (int a = 0; a < c.width; ++a) rhs[f + a] += r[a] * q[s];
                      }
                      normal.solve(rhs);
                    });
    shape[axis] = c.n_ctrl;
  }

  MfaModel model(knots, std::move(data), block.bounds(), source_dims, 0.0);
  const double err = max_relative_error(model, block);
  return MfaModel(knots, std::vector<double>(model.ctrl().begin(), model.ctrl().end()),
                  block.bounds(), source_dims, err);
}

MfaModel encode_fixed(const ScalarGrid3D& block, const EncodeConfig& cfg) {
  cfg.validate();
  if (!cfg.ctrl_pts) throw ParameterError("fixed encoding needs ctrl_pts");
  const Index3 ctrl = *cfg.ctrl_pts;
  auto knots = uniform_knots(cfg.degree, ctrl);
  for (int axis = 0; axis < 3; ++axis) {
    // interpolating axes put knots on the sample lattice instead
    if (ctrl[axis] == block.dims()[axis]) knots[axis] = KnotVector::averaged(cfg.degree, ctrl[axis]);
  }
  for (int axis = 0; axis < 3; ++axis) {
    if (ctrl[axis] > block.dims()[axis]) {
      throw ParameterError("ctrl_pts exceed sample count on axis " + std::to_string(axis));
    }
    if (!collocation_full_rank(knots[axis], block.dims()[axis])) {
      throw NumericError("knot placement leaves axis " + std::to_string(axis) +
                         " underdetermined");
    }
  }
  return fit_block(block, knots, cfg.source_dims.value_or(block.dims()));
}

EncodeResult encode_adaptive(const ScalarGrid3D& block, const EncodeConfig& cfg) {
  cfg.validate();
  const Index3 dims = block.dims();
  const int p = cfg.degree;
  const Index3 cap = cfg.ctrl_cap.value_or(dims);
  for (int axis = 0; axis < 3; ++axis) {
    if (dims[axis] < p + 1) {
      throw ParameterError("block needs at least degree+1 samples per axis");
    }
    if (cap[axis] > dims[axis]) throw ParameterError("ctrl_cap exceeds sample count");
  }
  const Index3 source = cfg.source_dims.value_or(dims);
  const double range = value_range_or_one(block);

  std::array<KnotVector, 3> knots = uniform_knots(p, {p + 1, p + 1, p + 1});
  std::vector<RefinementRound> rounds;

  while (true) {
    MfaModel model = fit_block(block, knots, source);
    const std::vector<double> approx = evaluate_on_lattice(model, dims);
    const FitStats stats = residual_stats(approx, block);
    rounds.push_back({model.n_ctrl(), stats.max_rel, stats.sse});
    if (stats.max_rel <= cfg.e_max) return {std::move(model), false, std::move(rounds)};

    // Worst relative error per knot span, per axis, over failing samples.
    std::array<std::vector<int>, 3> span_of;
    std::array<std::vector<double>, 3> span_err;
    for (int axis = 0; axis < 3; ++axis) {
      const KnotVector& kv = knots[axis];
      span_of[axis].resize(static_cast<std::size_t>(dims[axis]));
      for (int s = 0; s < dims[axis]; ++s) {
        span_of[axis][s] = find_span(kv, static_cast<double>(s) / (dims[axis] - 1));
      }
      span_err[axis].assign(kv.knots().size(), 0.0);
    }
    const auto values = block.values();
    std::size_t idx = 0;
    for (int k = 0; k < dims[2]; ++k) {
      for (int j = 0; j < dims[1]; ++j) {
        for (int i = 0; i < dims[0]; ++i, ++idx) {
          const double rel = std::abs(approx[idx] - values[idx]) / range;
          if (rel <= cfg.e_max) continue;
          const int sx = span_of[0][i], sy = span_of[1][j], sz = span_of[2][k];
          span_err[0][sx] = std::max(span_err[0][sx], rel);
          span_err[1][sy] = std::max(span_err[1][sy], rel);
          span_err[2][sz] = std::max(span_err[2][sz], rel);
        }
      }
    }

    bool refined = false;
    for (int axis = 0; axis < 3; ++axis) {
      const KnotVector& kv = knots[axis];
      std::vector<int> marked;
      for (int s = 0; s < static_cast<int>(span_err[axis].size()); ++s) {
        if (span_err[axis][s] > 0.0) marked.push_back(s);
      }
      std::stable_sort(marked.begin(), marked.end(), [&](int a, int b) {
        return span_err[axis][a] > span_err[axis][b];
      });
      KnotVector next = kv;
      for (int s : marked) {
        if (next.n_ctrl() >= cap[axis]) break;
        const KnotVector candidate = next.inserted(0.5 * (kv[s] + kv[s + 1]));
        if (collocation_full_rank(candidate, dims[axis])) next = candidate;
      }
      if (next.n_ctrl() != kv.n_ctrl()) {
        knots[axis] = std::move(next);
        refined = true;
      }
    }
    if (!refined) return {std::move(model), true, std::move(rounds)};
  }
}

EncodeResult encode(const ScalarGrid3D& block, const EncodeConfig& cfg) {
  if (cfg.adaptive) return encode_adaptive(block, cfg);
  return {encode_fixed(block, cfg), false, {}};
}

}  // namespace mfavis
