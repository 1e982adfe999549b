// Copyright 2026 The mfavis Authors
// SPDX-License-Identifier: Apache-2.0

#include <cmath>
#include <cstring>
#include <fstream>
#include <random>

#include "bspline_oracle.hpp"
#include "gtest/gtest.h"
#include "mfavis/error.hpp"
#include "mfavis/field/marschner_lobb.hpp"
#include "mfavis/field/partition.hpp"
#include "mfavis/mfa/encode.hpp"
#include "mfavis/mfa/model.hpp"
#include "mfavis/mfa/model_io.hpp"
#include "test_support.hpp"

namespace mfavis {
namespace {

using testing::make_grid;

EncodeConfig fixed(int degree, Index3 ctrl) {
  EncodeConfig cfg;
  cfg.degree = degree;
  cfg.ctrl_pts = ctrl;
  return cfg;
}

TEST(EncodeFixedTest, ConstantBlockIsExact) {
  const ScalarGrid3D g = make_grid({9, 8, 7}, {{0, 0, 0}, {1, 1, 1}}, [](Vec3) { return 3.25; });
  const MfaModel m = encode_fixed(g, fixed(2, {5, 4, 3}));
  for (double c : m.ctrl()) EXPECT_NEAR(c, 3.25, 1e-12);
  EXPECT_LE(m.e_max_achieved(), 1e-12);
}

TEST(EncodeFixedTest, DegreeOneRampUsesCornerValues) {
  const ScalarGrid3D g = make_grid({6, 5, 4}, {{1, 2, 3}, {4, 5, 6}}, [](Vec3 p) { return p.x; });
  const MfaModel m = encode_fixed(g, fixed(1, {2, 2, 2}));
  for (int k = 0; k < 2; ++k)
    for (int j = 0; j < 2; ++j) {
      EXPECT_NEAR(m.ctrl_at(0, j, k), 1.0, 1e-12);
      EXPECT_NEAR(m.ctrl_at(1, j, k), 4.0, 1e-12);
    }
  std::mt19937_64 rng(1);
  for (int n = 0; n < 100; ++n) {
    const Vec3 p = testing::random_point(rng, g.bounds());
    EXPECT_NEAR(decode_value(m, p), p.x, 1e-12);
  }
  EXPECT_NEAR(decode_value(m, g.bounds().center()), 2.5, 1e-12);
}

TEST(EncodeFixedTest, SquareSystemInterpolatesMarschnerLobb) {
  const ScalarGrid3D g = generate_marschner_lobb({33, 33, 33});
  const MfaModel m = encode_fixed(g, fixed(2, {33, 33, 33}));
  EXPECT_LE(m.e_max_achieved(), 1e-5);
  // Independent re-evaluation through the point query path.
  double worst = 0;
  for (int k = 0; k < 33; k += 5)
    for (int j = 0; j < 33; j += 3)
      for (int i = 0; i < 33; ++i)
        worst = std::max(worst, std::abs(decode_value(m, g.position(i, j, k)) - g.at(i, j, k)));
  EXPECT_LE(worst / g.value_range(), 1e-5);
}

TEST(EncodeFixedTest, LeastSquaresMatchesDenseNormalEquations1D) {
  // Separable solve on a 1-D-like block equals the dense LS solution from a
  // hand-rolled Gaussian elimination.
  const int n = 11, c = 5, p = 2;
  std::mt19937_64 rng(3);
  std::vector<double> v(static_cast<std::size_t>(n * 3 * 3));
  std::vector<double> line(n);
  for (int i = 0; i < n; ++i) line[i] = std::uniform_real_distribution<double>(-1, 1)(rng);
  for (int k = 0; k < 3; ++k)
    for (int j = 0; j < 3; ++j)
      for (int i = 0; i < n; ++i) v[static_cast<std::size_t>(i + n * (j + 3 * k))] = line[i];
  const ScalarGrid3D g({n, 3, 3}, {0, 0, 0}, {1, 1, 1}, v);
  const MfaModel m = encode_fixed(g, fixed(p, {c, 3, 3}));

  const KnotVector kv = KnotVector::uniform(p, c);
  std::vector<std::vector<double>> A(c, std::vector<double>(c + 1, 0.0));
  for (int s = 0; s < n; ++s) {
    const double u = static_cast<double>(s) / (n - 1);
    std::vector<double> row(c);
    for (int i = 0; i < c; ++i) row[i] = testing::cox_de_boor(kv.knots(), i, p, u);
    for (int a = 0; a < c; ++a) {
      for (int b = 0; b < c; ++b) A[a][b] += row[a] * row[b];
      A[a][c] += row[a] * line[s];
    }
  }
  for (int col = 0; col < c; ++col)
    for (int r = col + 1; r < c; ++r) {
      const double f = A[r][col] / A[col][col];
      for (int k = col; k <= c; ++k) A[r][k] -= f * A[col][k];
    }
  std::vector<double> x(c);
  for (int r = c - 1; r >= 0; --r) {
    double s = A[r][c];
    for (int k = r + 1; k < c; ++k) s -= A[r][k] * x[k];
    x[r] = s / A[r][r];
  }
  for (int i = 0; i < c; ++i) EXPECT_NEAR(m.ctrl_at(i, 1, 1), x[i], 1e-12);
}

TEST(EncodeFixedTest, PreconditionsAreChecked) {
  const ScalarGrid3D g = generate_marschner_lobb({8, 8, 8});
  EXPECT_THROW(encode_fixed(g, fixed(2, {9, 8, 8})), ParameterError);
  EXPECT_THROW(encode_fixed(g, fixed(2, {2, 8, 8})), ParameterError);
  EXPECT_THROW(encode_fixed(g, fixed(0, {4, 4, 4})), ParameterError);
  EncodeConfig none;
  EXPECT_THROW(encode_fixed(g, none), ParameterError);
}

TEST(EncodeAdaptiveTest, ConstantBlockStopsImmediately) {
  const ScalarGrid3D g = make_grid({12, 12, 12}, {{0, 0, 0}, {1, 1, 1}}, [](Vec3) { return -2.0; });
  EncodeConfig cfg;
  cfg.adaptive = true;
  cfg.e_max = 1e-6;
  const EncodeResult r = encode_adaptive(g, cfg);
  EXPECT_FALSE(r.capped);
  EXPECT_EQ(r.rounds.size(), 1u);
  EXPECT_EQ(r.model.n_ctrl(), (Index3{3, 3, 3}));
}

TEST(EncodeAdaptiveTest, QuadraticFieldIsRepresentedByMinimalModel) {
  const ScalarGrid3D g = make_grid({20, 15, 10}, {{0, 0, 0}, {2, 1, 1}}, [](Vec3 p) { return p.x * p.x; });
  EncodeConfig cfg;
  cfg.adaptive = true;
  cfg.e_max = 1e-6;
  const EncodeResult r = encode_adaptive(g, cfg);
  EXPECT_FALSE(r.capped);
  EXPECT_EQ(r.rounds.size(), 1u);
  EXPECT_EQ(r.model.n_ctrl(), (Index3{3, 3, 3}));
  EXPECT_LE(r.model.e_max_achieved(), 1e-6);
}

TEST(EncodeAdaptiveTest, MarschnerLobbMeetsToleranceOrReportsCap) {
  const ScalarGrid3D g = generate_marschner_lobb({33, 33, 33});
  EncodeConfig cfg;
  cfg.adaptive = true;
  cfg.e_max = 1e-2;
  const EncodeResult r = encode_adaptive(g, cfg);
  ASSERT_FALSE(r.rounds.empty());
  // Least squares over nested spline spaces never increases the residual.
  for (std::size_t i = 1; i < r.rounds.size(); ++i) {
    EXPECT_LE(r.rounds[i].sum_sq_error, r.rounds[i - 1].sum_sq_error * (1 + 1e-12) + 1e-12);
    for (int a = 0; a < 3; ++a) EXPECT_GE(r.rounds[i].n_ctrl[a], r.rounds[i - 1].n_ctrl[a]);
  }
  double worst = 0;
  for (int k = 0; k < 33; ++k)
    for (int j = 0; j < 33; ++j)
      for (int i = 0; i < 33; ++i)
        worst = std::max(worst, std::abs(decode_value(r.model, g.position(i, j, k)) - g.at(i, j, k)));
  worst /= g.value_range();
  EXPECT_NEAR(worst, r.model.e_max_achieved(), 1e-9);
  if (!r.capped) {
    EXPECT_LE(worst, 1e-2);
  }
  EXPECT_LE(compression_ratio(r.model), 33.0 * 33 * 33 / 27);
}

TEST(CollocationTest, RankCheck) {
  for (int p = 1; p <= 3; ++p) {
    for (int n = p + 1; n <= 24; ++n) EXPECT_TRUE(collocation_full_rank(KnotVector::averaged(p, n), n));
  }
  EXPECT_TRUE(collocation_full_rank(KnotVector::uniform(2, 10), 10));
  EXPECT_FALSE(collocation_full_rank(KnotVector::uniform(2, 10), 9));
  // N_3 is supported on (0.3, 0.33), which holds none of the parameters i/7.
  const KnotVector starved(2, {0, 0, 0, 0.3, 0.31, 0.32, 0.33, 1, 1, 1});
  EXPECT_FALSE(collocation_full_rank(starved, 8));
  EXPECT_TRUE(collocation_full_rank(KnotVector(2, {0, 0, 0, 0.41, 0.42, 0.43, 1, 1, 1}), 6));
}

TEST(DecodeTest, ConstantModel) {
  const ScalarGrid3D g = make_grid({6, 6, 6}, {{0, 0, 0}, {2, 2, 2}}, [](Vec3) { return 0.7; });
  const MfaModel m = encode_fixed(g, fixed(3, {5, 4, 6}));
  std::mt19937_64 rng(5);
  for (int n = 0; n < 100; ++n) {
    const Vec3 p = testing::random_point(rng, g.bounds());
    EXPECT_NEAR(decode_value(m, p), 0.7, 1e-12);
    EXPECT_NEAR(norm(decode_gradient(m, p)), 0.0, 1e-10);
  }
}

TEST(DecodeTest, LocalSumMatchesNaiveTripleSum) {
  std::mt19937_64 rng(6);
  for (int model = 0; model < 5; ++model) {
    const MfaModel m = testing::random_model(rng);
    for (int n = 0; n < 50; ++n) {
      const Vec3 p = testing::random_point(rng, m.domain());
      const double naive = testing::naive_decode(m, p);
      EXPECT_NEAR(decode_value(m, p), naive, 1e-10 * std::max(1.0, std::abs(naive)));
      EXPECT_NEAR(decode_value_gradient(m, p).value, naive, 1e-10 * std::max(1.0, std::abs(naive)));
    }
  }
}

TEST(DecodeTest, LocalSupport) {
  std::mt19937_64 rng(7);
  const MfaModel m = testing::random_model(rng);
  const Vec3 p = testing::random_point(rng, m.domain());
  const Vec3 u = m.to_parameter(p);
  const Index3 n = m.n_ctrl();
  Index3 first{};
  for (int a = 0; a < 3; ++a) first[a] = find_span(m.knots(a), u[a]) - m.degree()[a];
  const double base = decode_value(m, p);
  for (int k = 0; k < n[2]; ++k)
    for (int j = 0; j < n[1]; ++j)
      for (int i = 0; i < n[0]; ++i) {
        const bool active = i >= first[0] && i <= first[0] + m.degree()[0] && j >= first[1] &&
                            j <= first[1] + m.degree()[1] && k >= first[2] && k <= first[2] + m.degree()[2];
        if (active) continue;
        std::vector<double> ctrl(m.ctrl().begin(), m.ctrl().end());
        ctrl[static_cast<std::size_t>(i + n[0] * (j + n[1] * k))] += 100.0;
        const MfaModel perturbed(m.knot_vectors(), ctrl, m.domain(), m.source_dims(), 0.0);
        EXPECT_EQ(decode_value(perturbed, p), base);
      }
}

TEST(DecodeTest, OutOfDomainIsAnError) {
  std::mt19937_64 rng(8);
  const MfaModel m = testing::random_model(rng);
  EXPECT_THROW(decode_value(m, m.domain().hi + Vec3{0.1, 0, 0}), DomainError);
  EXPECT_THROW(decode_gradient(m, m.domain().lo - Vec3{0, 0, 0.1}), DomainError);
}

TEST(GradientTest, LinearRampIsExact) {
  const ScalarGrid3D g = make_grid({7, 7, 7}, {{-1, 0, 0}, {2, 1, 3}}, [](Vec3 p) { return 2 * p.x; });
  const MfaModel m = encode_fixed(g, fixed(2, {5, 5, 5}));
  std::mt19937_64 rng(9);
  for (int n = 0; n < 200; ++n) {
    const Vec3 gr = decode_gradient(m, testing::random_point(rng, g.bounds()));
    EXPECT_NEAR(gr.x, 2.0, 1e-9);
    EXPECT_NEAR(gr.y, 0.0, 1e-9);
    EXPECT_NEAR(gr.z, 0.0, 1e-9);
  }
}

TEST(GradientTest, RandomModelsMatchFiniteDifferences) {
  std::mt19937_64 rng(10);
  for (int model = 0; model < 5; ++model) {
    const MfaModel m = testing::random_model(rng);
    const Vec3 ext = m.domain().extent();
    for (int n = 0; n < 100; ++n) {
      const Vec3 p = testing::random_point(rng, testing::interior(m.domain(), 0.01));
      const Vec3 g = decode_gradient(m, p);
      for (int a = 0; a < 3; ++a) {
        const double h = 1e-6 * ext[a];
        Vec3 f = p, b = p;
        f[a] += h;
        b[a] -= h;
        const double fd = (testing::naive_decode(m, f) - testing::naive_decode(m, b)) / (2 * h);
        EXPECT_NEAR(g[a], fd, 1e-5 * std::max(1.0, std::abs(fd)));
      }
    }
  }
}

TEST(CompressionRatioTest, Arithmetic) {
  auto model_with = [](Index3 source, Index3 ctrl) {
    std::array<KnotVector, 3> k{KnotVector::uniform(2, ctrl[0]), KnotVector::uniform(2, ctrl[1]),
                                KnotVector::uniform(2, ctrl[2])};
    return MfaModel(k, std::vector<double>(product(ctrl), 0.0), {{0, 0, 0}, {1, 1, 1}}, source, 0.0);
  };
  EXPECT_DOUBLE_EQ(compression_ratio(model_with({64, 64, 64}, {64, 64, 64})), 1.0);
  EXPECT_DOUBLE_EQ(compression_ratio(model_with({64, 64, 64}, {32, 32, 32})), 8.0);
  EXPECT_DOUBLE_EQ(compression_ratio(model_with({1024, 1024, 1024}, {256, 256, 256})), 64.0);
}

TEST(ModelIoTest, RoundTripIsBitExact) {
  testing::TempDir dir;
  std::mt19937_64 rng(11);
  for (int n = 0; n < 5; ++n) {
    const MfaModel m = testing::random_model(rng);
    save_model(m, dir / "m.mfa");
    EXPECT_EQ(load_model(dir / "m.mfa"), m);
    EXPECT_EQ(std::filesystem::file_size(dir / "m.mfa"), model_file_size(m));
  }
}

TEST(ModelIoTest, FileSizeFromFormatDefinition) {
  testing::TempDir dir;
  const ScalarGrid3D g = generate_marschner_lobb({10, 9, 8});
  const MfaModel m = encode_fixed(g, fixed(2, {6, 5, 4}));
  save_model(m, dir / "m.mfa");
  // 91-byte header; knots (6+3)+(5+3)+(4+3)=24 f64 plus three u32 counts;
  // 6*5*4=120 f64 control points.
  EXPECT_EQ(std::filesystem::file_size(dir / "m.mfa"), 91u + 3 * 4 + 24 * 8 + 120 * 8);
}

TEST(ModelIoTest, SizeIsAffineInControlPointCount) {
  const ScalarGrid3D g = generate_marschner_lobb({20, 20, 20});
  std::vector<std::pair<double, double>> pts;
  for (int c : {4, 8, 12, 16, 20}) {
    const MfaModel m = encode_fixed(g, fixed(2, {c, c, c}));
    pts.emplace_back(static_cast<double>(product(m.n_ctrl())), static_cast<double>(serialize_model(m).size()));
  }
  // Knots add 24 bytes per control point per axis; for a cubic count c^3 the
  // size is header + 3*(4 + 8*(c+3)) + 8*c^3, so subtract the knot term.
  for (auto [count, size] : pts) {
    const double c = std::cbrt(count);
    EXPECT_DOUBLE_EQ(size - 3 * (4 + 8 * (c + 3)), 91 + 8 * count);
  }
}

TEST(ModelIoTest, CorruptMagicAndTruncation) {
  testing::TempDir dir;
  std::mt19937_64 rng(12);
  const MfaModel m = testing::random_model(rng);
  auto bytes = serialize_model(m);
  auto bad = bytes;
  bad[0] = std::byte{'X'};
  EXPECT_THROW(deserialize_model(bad), FormatError);
  auto truncated = bytes;
  truncated.resize(bytes.size() - 3);
  EXPECT_THROW(deserialize_model(truncated), FormatError);
  auto version = bytes;
  version[4] = std::byte{2};
  EXPECT_THROW(deserialize_model(version), FormatError);
  EXPECT_THROW(load_model(dir / "nope.mfa"), IoError);
}

}  // namespace
}  // namespace mfavis
