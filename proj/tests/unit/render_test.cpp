// Copyright 2026 The mfavis Authors
// SPDX-License-Identifier: Apache-2.0

#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <random>

#include "mfavis/error.hpp"
#include "mfavis/field/marschner_lobb.hpp"
#include "mfavis/mfa/encode.hpp"
#include "mfavis/render/camera.hpp"
#include "mfavis/render/raycast.hpp"
#include "mfavis/render/scene_io.hpp"
#include "test_support.hpp"

namespace mfavis {
namespace {

using testing::make_grid;

Camera ml_camera(int w, int h) {
  Camera c;
  c.position = {14.0, -9.0, 11.0};
  c.look_at = {3.5, 3.5, 3.5};
  c.up = {0.0, 0.0, 1.0};
  c.fov_deg = 40.0;
  c.width = w;
  c.height = h;
  return c;
}

TransferFunction constant_tf(Vec3 color, double opacity, double dt_ref = 1.0) {
  return TransferFunction({{0.0, color, opacity}, {1.0, color, opacity}}, dt_ref);
}

double max_abs_diff(const PartialImage& a, const PartialImage& b) {
  double d = 0.0;
  for (std::size_t i = 0; i < a.rgba.size(); ++i) {
    d = std::max(d, std::abs(static_cast<double>(a.rgba[i]) - b.rgba[i]));
  }
  return d;
}

TEST(Camera, CenterPixelLooksAtTarget) {
  Camera c = ml_camera(33, 21);
  const auto rays = make_rays(c);
  const Ray center = rays[10 * 33 + 16];
  const Vec3 want = normalize(c.look_at - c.position);
  EXPECT_NEAR(center.dir.x, want.x, 1e-14);
  EXPECT_NEAR(center.dir.y, want.y, 1e-14);
  EXPECT_NEAR(center.dir.z, want.z, 1e-14);
}

TEST(Camera, DirectionsAreUnitLength) {
  for (const Ray& r : make_rays(ml_camera(40, 30))) EXPECT_NEAR(norm(r.dir), 1.0, 1e-12);
}

TEST(Camera, CornerPixelFov90) {
  // Looking down -z with y up: image plane at distance 1 spans [-1,1]^2, so the
  // top-left pixel centre sits at (-(1 - 1/n), 1 - 1/n, -1).
  const int n = 8;
  Camera c;
  c.position = {0, 0, 0};
  c.look_at = {0, 0, -3};
  c.up = {0, 1, 0};
  c.fov_deg = 90.0;
  c.width = c.height = n;
  const auto rays = make_rays(c);
  const double s = 1.0 - 1.0 / n;
  const double len = std::sqrt(2 * s * s + 1.0);
  EXPECT_NEAR(rays[0].dir.x, -s / len, 1e-12);
  EXPECT_NEAR(rays[0].dir.y, s / len, 1e-12);
  EXPECT_NEAR(rays[0].dir.z, -1.0 / len, 1e-12);
  const Ray br = rays[n * n - 1];
  EXPECT_NEAR(br.dir.x, s / len, 1e-12);
  EXPECT_NEAR(br.dir.y, -s / len, 1e-12);
}

TEST(Camera, DegenerateBasisThrows) {
  Camera c;
  c.position = {0, 0, 5};
  c.look_at = {0, 0, 0};
  c.up = {0, 0, 1};
  EXPECT_THROW(make_rays(c), CameraError);
  c.up = {0, 1, 0};
  c.look_at = c.position;
  EXPECT_THROW(make_rays(c), CameraError);
  c.look_at = {0, 0, 0};
  c.fov_deg = 180.0;
  EXPECT_THROW(make_rays(c), CameraError);
  c.fov_deg = 45.0;
  c.width = 0;
  EXPECT_THROW(make_rays(c), CameraError);
}

const Aabb kUnit{{0, 0, 0}, {1, 1, 1}};

TEST(IntersectAabb, EntersAndExitsUnitCube) {
  const auto hit = intersect_aabb({{-1, 0.5, 0.5}, {1, 0, 0}}, kUnit);
  ASSERT_TRUE(hit);
  EXPECT_DOUBLE_EQ(hit->t_near, 1.0);
  EXPECT_DOUBLE_EQ(hit->t_far, 2.0);
}

TEST(IntersectAabb, RayPointingAwayMisses) {
  EXPECT_FALSE(intersect_aabb({{-1, 0.5, 0.5}, {-1, 0, 0}}, kUnit));
  EXPECT_FALSE(intersect_aabb({{-1, 2.0, 0.5}, {1, 0, 0}}, kUnit));
}

TEST(IntersectAabb, OriginInsideClipsAtZero) {
  const auto hit = intersect_aabb({{0.25, 0.5, 0.5}, {1, 0, 0}}, kUnit);
  ASSERT_TRUE(hit);
  EXPECT_EQ(hit->t_near, 0.0);
  EXPECT_DOUBLE_EQ(hit->t_far, 0.75);
}

// Membership of points along the ray agrees with the returned interval.
void check_by_sampling(const Ray& ray, const Aabb& box) {
  const auto hit = intersect_aabb(ray, box);
  const double t_max = 5.0;
  int inside = 0;
  for (int i = 0; i < 1000; ++i) {
    const double t = t_max * i / 999.0;
    const bool in = box.contains(ray.origin + ray.dir * t);
    inside += in;
    if (hit && (std::abs(t - hit->t_near) < 1e-9 || std::abs(t - hit->t_far) < 1e-9)) continue;
    const bool in_interval = hit && t >= hit->t_near && t <= hit->t_far;
    EXPECT_EQ(in, in_interval) << "t=" << t;
  }
  if (!hit) {
    EXPECT_EQ(inside, 0);
  }
}

TEST(IntersectAabb, GrazingFaceMatchesSampledMembership) {
  check_by_sampling({{-1, 1.0, 0.5}, {1, 0, 0}}, kUnit);   // along the y=1 face
  check_by_sampling({{-1, 0.0, 0.0}, {1, 0, 0}}, kUnit);   // along an edge
  check_by_sampling({{-1, 1.0 + 1e-6, 0.5}, {1, 0, 0}}, kUnit);
  check_by_sampling({{0.5, 0.5, -1}, {0, 0, 1}}, kUnit);
}

TEST(IntersectAabb, RandomRaysMatchSampledMembership) {
  std::mt19937_64 rng(3);
  std::normal_distribution<double> n(0.0, 1.0);
  for (int i = 0; i < 200; ++i) {
    const Vec3 o = testing::random_point(rng, {{-2, -2, -2}, {3, 3, 3}});
    check_by_sampling({o, normalize({n(rng), n(rng), n(rng)})}, kUnit);
  }
}

TEST(OpacityCorrect, Examples) {
  EXPECT_EQ(opacity_correct(1.0, 0.3, 0.01), 1.0);
  EXPECT_EQ(opacity_correct(1.0, 0.001, 0.01), 1.0);
  EXPECT_NEAR(opacity_correct(0.37, 0.01, 0.01), 0.37, 1e-15);
  EXPECT_NEAR(opacity_correct(0.5, 0.02, 0.01), 0.75, 1e-15);
}

TEST(TransferFunction, TableInterpolatesNodes) {
  TransferFunction tf({{0.0, {0, 0, 0}, 0.0}, {1.0, {1, 0.5, 0.25}, 0.8}}, 0.01);
  for (int i = 0; i < 256; ++i) {
    const double s = i / 255.0;
    const Rgba& e = tf.table()[static_cast<std::size_t>(i)];
    EXPECT_NEAR(e.r, s, 1e-12);
    EXPECT_NEAR(e.g, 0.5 * s, 1e-12);
    EXPECT_NEAR(e.a, 0.8 * s, 1e-12);
  }
  EXPECT_NEAR(tf.lookup(0.3).a, 0.24, 1e-12);
  EXPECT_EQ(tf.lookup(-2.0), tf.table().front());
  EXPECT_EQ(tf.lookup(7.0), tf.table().back());
}

TEST(TransferFunction, HoldsEndNodesConstant) {
  TransferFunction tf({{0.4, {1, 0, 0}, 0.2}, {0.6, {0, 1, 0}, 0.6}}, 0.01);
  EXPECT_EQ(tf.lookup(0.1).r, 1.0);
  EXPECT_EQ(tf.lookup(0.1).a, 0.2);
  EXPECT_EQ(tf.lookup(0.9).g, 1.0);
  EXPECT_EQ(tf.lookup(0.9).a, 0.6);
}

TEST(TransferFunction, RejectsInvalidNodes) {
  EXPECT_THROW(TransferFunction({}, 0.01), ParameterError);
  EXPECT_THROW(TransferFunction({{0.5, {0, 0, 0}, 0}, {0.2, {0, 0, 0}, 0}}, 0.01), ParameterError);
  EXPECT_THROW(TransferFunction({{0.5, {0, 2, 0}, 0}}, 0.01), ParameterError);
  EXPECT_THROW(TransferFunction({{0.5, {0, 0, 0}, 0}}, 0.0), ParameterError);
}

TEST(TransferFunction, PresetsSortedAndValid) {
  const auto presets = tf_presets();
  ASSERT_GE(presets.size(), 3u);
  for (const auto& p : presets) {
    EXPECT_TRUE(std::is_sorted(p.tf.nodes().begin(), p.tf.nodes().end(),
                               [](const TfNode& a, const TfNode& b) { return a.value < b.value; }))
        << p.name;
    for (const Rgba& e : p.tf.table()) {
      for (double c : {e.r, e.g, e.b, e.a}) {
        EXPECT_GE(c, 0.0);
        EXPECT_LE(c, 1.0);
      }
    }
  }
  EXPECT_THROW(tf_preset("nope"), ParameterError);
}

TEST(TransferFunction, SpikePresetHasOneOpacityBump) {
  const TransferFunction tf = tf_preset("spike");
  int rises = 0, falls = 0;
  for (int i = 1; i < 256; ++i) {
    const double d = tf.table()[i].a - tf.table()[i - 1].a;
    const double prev = i > 1 ? tf.table()[i - 1].a - tf.table()[i - 2].a : 0.0;
    if (d > 0 && !(prev > 0)) ++rises;
    if (d < 0 && !(prev < 0)) ++falls;
  }
  EXPECT_EQ(rises, 1);
  EXPECT_EQ(falls, 1);
}

TEST(RenderBlock, TransparentTransferFunctionGivesZeroAlpha) {
  auto grid = std::make_shared<const ScalarGrid3D>(generate_marschner_lobb({17, 17, 17}));
  const auto img = render_block(GridSource{grid, Filter::trilinear}, grid->bounds(),
                                ml_camera(24, 24), constant_tf({1, 1, 1}, 0.0), RayCastConfig{},
                                {0.0, 1.0});
  for (float v : img.rgba) EXPECT_EQ(v, 0.0f);
}

// f(x) = x on [0,1]^3 sampled on a 2^3 grid; trilinear reproduces it exactly.
std::shared_ptr<const ScalarGrid3D> ramp_grid() {
  return std::make_shared<const ScalarGrid3D>(
      make_grid({2, 2, 2}, kUnit, [](Vec3 p) { return p.x; }));
}

TEST(MarchRay, SingleOpaqueSample) {
  RayCastConfig cfg;
  cfg.dt = 1.0;
  const auto r = march_ray(GridSource{ramp_grid()}, {{0, 0.5, 0.5}, {1, 0, 0}}, {0.0, 0.5},
                           constant_tf({0.2, 0.4, 0.6}, 1.0), cfg, {0.0, 1.0});
  EXPECT_DOUBLE_EQ(r.r, 0.2);
  EXPECT_DOUBLE_EQ(r.g, 0.4);
  EXPECT_DOUBLE_EQ(r.b, 0.6);
  EXPECT_DOUBLE_EQ(r.a, 1.0);
}

TEST(MarchRay, TwoSampleOverRecurrence) {
  RayCastConfig cfg;
  cfg.dt = 1.0;
  cfg.termination_alpha = 1.0;
  const TransferFunction tf({{0.0, {1, 0, 0}, 0.5}, {1.0, {0, 1, 0}, 1.0}}, 1.0);
  std::vector<double> trace;
  const auto r = march_ray(GridSource{ramp_grid()}, {{0, 0.5, 0.5}, {1, 0, 0}}, {0.0, 1.5}, tf,
                           cfg, {0.0, 1.0}, nullptr, &trace);
  EXPECT_NEAR(r.r, 0.5, 1e-15);
  EXPECT_NEAR(r.g, 0.5, 1e-15);
  EXPECT_NEAR(r.b, 0.0, 1e-15);
  EXPECT_NEAR(r.a, 1.0, 1e-15);
  ASSERT_EQ(trace.size(), 2u);
}

TEST(MarchRay, SamplesLieOnGlobalLatticeHalfOpen) {
  RayCastConfig cfg;
  cfg.dt = 0.25;
  cfg.termination_alpha = 1.0;
  RenderStats stats;
  std::vector<double> trace;
  // t in {0.25, 0.5, 0.75}; 1.0 is excluded by the half-open end
  march_ray(AnalyticSource{}, {{0, 0, 0}, {1, 0, 0}}, {0.2, 1.0}, constant_tf({1, 1, 1}, 0.1),
            cfg, {0.0, 1.0}, &stats, &trace);
  EXPECT_EQ(stats.samples, 3u);
  stats = {};
  march_ray(AnalyticSource{}, {{0, 0, 0}, {1, 0, 0}}, {0.25, 1.0}, constant_tf({1, 1, 1}, 0.1),
            cfg, {0.0, 1.0}, &stats, &trace);
  EXPECT_EQ(stats.samples, 3u);
}

TEST(MarchRay, EarlyTerminationStopsAtThreshold) {
  RayCastConfig cfg;
  cfg.dt = 0.01;
  cfg.termination_alpha = 0.9;
  std::vector<double> trace;
  march_ray(AnalyticSource{}, {{-1, 1, 1}, {1, 0, 0}}, {0.0, 8.0}, constant_tf({1, 1, 1}, 0.3, 0.01),
            cfg, {0.0, 1.0}, nullptr, &trace);
  ASSERT_FALSE(trace.empty());
  EXPECT_GE(trace.back(), 0.9);
  EXPECT_LT(trace[trace.size() - 2], 0.9);
}

TEST(MarchRay, AlphaIsMonotoneAndBounded) {
  std::mt19937_64 rng(11);
  std::normal_distribution<double> n(0.0, 1.0);
  RayCastConfig cfg;
  cfg.dt = 0.02;
  cfg.termination_alpha = 1.0;
  cfg.shading = Shading::blinn_phong;
  const TransferFunction tf = tf_preset("warm");
  std::size_t traced = 0;
  for (int i = 0; i < 100; ++i) {
    const Ray ray{testing::random_point(rng, {{-3, -3, -3}, {10, 10, 10}}),
                  normalize({n(rng), n(rng), n(rng)})};
    const auto hit = intersect_aabb(ray, kMarschnerLobbDomain);
    if (!hit) continue;
    std::vector<double> trace;
    march_ray(AnalyticSource{}, ray, *hit, tf, cfg, {0.0, 1.0}, nullptr, &trace);
    traced += trace.size();
    double prev = 0.0;
    for (double a : trace) {
      EXPECT_GE(a, prev);
      EXPECT_LE(a, 1.0 + 1e-9);
      prev = a;
    }
  }
  EXPECT_GT(traced, 1000u);
}

TEST(RenderBlock, PremultipliedChannelsBoundedByAlpha) {
  RayCastConfig cfg;
  cfg.dt = 0.05;
  cfg.shading = Shading::blinn_phong;
  const auto img = render_block(AnalyticSource{}, kMarschnerLobbDomain, ml_camera(32, 32),
                                tf_preset("warm"), cfg, {0.0, 1.0});
  for (std::size_t i = 0; i < img.pixel_count(); ++i) {
    const auto p = img.pixel(i);
    EXPECT_GE(p[3], 0.0f);
    EXPECT_LE(p[3], 1.0f);
    for (int c = 0; c < 3; ++c) EXPECT_LE(p[c], p[3] + 1e-6f);
  }
}

TEST(RenderBlock, StepRefinementConverges) {
  RayCastConfig cfg;
  cfg.termination_alpha = 1.0;
  const TransferFunction tf({{0.0, {0.2, 0.3, 1.0}, 0.0}, {1.0, {1.0, 0.8, 0.2}, 0.1}}, 0.01);
  const Camera cam = ml_camera(24, 24);
  std::vector<PartialImage> imgs;
  for (double dt : {0.008, 0.004, 0.002, 0.001}) {
    cfg.dt = dt;
    imgs.push_back(render_block(AnalyticSource{}, kMarschnerLobbDomain, cam, tf, cfg, {0.0, 1.0}));
  }
  const double d1 = max_abs_diff(imgs[0], imgs[1]);
  const double d2 = max_abs_diff(imgs[1], imgs[2]);
  const double d3 = max_abs_diff(imgs[2], imgs[3]);
  EXPECT_LT(d2, d1);
  EXPECT_LT(d3, d2);
}

TEST(RenderBlock, DegreeOneModelMatchesTrilinear) {
  auto grid = std::make_shared<const ScalarGrid3D>(
      generate_marschner_lobb({12, 10, 14}, {{0.5, 1.0, 0.0}, {3.0, 3.5, 2.5}}));
  EncodeConfig ec;
  ec.degree = 1;
  ec.ctrl_pts = grid->dims();
  auto model = std::make_shared<const MfaModel>(encode(*grid, ec).model);
  RayCastConfig cfg;
  cfg.dt = 0.01;
  cfg.shading = Shading::off;
  Camera cam = ml_camera(40, 40);
  cam.look_at = grid->bounds().center();
  cam.position = {7.0, -3.0, 5.0};
  const ValueRange range{grid->value_min(), grid->value_max()};
  const TransferFunction tf = tf_preset("warm");
  const auto a = render_block(MfaSource{model}, grid->bounds(), cam, tf, cfg, range);
  const auto b = render_block(GridSource{grid, Filter::trilinear}, grid->bounds(), cam, tf, cfg,
                              range);
  EXPECT_LE(max_abs_diff(a, b), 1e-6);
  double total = 0.0;
  for (float v : a.rgba) total += v;
  EXPECT_GT(total, 1.0);  // the comparison is not between two empty images
}

TEST(RenderBlock, ShadingOffMakesNoGradientQueries) {
  auto grid = std::make_shared<const ScalarGrid3D>(generate_marschner_lobb({17, 17, 17}));
  EncodeConfig ec;
  ec.ctrl_pts = Index3{9, 9, 9};
  auto model = std::make_shared<const MfaModel>(encode(*grid, ec).model);
  RayCastConfig cfg;
  cfg.dt = 0.05;
  const TransferFunction tf = tf_preset("warm");
  RenderStats off_stats;
  const auto a = render_block(MfaSource{model}, grid->bounds(), ml_camera(20, 20), tf, cfg,
                              {0.0, 1.0}, 0, &off_stats);
  EXPECT_GT(off_stats.value_queries, 0u);
  EXPECT_EQ(off_stats.gradient_queries, 0u);

  // lighting parameters are ignored entirely while shading is off
  RayCastConfig cfg2 = cfg;
  cfg2.phong = {0.9, 0.1, 0.9, 3.0, {1, 2, 3}};
  const auto b = render_block(MfaSource{model}, grid->bounds(), ml_camera(20, 20), tf, cfg2,
                              {0.0, 1.0});
  EXPECT_EQ(a.rgba, b.rgba);

  RenderStats on_stats;
  cfg.shading = Shading::blinn_phong;
  render_block(MfaSource{model}, grid->bounds(), ml_camera(20, 20), tf, cfg, {0.0, 1.0}, 0,
               &on_stats);
  EXPECT_EQ(on_stats.gradient_queries, on_stats.samples);
}

TEST(RenderBlock, ZeroGradientFallsBackToUnshadedColor) {
  auto grid = std::make_shared<const ScalarGrid3D>(
      make_grid({4, 4, 4}, kUnit, [](Vec3) { return 0.5; }));
  RayCastConfig cfg;
  cfg.dt = 0.05;
  const TransferFunction tf = constant_tf({0.3, 0.6, 0.9}, 0.2, 0.05);
  Camera cam = ml_camera(16, 16);
  cam.look_at = {0.5, 0.5, 0.5};
  cam.position = {3, -2, 2};
  const auto off = render_block(GridSource{grid}, kUnit, cam, tf, cfg, {0.0, 1.0});
  cfg.shading = Shading::blinn_phong;
  const auto on = render_block(GridSource{grid}, kUnit, cam, tf, cfg, {0.0, 1.0});
  EXPECT_EQ(off.rgba, on.rgba);
}

TEST(RenderBlock, ShadingChangesLitImage) {
  RayCastConfig cfg;
  cfg.dt = 0.05;
  const auto off = render_block(AnalyticSource{}, kMarschnerLobbDomain, ml_camera(16, 16),
                                tf_preset("spike"), cfg, {0.0, 1.0});
  cfg.shading = Shading::blinn_phong;
  const auto on = render_block(AnalyticSource{}, kMarschnerLobbDomain, ml_camera(16, 16),
                               tf_preset("spike"), cfg, {0.0, 1.0});
  EXPECT_GT(max_abs_diff(off, on), 1e-3);
}

TEST(RayCastConfig, Validation) {
  RayCastConfig c;
  c.dt = 0.0;
  EXPECT_THROW(c.validate(), ParameterError);
  c = {};
  c.termination_alpha = 0.0;
  EXPECT_THROW(c.validate(), ParameterError);
  c.termination_alpha = 1.0;
  EXPECT_NO_THROW(c.validate());
}

TEST(SceneIo, RoundTrip) {
  KvDocument doc;
  Camera cam = ml_camera(300, 200);
  cam.fov_deg = 33.3;
  RayCastConfig cfg;
  cfg.dt = 0.0125;
  cfg.shading = Shading::blinn_phong;
  cfg.phong.light_dir = {1, -1, 0.5};
  cfg.background = {0.1, 0.2, 0.3, 1.0};
  const TransferFunction tf = tf_preset("warm");
  write_camera(doc, cam);
  write_transfer_function(doc, tf);
  write_raycast_config(doc, cfg);
  const KvDocument back = KvDocument::parse(doc.to_string());
  EXPECT_EQ(read_camera(back), cam);
  EXPECT_EQ(read_transfer_function(back), tf);
  EXPECT_EQ(read_raycast_config(back), cfg);
}

TEST(SceneIo, PresetAndDefaults) {
  const KvDocument doc = KvDocument::parse("preset spike\ndt_ref 0.02\nwidth 64\n");
  EXPECT_EQ(read_transfer_function(doc).nodes(), tf_preset("spike").nodes());
  EXPECT_EQ(read_transfer_function(doc).dt_ref(), 0.02);
  const Camera c = read_camera(doc);
  EXPECT_EQ(c.width, 64);
  EXPECT_EQ(c.height, Camera{}.height);
  EXPECT_THROW(read_transfer_function(KvDocument::parse("dt 1\n")), ParameterError);
  EXPECT_THROW(read_transfer_function(KvDocument::parse("node 0 1 1\n")), ParameterError);
  EXPECT_THROW(read_raycast_config(KvDocument::parse("shading toon\n")), ParameterError);
}

}  // namespace
}  // namespace mfavis
