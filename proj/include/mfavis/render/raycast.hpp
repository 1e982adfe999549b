// Copyright 2026 The mfavis Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <string_view>
#include <vector>

#include "mfavis/render/camera.hpp"
#include "mfavis/render/partial_image.hpp"
#include "mfavis/render/source.hpp"
#include "mfavis/render/transfer_function.hpp"

namespace mfavis {

enum class Shading { off, blinn_phong };

std::string_view to_string(Shading s);
Shading parse_shading(std::string_view name);

struct BlinnPhong {
  double ambient = 0.35;
  double diffuse = 0.6;
  double specular = 0.25;
  double shininess = 24.0;
  Vec3 light_dir{};  // toward the light; zero means a headlight along each ray
  friend bool operator==(const BlinnPhong&, const BlinnPhong&) = default;
};

struct RayCastConfig {
  double dt = 0.01;  // world units
  double termination_alpha = 0.99;
  Shading shading = Shading::off;
  BlinnPhong phong;
  Rgba background{0.0, 0.0, 0.0, 1.0};

  void validate() const;  // ParameterError
  friend bool operator==(const RayCastConfig&, const RayCastConfig&) = default;
};

// Dataset-wide range the transfer function is addressed with.
struct ValueRange {
  double min = 0.0;
  double max = 1.0;
  double normalize(double v) const { return max > min ? (v - min) / (max - min) : 0.0; }
};

double opacity_correct(double alpha, double dt, double dt_ref);

struct RenderStats {
  std::uint64_t samples = 0;
  std::uint64_t value_queries = 0;
  std::uint64_t gradient_queries = 0;
};

struct RayResult {
  double r = 0.0, g = 0.0, b = 0.0, a = 0.0;  // premultiplied
};

// Marches samples t = k * dt with t_near <= t < t_far. Using one global
// lattice of t values means neighbouring blocks and a monolithic render see
// exactly the same sample positions. `alpha_trace`, when given, receives the
// accumulated alpha after every sample.
RayResult march_ray(const RenderSource& src, const Ray& ray, RayInterval span,
                    const TransferFunction& tf, const RayCastConfig& cfg, ValueRange range,
                    RenderStats* stats = nullptr, std::vector<double>* alpha_trace = nullptr);

// Background is not applied here; see merge().
PartialImage render_block(const RenderSource& src, const Aabb& bounds, const Camera& camera,
                          const TransferFunction& tf, const RayCastConfig& cfg, ValueRange range,
                          int block_id = 0, RenderStats* stats = nullptr);

}  // namespace mfavis
