// Copyright 2026 The mfavis Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <optional>
#include <vector>

#include "mfavis/vec3.hpp"

namespace mfavis {

// Pinhole camera. fov is the vertical field of view in degrees; pixel (0,0) is
// the top-left corner of the image.
struct Camera {
  Vec3 position{0.0, 0.0, 5.0};
  Vec3 look_at{0.0, 0.0, 0.0};
  Vec3 up{0.0, 1.0, 0.0};
  double fov_deg = 45.0;
  int width = 768;
  int height = 768;

  void validate() const;  // CameraError
  friend bool operator==(const Camera&, const Camera&) = default;
};

struct Ray {
  Vec3 origin;
  Vec3 dir;  // unit length
};

// right = forward x up, up = right x forward. `right` points along image
// columns, `up` toward the top row.
struct CameraFrame {
  Vec3 origin;
  Vec3 forward;
  Vec3 right;
  Vec3 up;
  double half_h = 0.0;  // tan(fov / 2)
  double half_w = 0.0;  // half_h * width / height
  int width = 0;
  int height = 0;

  Ray ray(int px, int py) const;
};

CameraFrame make_frame(const Camera& camera);

/// One ray per pixel, row-major from the top-left.
std::vector<Ray> make_rays(const Camera& camera);

struct RayInterval {
  double t_near = 0.0;
  double t_far = 0.0;
};

// Slab test clipped to t >= 0. Faces are inclusive, so a ray grazing a face
// still hits it.
std::optional<RayInterval> intersect_aabb(const Ray& ray, const Aabb& box);

}  // namespace mfavis
