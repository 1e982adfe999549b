// Copyright 2026 The mfavis Authors
// SPDX-License-Identifier: Apache-2.0

#include "mfavis/render/camera.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "mfavis/error.hpp"

namespace mfavis {

void Camera::validate() const {
  if (!(fov_deg > 0.0 && fov_deg < 180.0)) throw CameraError("fov must lie in (0, 180) degrees");
  if (width < 1 || height < 1) throw CameraError("image size must be at least 1x1");
  const Vec3 f = look_at - position;
  if (!(norm(f) > 0.0)) throw CameraError("camera position equals look_at");
  if (!(norm(up) > 0.0)) throw CameraError("up vector is zero");
  const Vec3 fn = normalize(f);
  if (norm(cross(fn, normalize(up))) < 1e-9) throw CameraError("up is parallel to the view direction");
}

CameraFrame make_frame(const Camera& camera) {
  camera.validate();
  CameraFrame fr;
  fr.origin = camera.position;
  fr.forward = normalize(camera.look_at - camera.position);
  fr.right = normalize(cross(fr.forward, camera.up));
  fr.up = cross(fr.right, fr.forward);
  fr.half_h = std::tan(camera.fov_deg * std::numbers::pi / 360.0);
  fr.half_w = fr.half_h * camera.width / camera.height;
  fr.width = camera.width;
  fr.height = camera.height;
  return fr;
}

Ray CameraFrame::ray(int px, int py) const {
  const double sx = (2.0 * (px + 0.5) / width - 1.0) * half_w;
  const double sy = (1.0 - 2.0 * (py + 0.5) / height) * half_h;
  return {origin, normalize(forward + right * sx + up * sy)};
}

std::vector<Ray> make_rays(const Camera& camera) {
  const CameraFrame fr = make_frame(camera);
  std::vector<Ray> rays;
  rays.reserve(static_cast<std::size_t>(fr.width) * fr.height);
  for (int py = 0; py < fr.height; ++py) {
    for (int px = 0; px < fr.width; ++px) rays.push_back(fr.ray(px, py));
  }
  return rays;
}

std::optional<RayInterval> intersect_aabb(const Ray& ray, const Aabb& box) {
  double t0 = 0.0;
  double t1 = std::numeric_limits<double>::infinity();
  for (int a = 0; a < 3; ++a) {
    const double o = ray.origin[a];
    const double d = ray.dir[a];
    if (d == 0.0) {
      // parallel to this slab: either always inside it or never
      if (o < box.lo[a] || o > box.hi[a]) return std::nullopt;
      continue;
    }
    double ta = (box.lo[a] - o) / d;
    double tb = (box.hi[a] - o) / d;
    if (ta > tb) std::swap(ta, tb);
    t0 = std::max(t0, ta);
    t1 = std::min(t1, tb);
    if (t0 > t1) return std::nullopt;
  }
  return RayInterval{t0, t1};
}

}  // namespace mfavis
