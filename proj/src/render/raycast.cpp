// Copyright 2026 The mfavis Authors
// SPDX-License-Identifier: Apache-2.0

#include "mfavis/render/raycast.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "mfavis/error.hpp"

namespace mfavis {

std::string_view to_string(Shading s) { return s == Shading::off ? "off" : "blinn_phong"; }

Shading parse_shading(std::string_view name) {
  if (name == "off") return Shading::off;
  if (name == "blinn_phong") return Shading::blinn_phong;
  throw ParameterError("unknown shading '" + std::string(name) + "'");
}

void RayCastConfig::validate() const {
  if (!(dt > 0.0) || !std::isfinite(dt)) throw ParameterError("dt must be positive");
  if (!(termination_alpha > 0.0 && termination_alpha <= 1.0)) {
    throw ParameterError("termination alpha must lie in (0, 1]");
  }
  for (double c : {background.r, background.g, background.b, background.a}) {
    if (!(c >= 0.0 && c <= 1.0)) throw ParameterError("background channels must lie in [0, 1]");
  }
  if (shading == Shading::blinn_phong && !(phong.shininess >= 0.0)) {
    throw ParameterError("shininess must be nonnegative");
  }
}

double opacity_correct(double alpha, double dt, double dt_ref) {
  if (alpha >= 1.0) return 1.0;
  return 1.0 - std::pow(1.0 - alpha, dt / dt_ref);
}

namespace {

Vec3 shade(Vec3 color, Vec3 gradient, Vec3 ray_dir, const BlinnPhong& bp, double zero_tol) {
  const double g = norm(gradient);
  if (!(g > zero_tol)) return color;
  const Vec3 n = gradient * (-1.0 / g);
  const Vec3 v = -ray_dir;
  const Vec3 l = norm(bp.light_dir) > 0.0 ? normalize(bp.light_dir) : v;
  const Vec3 hsum = l + v;
  const double hn = norm(hsum);
  const double diff = std::max(0.0, dot(n, l));
  const double spec = hn > 0.0 ? std::pow(std::max(0.0, dot(n, hsum / hn)), bp.shininess) : 0.0;
  const double k = bp.ambient + bp.diffuse * diff;
  const double s = bp.specular * spec;
  return {std::clamp(color.x * k + s, 0.0, 1.0), std::clamp(color.y * k + s, 0.0, 1.0),
          std::clamp(color.z * k + s, 0.0, 1.0)};
}

template <typename Source>
RayResult march(const Source& src, const Ray& ray, RayInterval span, const TransferFunction& tf,
                const RayCastConfig& cfg, ValueRange range, RenderStats* stats,
                std::vector<double>* alpha_trace) {
  RayResult out;
  const double dt = cfg.dt;
  const bool shading = cfg.shading == Shading::blinn_phong;
  const double zero_tol = 1e-12 * (range.max - range.min);
  std::int64_t k = static_cast<std::int64_t>(std::ceil(span.t_near / dt));
  std::uint64_t n_samples = 0;
  for (;; ++k) {
    const double t = static_cast<double>(k) * dt;
    if (!(t < span.t_far)) break;
    if (t < span.t_near) continue;
    const Vec3 p = ray.origin + ray.dir * t;
    ++n_samples;
    Rgba c;
    if (shading) {
      const ValueGradient vg = eval_value_gradient(src, p);
      c = tf.lookup(range.normalize(vg.value));
      if (c.a > 0.0) {
        const Vec3 s = shade({c.r, c.g, c.b}, vg.gradient, ray.dir, cfg.phong, zero_tol);
        c.r = s.x;
        c.g = s.y;
        c.b = s.z;
      }
    } else {
      c = tf.lookup(range.normalize(eval_value(src, p)));
    }
    const double a = opacity_correct(c.a, dt, tf.dt_ref());
    const double w = (1.0 - out.a) * a;
    out.r += w * c.r;
    out.g += w * c.g;
    out.b += w * c.b;
    out.a += w;
    if (alpha_trace) alpha_trace->push_back(out.a);
    if (out.a >= cfg.termination_alpha) break;
  }
  if (stats) {
    stats->samples += n_samples;
    stats->value_queries += n_samples;
    if (shading) stats->gradient_queries += n_samples;
  }
  return out;
}

}  // namespace

RayResult march_ray(const RenderSource& src, const Ray& ray, RayInterval span,
                    const TransferFunction& tf, const RayCastConfig& cfg, ValueRange range,
                    RenderStats* stats, std::vector<double>* alpha_trace) {
  cfg.validate();
  return std::visit(
      [&](const auto& s) { return march(s, ray, span, tf, cfg, range, stats, alpha_trace); },
      src);
}

PartialImage render_block(const RenderSource& src, const Aabb& bounds, const Camera& camera,
                          const TransferFunction& tf, const RayCastConfig& cfg, ValueRange range,
                          int block_id, RenderStats* stats) {
  cfg.validate();
  const CameraFrame frame = make_frame(camera);
  PartialImage img(camera.width, camera.height);
  img.block_id = block_id;
  std::visit(
      [&](const auto& s) {
        for (int py = 0; py < frame.height; ++py) {
          for (int px = 0; px < frame.width; ++px) {
            const Ray ray = frame.ray(px, py);
            const auto hit = intersect_aabb(ray, bounds);
            if (!hit) continue;
            const RayResult r = march(s, ray, *hit, tf, cfg, range, stats, nullptr);
            auto pix = img.pixel(static_cast<std::size_t>(py) * frame.width + px);
            pix[0] = static_cast<float>(r.r);
            pix[1] = static_cast<float>(r.g);
            pix[2] = static_cast<float>(r.b);
            pix[3] = static_cast<float>(r.a);
          }
        }
      },
      src);
  return img;
}

}  // namespace mfavis
