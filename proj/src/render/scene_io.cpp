// Copyright 2026 The mfavis Authors
// SPDX-License-Identifier: Apache-2.0

#include "mfavis/render/scene_io.hpp"

#include <string>

#include "mfavis/error.hpp"

namespace mfavis {

Camera read_camera(const KvDocument& doc, const Camera& defaults) {
  Camera c = defaults;
  c.position = doc.get_vec3("position", c.position);
  c.look_at = doc.get_vec3("look_at", c.look_at);
  c.up = doc.get_vec3("up", c.up);
  c.fov_deg = doc.get_double("fov", c.fov_deg);
  c.width = doc.get_int("width", c.width);
  c.height = doc.get_int("height", c.height);
  c.validate();
  return c;
}

void write_camera(KvDocument& doc, const Camera& c) {
  doc.set("position", format_vec3(c.position));
  doc.set("look_at", format_vec3(c.look_at));
  doc.set("up", format_vec3(c.up));
  doc.set("fov", format_double(c.fov_deg));
  doc.set("width", std::to_string(c.width));
  doc.set("height", std::to_string(c.height));
}

TransferFunction read_transfer_function(const KvDocument& doc) {
  const auto lines = doc.get_all("node");
  if (lines.empty()) {
    const auto preset = doc.find("preset");
    if (!preset) throw ParameterError("transfer function needs node lines or a preset");
    TransferFunction base = tf_preset(*preset);
    if (!doc.has("dt_ref")) return base;
    return TransferFunction(base.nodes(), doc.get_double("dt_ref"));
  }
  std::vector<TfNode> nodes;
  for (const auto& line : lines) {
    const auto v = parse_doubles(line);
    if (v.size() != 5) throw ParameterError("node needs value r g b opacity: '" + line + "'");
    nodes.push_back({v[0], {v[1], v[2], v[3]}, v[4]});
  }
  return TransferFunction(std::move(nodes), doc.get_double("dt_ref", 0.01));
}

void write_transfer_function(KvDocument& doc, const TransferFunction& tf) {
  doc.set("dt_ref", format_double(tf.dt_ref()));
  for (const auto& n : tf.nodes()) {
    doc.add("node", format_double(n.value) + " " + format_vec3(n.color) + " " +
                        format_double(n.opacity));
  }
}

RayCastConfig read_raycast_config(const KvDocument& doc, const RayCastConfig& defaults) {
  RayCastConfig c = defaults;
  c.dt = doc.get_double("dt", c.dt);
  c.termination_alpha = doc.get_double("termination_alpha", c.termination_alpha);
  if (auto s = doc.find("shading")) c.shading = parse_shading(*s);
  c.phong.ambient = doc.get_double("ambient", c.phong.ambient);
  c.phong.diffuse = doc.get_double("diffuse", c.phong.diffuse);
  c.phong.specular = doc.get_double("specular", c.phong.specular);
  c.phong.shininess = doc.get_double("shininess", c.phong.shininess);
  c.phong.light_dir = doc.get_vec3("light_dir", c.phong.light_dir);
  if (auto bg = doc.find("background")) {
    const auto v = parse_doubles(*bg);
    if (v.size() != 4) throw ParameterError("background needs r g b a");
    c.background = {v[0], v[1], v[2], v[3]};
  }
  c.validate();
  return c;
}

void write_raycast_config(KvDocument& doc, const RayCastConfig& c) {
  doc.set("dt", format_double(c.dt));
  doc.set("termination_alpha", format_double(c.termination_alpha));
  doc.set("shading", std::string(to_string(c.shading)));
  doc.set("ambient", format_double(c.phong.ambient));
  doc.set("diffuse", format_double(c.phong.diffuse));
  doc.set("specular", format_double(c.phong.specular));
  doc.set("shininess", format_double(c.phong.shininess));
  doc.set("light_dir", format_vec3(c.phong.light_dir));
  doc.set("background", format_double(c.background.r) + " " + format_double(c.background.g) +
                            " " + format_double(c.background.b) + " " +
                            format_double(c.background.a));
}

}  // namespace mfavis
