// Copyright 2026 The mfavis Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include "mfavis/io/kv_document.hpp"
#include "mfavis/render/camera.hpp"
#include "mfavis/render/raycast.hpp"
#include "mfavis/render/transfer_function.hpp"

namespace mfavis {

// Scene documents (see docs/scene-format.md). Camera, transfer function and
// ray-cast settings use disjoint keys, so they may live in one file or three.
//
//   position 10 -8 12         look_at 3.5 3.5 3.5      up 0 0 1
//   fov 35                    width 768                height 768
//   dt_ref 0.01
//   node <value> <r> <g> <b> <opacity>     (repeat, sorted by value)
//   preset warm                            (instead of node lines)
//   dt 0.01   termination_alpha 0.99   shading blinn_phong
//   ambient 0.35  diffuse 0.6  specular 0.25  shininess 24  light_dir 0 0 0
//   background 0 0 0 1
//
// Missing keys take the struct defaults.

Camera read_camera(const KvDocument& doc, const Camera& defaults = {});
void write_camera(KvDocument& doc, const Camera& camera);

TransferFunction read_transfer_function(const KvDocument& doc);
void write_transfer_function(KvDocument& doc, const TransferFunction& tf);

RayCastConfig read_raycast_config(const KvDocument& doc, const RayCastConfig& defaults = {});
void write_raycast_config(KvDocument& doc, const RayCastConfig& cfg);

}  // namespace mfavis
