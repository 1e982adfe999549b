// Copyright 2026 The mfavis Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <filesystem>
#include <vector>

#include "mfavis/mfa/model.hpp"

namespace mfavis {

// Binary model file, little-endian:
//   "MFA1" | u32 version (1) | u8 degree x3 | u32 n_ctrl x3 | u32 source_dims x3
//   | f64 domain_min x3 | f64 domain_max x3 | f64 e_max_achieved
//   | per axis: u32 knot count, f64 knots | f64 control points (x fastest)
inline constexpr std::size_t kModelHeaderBytes = 4 + 4 + 3 + 12 + 12 + 24 + 24 + 8;

std::vector<std::byte> serialize_model(const MfaModel& model);
MfaModel deserialize_model(std::span<const std::byte> bytes);

void save_model(const MfaModel& model, const std::filesystem::path& path);
MfaModel load_model(const std::filesystem::path& path);

/// Exact size in bytes of the serialized model.
std::size_t model_file_size(const MfaModel& model);

}  // namespace mfavis
