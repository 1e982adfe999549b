// Copyright 2026 The mfavis Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <filesystem>
#include <optional>
#include <string_view>

#include "mfavis/field/grid.hpp"

namespace mfavis {

enum class RawType { f32, f64, u8 };

std::string_view to_string(RawType type);
RawType parse_raw_type(std::string_view name);
std::size_t element_size(RawType type);

// Contents of the `<volume>.meta` sidecar written next to every raw volume.
struct VolumeMeta {
  Index3 dims{};
  RawType dtype = RawType::f32;
  Aabb domain;
  std::optional<double> value_min;
  std::optional<double> value_max;
};

// Headerless little-endian samples, x fastest. u8 samples widen to 0..255.
ScalarGrid3D load_raw(const std::filesystem::path& path, Index3 dims, RawType dtype,
                      const Aabb& domain);
void save_raw(const ScalarGrid3D& grid, const std::filesystem::path& path, RawType dtype);

std::filesystem::path sidecar_path(const std::filesystem::path& raw_path);
VolumeMeta read_sidecar(const std::filesystem::path& raw_path);
void write_sidecar(const std::filesystem::path& raw_path, const VolumeMeta& meta);

/// Raw file plus sidecar.
void save_volume(const ScalarGrid3D& grid, const std::filesystem::path& path,
                 RawType dtype = RawType::f32);
ScalarGrid3D load_volume(const std::filesystem::path& path);

/// Reads only the inclusive index box [lo, hi] of a raw volume.
ScalarGrid3D load_raw_block(const std::filesystem::path& path, const VolumeMeta& meta, Index3 lo,
                            Index3 hi);

}  // namespace mfavis
