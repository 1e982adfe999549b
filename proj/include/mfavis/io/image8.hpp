// Copyright 2026 The mfavis Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

namespace mfavis {

// 8-bit RGB raster, row-major from the top-left.
struct Image8 {
  int width = 0;
  int height = 0;
  std::vector<std::uint8_t> rgb;

  Image8() = default;
  Image8(int w, int h)
      : width(w), height(h), rgb(3 * static_cast<std::size_t>(w) * static_cast<std::size_t>(h)) {}

  std::size_t pixel_count() const {
    return static_cast<std::size_t>(width) * static_cast<std::size_t>(height);
  }
  friend bool operator==(const Image8&, const Image8&) = default;
};

std::string encode_png(const Image8& image);
Image8 decode_png(const std::string& bytes);  // FormatError

void write_png(const Image8& image, const std::filesystem::path& path);  // IoError
Image8 read_png(const std::filesystem::path& path);                      // IoError, FormatError

}  // namespace mfavis
