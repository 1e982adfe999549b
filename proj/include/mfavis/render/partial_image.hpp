// Copyright 2026 The mfavis Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace mfavis {

// Premultiplied RGBA floats, row-major from the top-left, 4 floats per pixel.
struct PartialImage {
  int width = 0;
  int height = 0;
  std::vector<float> rgba;
  int block_id = -1;
  int order_key = 0;  // visibility rank of the source block, 0 = front

  PartialImage() = default;
  PartialImage(int w, int h) : width(w), height(h), rgba(4 * pixel_count(), 0.0f) {}

  std::size_t pixel_count() const {
    return static_cast<std::size_t>(width) * static_cast<std::size_t>(height);
  }
  std::span<float, 4> pixel(std::size_t i) { return std::span<float, 4>(rgba.data() + 4 * i, 4); }
  std::span<const float, 4> pixel(std::size_t i) const {
    return std::span<const float, 4>(rgba.data() + 4 * i, 4);
  }
};

}  // namespace mfavis
