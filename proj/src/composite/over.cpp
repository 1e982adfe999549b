// Copyright 2026 The mfavis Authors
// SPDX-License-Identifier: Apache-2.0

#include "mfavis/composite/over.hpp"

#include <algorithm>
#include <string>

#include "mfavis/error.hpp"

namespace mfavis {

void over_under(std::span<float> dst, std::span<const float> front) {
  if (dst.size() != front.size()) throw ParameterError("over: pixel span sizes differ");
  for (std::size_t i = 0; i < dst.size(); i += 4) {
    const float t = 1.0f - front[i + 3];
    for (int c = 0; c < 4; ++c) dst[i + c] = front[i + c] + t * dst[i + c];
  }
}

void over_onto(std::span<float> dst, std::span<const float> back) {
  if (dst.size() != back.size()) throw ParameterError("over: pixel span sizes differ");
  for (std::size_t i = 0; i < dst.size(); i += 4) {
    const float t = 1.0f - dst[i + 3];
    for (int c = 0; c < 4; ++c) dst[i + c] = dst[i + c] + t * back[i + c];
  }
}

PartialImage over_images(const PartialImage& front, const PartialImage& back) {
  if (front.width != back.width || front.height != back.height) {
    throw ParameterError("over: image sizes differ (" + std::to_string(front.width) + "x" +
                         std::to_string(front.height) + " vs " + std::to_string(back.width) +
                         "x" + std::to_string(back.height) + ")");
  }
  PartialImage out = front;
  over_onto(out.rgba, back.rgba);
  out.order_key = std::min(front.order_key, back.order_key);
  return out;
}

PartialImage composite_serial(const std::vector<PartialImage>& partials,
                              const std::vector<int>& order) {
  if (order.empty()) throw ParameterError("composite of zero images");
  PartialImage acc = partials.at(static_cast<std::size_t>(order[0]));
  for (std::size_t i = 1; i < order.size(); ++i) {
    acc = over_images(acc, partials.at(static_cast<std::size_t>(order[i])));
  }
  return acc;
}

}  // namespace mfavis
