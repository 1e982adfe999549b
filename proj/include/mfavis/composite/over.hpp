// Copyright 2026 The mfavis Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <span>
#include <vector>

#include "mfavis/render/partial_image.hpp"

namespace mfavis {

// Premultiplied over, per pixel: C = Cf + (1 - Af) Cb, A = Af + (1 - Af) Ab.
PartialImage over_images(const PartialImage& front, const PartialImage& back);

// In-place span versions used by the swap: dst = src over dst, dst = dst over src.
void over_under(std::span<float> dst, std::span<const float> front);
void over_onto(std::span<float> dst, std::span<const float> back);

// Folds partials front to back in the given order.
PartialImage composite_serial(const std::vector<PartialImage>& partials,
                              const std::vector<int>& order);

}  // namespace mfavis
