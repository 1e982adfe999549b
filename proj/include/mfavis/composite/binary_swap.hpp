// Copyright 2026 The mfavis Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <vector>

#include "mfavis/composite/comm.hpp"
#include "mfavis/io/image8.hpp"
#include "mfavis/render/partial_image.hpp"
#include "mfavis/render/transfer_function.hpp"

namespace mfavis {

// Pixels [begin, end) of the linearised (scanline) image, padded so the count
// divides evenly by the worker count; rgba holds 4 floats per owned pixel.
struct OwnedRange {
  int worker = 0;
  std::size_t begin = 0;
  std::size_t end = 0;
  std::vector<float> rgba;
};

std::size_t padded_pixel_count(std::size_t pixels, int n_workers);

// One worker's half of the schedule. In round k the worker pairs with
// self ^ (1 << k); the worker whose bit k is clear keeps the lower half of
// the current range. `worker_rank[w]` is the visibility rank of w's data;
// a group's rank is the minimum over its members.
OwnedRange binary_swap_worker(Comm& comm, int n_workers, const PartialImage& partial,
                              const std::vector<int>& worker_rank);

// Runs every worker on its own thread over in-memory channels. `network`
// may be supplied to inject failures; `bytes_per_round`, when given,
// receives per worker the bytes it sent in each round.
std::vector<OwnedRange> binary_swap(const std::vector<PartialImage>& partials,
                                    const std::vector<int>& worker_rank,
                                    MemoryNetwork* network = nullptr,
                                    std::vector<std::vector<std::size_t>>* bytes_per_round = nullptr);

// Concatenates owned ranges into a width x height image, dropping padding.
// Ranges must partition [0, padded_pixel_count) exactly.
PartialImage assemble(const std::vector<OwnedRange>& ranges, int width, int height);

// Composites over the background and quantizes each channel with
// round-half-up: q = floor(255 v + 0.5).
Image8 to_image8(const PartialImage& composited, const Rgba& background);

Image8 merge(const std::vector<OwnedRange>& ranges, int width, int height, const Rgba& background);

}  // namespace mfavis
