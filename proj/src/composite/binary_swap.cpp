// Copyright 2026 The mfavis Authors
// SPDX-License-Identifier: Apache-2.0

#include "mfavis/composite/binary_swap.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <string>
#include <thread>

#include "mfavis/composite/over.hpp"
#include "mfavis/error.hpp"

namespace mfavis {

namespace {

bool is_power_of_two(int n) { return n > 0 && (n & (n - 1)) == 0; }

int group_rank(const std::vector<int>& worker_rank, int worker, int round) {
  const int size = 1 << round;
  const int base = worker & ~(size - 1);
  int r = worker_rank[static_cast<std::size_t>(base)];
  for (int w = base + 1; w < base + size; ++w) r = std::min(r, worker_rank[static_cast<std::size_t>(w)]);
  return r;
}

}  // namespace

std::size_t padded_pixel_count(std::size_t pixels, int n_workers) {
  const std::size_t n = static_cast<std::size_t>(n_workers);
  return (pixels + n - 1) / n * n;
}

OwnedRange binary_swap_worker(Comm& comm, int n_workers, const PartialImage& partial,
                              const std::vector<int>& worker_rank) {
  if (!is_power_of_two(n_workers)) throw ParameterError("worker count must be a power of two");
  if (worker_rank.size() != static_cast<std::size_t>(n_workers)) {
    throw ParameterError("one visibility rank per worker required");
  }
  const int self = comm.self();
  const std::size_t padded = padded_pixel_count(partial.pixel_count(), n_workers);
  std::vector<float> buf(4 * padded, 0.0f);
  std::copy(partial.rgba.begin(), partial.rgba.end(), buf.begin());

  std::size_t begin = 0, end = padded;
  for (int round = 0; (1 << round) < n_workers; ++round) {
    const int partner = self ^ (1 << round);
    const std::size_t mid = begin + (end - begin) / 2;
    const bool keep_low = (self & (1 << round)) == 0;
    const std::size_t kb = keep_low ? begin : mid, ke = keep_low ? mid : end;
    const std::size_t sb = keep_low ? mid : begin, se = keep_low ? end : mid;

    const std::span<const float> outgoing(buf.data() + 4 * sb, 4 * (se - sb));
    const std::vector<float> incoming = comm.exchange(partner, round, outgoing);
    if (incoming.size() != 4 * (ke - kb)) {
      throw PipelineError("worker " + std::to_string(self) + " round " + std::to_string(round) +
                          ": received " + std::to_string(incoming.size()) + " floats, expected " +
                          std::to_string(4 * (ke - kb)));
    }
    const std::span<float> kept(buf.data() + 4 * kb, 4 * (ke - kb));
    if (group_rank(worker_rank, self, round) < group_rank(worker_rank, partner, round)) {
      over_onto(kept, incoming);
    } else {
      over_under(kept, incoming);
    }
    begin = kb;
    end = ke;
  }
  OwnedRange out;
  out.worker = self;
  out.begin = begin;
  out.end = end;
  out.rgba.assign(buf.begin() + 4 * begin, buf.begin() + 4 * end);
  return out;
}

std::vector<OwnedRange> binary_swap(const std::vector<PartialImage>& partials,
                                    const std::vector<int>& worker_rank, MemoryNetwork* network,
                                    std::vector<std::vector<std::size_t>>* bytes_per_round) {
  const int n = static_cast<int>(partials.size());
  if (!is_power_of_two(n)) throw ParameterError("worker count must be a power of two");
  for (const auto& p : partials) {
    if (p.width != partials[0].width || p.height != partials[0].height) {
      throw ParameterError("partial images differ in size");
    }
  }
  MemoryNetwork local(n);
  MemoryNetwork& net = network ? *network : local;
  if (net.size() != n) throw ParameterError("network size does not match worker count");

  std::vector<OwnedRange> out(static_cast<std::size_t>(n));
  std::vector<std::exception_ptr> errors(static_cast<std::size_t>(n));
  std::vector<std::unique_ptr<Comm>> comms;
  for (int w = 0; w < n; ++w) comms.push_back(net.endpoint(w));
  {
    std::vector<std::jthread> threads;
    for (int w = 0; w < n; ++w) {
      threads.emplace_back([&, w] {
        const std::size_t i = static_cast<std::size_t>(w);
        try {
          out[i] = binary_swap_worker(*comms[i], n, partials[i], worker_rank);
        } catch (const std::exception& e) {
          errors[i] = std::current_exception();
          net.abort(e.what());
        }
      });
    }
  }
  for (const auto& e : errors) {
    if (!e) continue;
    // the first recorded reason names the worker and round that broke
    if (auto reason = net.abort_reason()) throw PipelineError(*reason);
    std::rethrow_exception(e);
  }
  if (bytes_per_round) {
    bytes_per_round->clear();
    for (const auto& c : comms) bytes_per_round->push_back(c->bytes_per_round());
  }
  return out;
}

PartialImage assemble(const std::vector<OwnedRange>& ranges, int width, int height) {
  if (ranges.empty()) throw PipelineError("merge: no pixel ranges");
  PartialImage img(width, height);
  const std::size_t total = img.pixel_count();
  std::vector<const OwnedRange*> sorted;
  for (const auto& r : ranges) sorted.push_back(&r);
  std::sort(sorted.begin(), sorted.end(),
            [](const OwnedRange* a, const OwnedRange* b) { return a->begin < b->begin; });
  std::size_t cursor = 0;
  for (const OwnedRange* r : sorted) {
    if (r->begin != cursor) {
      throw PipelineError(r->begin > cursor ? "merge: pixel ranges leave a gap at " + std::to_string(cursor)
                                            : "merge: pixel ranges overlap at " + std::to_string(r->begin));
    }
    if (r->end < r->begin || r->rgba.size() != 4 * (r->end - r->begin)) {
      throw PipelineError("merge: range from worker " + std::to_string(r->worker) + " is malformed");
    }
    const std::size_t stop = std::min(r->end, total);
    if (stop > r->begin) {
      std::copy_n(r->rgba.begin(), 4 * (stop - r->begin), img.rgba.begin() + 4 * r->begin);
    }
    cursor = r->end;
  }
  if (cursor < total || cursor != padded_pixel_count(total, static_cast<int>(ranges.size()))) {
    throw PipelineError("merge: pixel ranges do not cover the image");
  }
  return img;
}

Image8 to_image8(const PartialImage& img, const Rgba& bg) {
  Image8 out(img.width, img.height);
  const double bgc[3] = {bg.r * bg.a, bg.g * bg.a, bg.b * bg.a};
  for (std::size_t i = 0; i < img.pixel_count(); ++i) {
    const auto p = img.pixel(i);
    const double t = 1.0 - static_cast<double>(p[3]);
    for (int c = 0; c < 3; ++c) {
      const double v = std::clamp(static_cast<double>(p[c]) + t * bgc[c], 0.0, 1.0);
      out.rgb[3 * i + c] = static_cast<std::uint8_t>(std::floor(v * 255.0 + 0.5));
    }
  }
  return out;
}

Image8 merge(const std::vector<OwnedRange>& ranges, int width, int height, const Rgba& background) {
  return to_image8(assemble(ranges, width, height), background);
}

}  // namespace mfavis
