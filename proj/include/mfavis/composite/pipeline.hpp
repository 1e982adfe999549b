// Copyright 2026 The mfavis Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <functional>
#include <ostream>
#include <vector>

#include "mfavis/composite/dataset.hpp"
#include "mfavis/io/image8.hpp"
#include "mfavis/render/camera.hpp"
#include "mfavis/render/partial_image.hpp"
#include "mfavis/render/raycast.hpp"

namespace mfavis {

// fetch and render are maxima over workers; composite and merge are wall
// time; total is their sum.
struct StageTimings {
  double fetch = 0.0;
  double render = 0.0;
  double composite = 0.0;
  double merge = 0.0;
  double total = 0.0;

  void finish() { total = fetch + render + composite + merge; }
};

struct WorkerReport {
  int worker = 0;
  std::vector<int> blocks;
  double fetch_s = 0.0;
  double render_s = 0.0;
  bool fetched = true;
};

struct PipelineOptions {
  int n_workers = 1;
  // One OS process per worker, exchanging pixels over socket pairs.
  bool process_mode = false;
  // Workers allowed to fetch or render at the same time; 0 = hardware
  // concurrency. Stage times are measured while holding a slot, so they
  // reflect each worker's own work rather than time-slicing on a small host.
  int slots = 0;
};

struct PipelineResult {
  Image8 image;
  PartialImage composited;  // before background and quantisation
  StageTimings timings;
  std::vector<WorkerReport> workers;
};

// Worker w renders blocks [w*m, (w+1)*m) with m = blocks / n_workers (a
// subtree of the bisection, since block ids are tree paths), composites them
// front to back, then all workers binary-swap and the master merges.
PipelineResult run_pipeline(Dataset& dataset, const Camera& camera, const TransferFunction& tf,
                            const RayCastConfig& cfg, const PipelineOptions& opt);

struct BenchRow {
  int n_workers = 0;
  StageTimings timings;
};

// For each worker count runs `repeats` times and keeps the run with the
// median total, so every row's total is its own stage sum.
std::vector<BenchRow> run_bench(const std::function<Dataset&(int n_workers)>& dataset_for,
                                const Camera& camera, const TransferFunction& tf,
                                const RayCastConfig& cfg, const std::vector<int>& worker_counts,
                                int repeats, const PipelineOptions& base);

void write_bench_header(std::ostream& out);
void write_bench_row(std::ostream& out, const BenchRow& row);

}  // namespace mfavis
