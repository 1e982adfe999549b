// Copyright 2026 The mfavis Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <filesystem>
#include <functional>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include "mfavis/field/filters.hpp"
#include "mfavis/field/partition.hpp"
#include "mfavis/io/kv_document.hpp"
#include "mfavis/mfa/encode.hpp"
#include "mfavis/render/raycast.hpp"
#include "mfavis/render/source.hpp"

namespace mfavis {

struct BlockSummary {
  int id = 0;
  Index3 n_ctrl{};
  double e_max_achieved = 0.0;
  double compression_ratio = 0.0;
  bool capped = false;
};

// `dataset.meta` in an encoded model directory, next to block_<id>.mfa files.
struct DatasetManifest {
  std::string name;
  int levels = 0;
  Index3 grid_dims{};
  Aabb domain;
  ValueRange range;
  int degree = 2;
  int overlap = 0;
  std::vector<BlockSummary> blocks;
};

inline constexpr const char* kManifestFile = "dataset.meta";

std::filesystem::path block_model_path(const std::filesystem::path& dir, int block_id);
void write_manifest(const std::filesystem::path& dir, const DatasetManifest& m);
DatasetManifest read_manifest(const std::filesystem::path& dir);  // IoError, FormatError

// Each block is fitted to the samples it reads widened by `overlap` samples
// past every internal face, then decoded only inside its own bounds. Spline
// end effects decay by about 0.17 per sample for degree 2, so 4 samples keep
// them near 1e-3 of the value range at the seams.
//
// Control points per block: explicit counts, or nullopt for "match", which
// interpolates every fitted sample.
struct DatasetEncodeOptions {
  int levels = 0;
  EncodeConfig encode;  // ctrl_pts / source_dims are filled per block
  std::optional<Index3> ctrl;
  int overlap = 4;
  int threads = 0;      // 0 = hardware concurrency
  std::string name = "dataset";
};

// Partitions, encodes blocks concurrently, and writes models plus manifest.
// Failures name the block.
// Sample range block `b` is fitted to.
std::pair<Index3, Index3> fit_range(const Block& b, Index3 grid_dims, int overlap);

DatasetManifest encode_dataset(const ScalarGrid3D& grid, const DatasetEncodeOptions& opt,
                               const std::filesystem::path& out_dir);

// A partitioned data source for the pipeline. fetch() performs the block's
// I/O; a resident dataset keeps fetched blocks in memory and later calls
// return the cached copy without touching storage.
class Dataset {
 public:
  using Fetch = std::function<RenderSource(const Block&)>;

  Dataset(std::string name, BlockDecomposition decomp, ValueRange range, Fetch fetch,
          bool resident = false);

  const std::string& name() const { return name_; }
  const BlockDecomposition& decomposition() const { return decomp_; }
  const ValueRange& range() const { return range_; }
  int block_count() const { return decomp_.block_count(); }
  bool resident() const { return resident_; }

  /// `fetched` reports whether storage was read.
  RenderSource source(int block_id, bool* fetched = nullptr);

 private:
  std::string name_;
  BlockDecomposition decomp_;
  ValueRange range_;
  Fetch fetch_;
  bool resident_;
  std::unique_ptr<std::mutex> mu_;
  std::vector<std::optional<RenderSource>> cache_;
};

Dataset open_model_dataset(const std::filesystem::path& dir, bool resident = false);

// Raw volume plus sidecar; each block reads only its own sample box.
Dataset open_raw_dataset(const std::filesystem::path& raw_path, int levels, Filter filter,
                         bool resident = false);

Dataset grid_dataset(std::shared_ptr<const ScalarGrid3D> grid, int levels, Filter filter);
Dataset model_dataset(std::string name, BlockDecomposition decomp,
                      std::vector<std::shared_ptr<const MfaModel>> models, ValueRange range);
Dataset analytic_dataset(const MarschnerLobb& field, const Aabb& domain, int levels,
                         ValueRange range = {0.0, 1.0});

}  // namespace mfavis
