// Copyright 2026 The mfavis Authors
// SPDX-License-Identifier: Apache-2.0

#include "mfavis/composite/dataset.hpp"

#include <algorithm>
#include <atomic>
#include <exception>
#include <thread>

#include "mfavis/error.hpp"
#include "mfavis/io/raw_volume.hpp"
#include "mfavis/mfa/model_io.hpp"

namespace mfavis {

namespace fs = std::filesystem;

fs::path block_model_path(const fs::path& dir, int block_id) {
  return dir / ("block_" + std::to_string(block_id) + ".mfa");
}

void write_manifest(const fs::path& dir, const DatasetManifest& m) {
  KvDocument doc;
  doc.add("format", "mfavis-dataset 1");
  doc.add("name", m.name);
  doc.add("levels", std::to_string(m.levels));
  doc.add("grid_dims", format_index3(m.grid_dims));
  doc.add("domain_min", format_vec3(m.domain.lo));
  doc.add("domain_max", format_vec3(m.domain.hi));
  doc.add("value_min", format_double(m.range.min));
  doc.add("value_max", format_double(m.range.max));
  doc.add("degree", std::to_string(m.degree));
  doc.add("overlap", std::to_string(m.overlap));
  for (const auto& b : m.blocks) {
    // id ctrl_x ctrl_y ctrl_z e_max cr capped
    doc.add("block", std::to_string(b.id) + " " + format_index3(b.n_ctrl) + " " +
                         format_double(b.e_max_achieved) + " " +
                         format_double(b.compression_ratio) + " " + (b.capped ? "1" : "0"));
  }
  doc.save(dir / kManifestFile);
}

DatasetManifest read_manifest(const fs::path& dir) {
  const KvDocument doc = KvDocument::load(dir / kManifestFile);
  if (doc.find("format") != "mfavis-dataset 1") {
    throw FormatError(dir.string() + ": not an encoded dataset manifest");
  }
  DatasetManifest m;
  m.name = doc.get("name");
  m.levels = doc.get_int("levels");
  m.grid_dims = doc.get_index3("grid_dims");
  m.domain = {doc.get_vec3("domain_min"), doc.get_vec3("domain_max")};
  m.range = {doc.get_double("value_min"), doc.get_double("value_max")};
  m.degree = doc.get_int("degree", 2);
  m.overlap = doc.get_int("overlap", 0);
  for (const auto& line : doc.get_all("block")) {
    const auto v = parse_doubles(line);
    if (v.size() != 7) throw FormatError("malformed block line: " + line);
    m.blocks.push_back({static_cast<int>(v[0]),
                        {static_cast<int>(v[1]), static_cast<int>(v[2]), static_cast<int>(v[3])},
                        v[4], v[5], v[6] != 0.0});
  }
  return m;
}

std::pair<Index3, Index3> fit_range(const Block& b, Index3 grid_dims, int overlap) {
  Index3 lo = b.index_lo, hi = b.index_hi;
  for (int a = 0; a < 3; ++a) {
    lo[a] = std::max(0, lo[a] - overlap);
    hi[a] = std::min(grid_dims[a] - 1, hi[a] + overlap);
  }
  return {lo, hi};
}

DatasetManifest encode_dataset(const ScalarGrid3D& grid, const DatasetEncodeOptions& opt,
                               const fs::path& out_dir) {
  if (opt.overlap < 0) throw ParameterError("overlap must be >= 0");
  const BlockDecomposition decomp = partition(grid, opt.levels);
  fs::create_directories(out_dir);
  DatasetManifest m;
  m.name = opt.name;
  m.levels = opt.levels;
  m.grid_dims = grid.dims();
  m.domain = grid.bounds();
  m.range = {grid.value_min(), grid.value_max()};
  m.degree = opt.encode.degree;
  m.overlap = opt.overlap;
  m.blocks.resize(static_cast<std::size_t>(decomp.block_count()));

  const int n_threads = std::max(
      1, std::min(opt.threads > 0 ? opt.threads : static_cast<int>(std::thread::hardware_concurrency()),
                  decomp.block_count()));
  std::atomic<int> next{0};
  std::vector<std::exception_ptr> errors(static_cast<std::size_t>(decomp.block_count()));
  auto work = [&] {
    for (int id = next++; id < decomp.block_count(); id = next++) {
      const Block& b = decomp.block(id);
      try {
        EncodeConfig cfg = opt.encode;
        cfg.source_dims = b.owned_extent();
        const auto [lo, hi] = fit_range(b, grid.dims(), opt.overlap);
        const ScalarGrid3D sub = grid.subgrid(lo, hi);
        if (!cfg.adaptive) cfg.ctrl_pts = opt.ctrl ? *opt.ctrl : sub.dims();
        const EncodeResult r = encode(sub, cfg);
        save_model(r.model, block_model_path(out_dir, id));
        m.blocks[static_cast<std::size_t>(id)] = {id, r.model.n_ctrl(), r.model.e_max_achieved(),
                                                  compression_ratio(r.model), r.capped};
      } catch (const std::exception& e) {
        errors[static_cast<std::size_t>(id)] = std::current_exception();
      }
    }
  };
  {
    std::vector<std::jthread> pool;
    for (int t = 0; t < n_threads; ++t) pool.emplace_back(work);
  }
  for (std::size_t id = 0; id < errors.size(); ++id) {
    if (!errors[id]) continue;
    try {
      std::rethrow_exception(errors[id]);
    } catch (const Error& e) {
      throw PipelineError("encoding block " + std::to_string(id) + " failed: " + e.what());
    }
  }
  write_manifest(out_dir, m);
  return m;
}

Dataset::Dataset(std::string name, BlockDecomposition decomp, ValueRange range, Fetch fetch,
                 bool resident)
    : name_(std::move(name)),
      decomp_(std::move(decomp)),
      range_(range),
      fetch_(std::move(fetch)),
      resident_(resident),
      mu_(std::make_unique<std::mutex>()),
      cache_(static_cast<std::size_t>(decomp_.block_count())) {}

RenderSource Dataset::source(int block_id, bool* fetched) {
  const Block& b = decomp_.block(block_id);
  if (!resident_) {
    if (fetched) *fetched = true;
    return fetch_(b);
  }
  std::lock_guard lock(*mu_);
  auto& slot = cache_[static_cast<std::size_t>(block_id)];
  if (fetched) *fetched = !slot.has_value();
  if (!slot) slot = fetch_(b);
  return *slot;
}

Dataset open_model_dataset(const fs::path& dir, bool resident) {
  const DatasetManifest m = read_manifest(dir);
  BlockDecomposition decomp = partition(m.grid_dims, m.domain, m.levels);
  for (int id = 0; id < decomp.block_count(); ++id) {
    if (!fs::exists(block_model_path(dir, id))) {
      throw IoError("missing model file " + block_model_path(dir, id).string());
    }
  }
  return Dataset(
      m.name, std::move(decomp), m.range,
      [dir](const Block& b) -> RenderSource {
        return MfaSource{std::make_shared<const MfaModel>(load_model(block_model_path(dir, b.id)))};
      },
      resident);
}

Dataset open_raw_dataset(const fs::path& raw_path, int levels, Filter filter, bool resident) {
  const VolumeMeta meta = read_sidecar(raw_path);
  ValueRange range;
  if (meta.value_min && meta.value_max) {
    range = {*meta.value_min, *meta.value_max};
  } else {
    const ScalarGrid3D all = load_raw(raw_path, meta.dims, meta.dtype, meta.domain);
    range = {all.value_min(), all.value_max()};
  }
  return Dataset(
      raw_path.stem().string(), partition(meta.dims, meta.domain, levels), range,
      [raw_path, meta, filter](const Block& b) -> RenderSource {
        return GridSource{std::make_shared<const ScalarGrid3D>(
                              load_raw_block(raw_path, meta, b.index_lo, b.index_hi)),
                          filter};
      },
      resident);
}

Dataset grid_dataset(std::shared_ptr<const ScalarGrid3D> grid, int levels, Filter filter) {
  BlockDecomposition decomp = partition(*grid, levels);
  const ValueRange range{grid->value_min(), grid->value_max()};
  return Dataset("grid", std::move(decomp), range, [grid, filter](const Block& b) -> RenderSource {
    if (b.extent() == grid->dims()) return GridSource{grid, filter};
    return GridSource{std::make_shared<const ScalarGrid3D>(grid->subgrid(b.index_lo, b.index_hi)),
                      filter};
  });
}

Dataset model_dataset(std::string name, BlockDecomposition decomp,
                      std::vector<std::shared_ptr<const MfaModel>> models, ValueRange range) {
  if (models.size() != static_cast<std::size_t>(decomp.block_count())) {
    throw ParameterError("one model per block required");
  }
  return Dataset(std::move(name), std::move(decomp), range,
                 [models = std::move(models)](const Block& b) -> RenderSource {
                   return MfaSource{models[static_cast<std::size_t>(b.id)]};
                 });
}

Dataset analytic_dataset(const MarschnerLobb& field, const Aabb& domain, int levels,
                         ValueRange range) {
  // the lattice only shapes the partition; 2^levels + 1 samples per axis suffice
  const int n = (1 << levels) + 1;
  return Dataset("analytic", partition({n, n, n}, domain, levels), range,
                 [field](const Block&) -> RenderSource { return AnalyticSource{field}; });
}

}  // namespace mfavis
