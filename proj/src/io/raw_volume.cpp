// Copyright 2026 The mfavis Authors
// SPDX-License-Identifier: Apache-2.0

#include "mfavis/io/raw_volume.hpp"

#include <cstdint>
#include <fstream>
#include <string>
#include <vector>

#include "mfavis/error.hpp"
#include "mfavis/io/byte_order.hpp"
#include "mfavis/io/kv_document.hpp"

namespace mfavis {

namespace fs = std::filesystem;

namespace {

double decode_sample(const std::byte* src, RawType type) {
  switch (type) {
    case RawType::f32: return le::load<float>(src);
    case RawType::f64: return le::load<double>(src);
    case RawType::u8: return static_cast<double>(std::to_integer<std::uint8_t>(*src));
  }
  return 0.0;
}

void encode_sample(std::byte* dst, double v, RawType type) {
  switch (type) {
    case RawType::f32: le::store<float>(dst, static_cast<float>(v)); break;
    case RawType::f64: le::store<double>(dst, v); break;
    case RawType::u8: {
      const double c = v < 0.0 ? 0.0 : (v > 255.0 ? 255.0 : v);
      *dst = static_cast<std::byte>(static_cast<std::uint8_t>(c + 0.5));
      break;
    }
  }
}

void decode_into(const std::vector<std::byte>& bytes, RawType type, std::vector<double>& out) {
  const std::size_t es = element_size(type);
  const std::size_t n = bytes.size() / es;
  for (std::size_t i = 0; i < n; ++i) out.push_back(decode_sample(bytes.data() + i * es, type));
}

}  // namespace

std::string_view to_string(RawType type) {
  switch (type) {
    case RawType::f32: return "f32";
    case RawType::f64: return "f64";
    case RawType::u8: return "u8";
  }
  return "unknown";
}

RawType parse_raw_type(std::string_view name) {
  if (name == "f32" || name == "float32") return RawType::f32;
  if (name == "f64" || name == "float64") return RawType::f64;
  if (name == "u8" || name == "uint8") return RawType::u8;
  throw ParameterError("unknown raw dtype '" + std::string(name) + "'");
}

std::size_t element_size(RawType type) {
  switch (type) {
    case RawType::f32: return 4;
    case RawType::f64: return 8;
    case RawType::u8: return 1;
  }
  return 0;
}

ScalarGrid3D load_raw(const fs::path& path, Index3 dims, RawType dtype, const Aabb& domain) {
  std::error_code ec;
  const auto size = fs::file_size(path, ec);
  if (ec) throw IoError("cannot read " + path.string() + ": " + ec.message());
  for (int a = 0; a < 3; ++a) {
    if (dims[a] < 2) throw ParameterError("raw dims must be >= 2 per axis");
  }
  const std::size_t expected = product(dims) * element_size(dtype);
  if (size != expected) {
    throw IoError("size mismatch for " + path.string() + ": " + std::to_string(size) +
                  " bytes, expected " + std::to_string(expected));
  }
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  std::vector<std::byte> bytes(expected);
  in.read(reinterpret_cast<char*>(bytes.data()), static_cast<std::streamsize>(expected));
  if (!in) throw IoError("short read from " + path.string());

  std::vector<double> values;
  values.reserve(product(dims));
  decode_into(bytes, dtype, values);
  return ScalarGrid3D(dims, domain.lo, domain.hi, std::move(values));
}

void save_raw(const ScalarGrid3D& grid, const fs::path& path, RawType dtype) {
  const std::size_t es = element_size(dtype);
  std::vector<std::byte> bytes(grid.size() * es);
  const auto values = grid.values();
  for (std::size_t i = 0; i < values.size(); ++i) encode_sample(bytes.data() + i * es, values[i], dtype);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot write " + path.string());
  out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw IoError("write failed for " + path.string());
}

fs::path sidecar_path(const fs::path& raw_path) {
  fs::path p = raw_path;
  p += ".meta";
  return p;
}

VolumeMeta read_sidecar(const fs::path& raw_path) {
  const KvDocument doc = KvDocument::load(sidecar_path(raw_path));
  VolumeMeta meta;
  meta.dims = doc.get_index3("dims");
  meta.dtype = parse_raw_type(doc.get("dtype"));
  meta.domain = {doc.get_vec3("domain_min"), doc.get_vec3("domain_max")};
  if (doc.has("value_min")) meta.value_min = doc.get_double("value_min");
  if (doc.has("value_max")) meta.value_max = doc.get_double("value_max");
  return meta;
}

void write_sidecar(const fs::path& raw_path, const VolumeMeta& meta) {
  KvDocument doc;
  doc.add("dims", format_index3(meta.dims));
  doc.add("dtype", std::string(to_string(meta.dtype)));
  doc.add("domain_min", format_vec3(meta.domain.lo));
  doc.add("domain_max", format_vec3(meta.domain.hi));
  if (meta.value_min) doc.add("value_min", format_double(*meta.value_min));
  if (meta.value_max) doc.add("value_max", format_double(*meta.value_max));
  doc.save(sidecar_path(raw_path));
}

void save_volume(const ScalarGrid3D& grid, const fs::path& path, RawType dtype) {
  save_raw(grid, path, dtype);
  VolumeMeta meta{grid.dims(), dtype, grid.bounds(), grid.value_min(), grid.value_max()};
  if (dtype != RawType::f64) {
    // Record the range of the values as stored, not as computed.
    const ScalarGrid3D stored = load_raw(path, grid.dims(), dtype, grid.bounds());
    meta.value_min = stored.value_min();
    meta.value_max = stored.value_max();
  }
  write_sidecar(path, meta);
}

ScalarGrid3D load_volume(const fs::path& path) {
  const VolumeMeta meta = read_sidecar(path);
  return load_raw(path, meta.dims, meta.dtype, meta.domain);
}

ScalarGrid3D load_raw_block(const fs::path& path, const VolumeMeta& meta, Index3 lo, Index3 hi) {
  Index3 n{};
  for (int a = 0; a < 3; ++a) {
    if (lo[a] < 0 || hi[a] >= meta.dims[a] || hi[a] - lo[a] < 1) {
      throw ParameterError("raw block range out of bounds");
    }
    n[a] = hi[a] - lo[a] + 1;
  }
  std::error_code ec;
  const auto size = fs::file_size(path, ec);
  if (ec) throw IoError("cannot read " + path.string() + ": " + ec.message());
  const std::size_t es = element_size(meta.dtype);
  if (size != product(meta.dims) * es) throw IoError("size mismatch for " + path.string());

  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  std::vector<std::byte> row(static_cast<std::size_t>(n[0]) * es);
  std::vector<double> values;
  values.reserve(product(n));
  for (int k = lo[2]; k <= hi[2]; ++k) {
    for (int j = lo[1]; j <= hi[1]; ++j) {
      const std::size_t offset =
          (static_cast<std::size_t>(lo[0]) +
           static_cast<std::size_t>(meta.dims[0]) *
               (static_cast<std::size_t>(j) + static_cast<std::size_t>(meta.dims[1]) * k)) *
          es;
      in.seekg(static_cast<std::streamoff>(offset));
      in.read(reinterpret_cast<char*>(row.data()), static_cast<std::streamsize>(row.size()));
      if (!in) throw IoError("short read from " + path.string());
      decode_into(row, meta.dtype, values);
    }
  }
  auto coord = [&](int a, int i) {
    return meta.domain.lo[a] + i * ((meta.domain.hi[a] - meta.domain.lo[a]) / (meta.dims[a] - 1));
  };
  return ScalarGrid3D(n, {coord(0, lo[0]), coord(1, lo[1]), coord(2, lo[2])},
                      {coord(0, hi[0]), coord(1, hi[1]), coord(2, hi[2])}, std::move(values));
}

}  // namespace mfavis
