// Copyright 2026 The mfavis Authors
// SPDX-License-Identifier: Apache-2.0

#include "mfavis/mfa/model_io.hpp"

#include <cstdint>
#include <cstring>
#include <fstream>
#include <string>

#include "mfavis/error.hpp"
#include "mfavis/io/byte_order.hpp"

namespace mfavis {

namespace {

constexpr char kMagic[4] = {'M', 'F', 'A', '1'};
constexpr std::uint32_t kVersion = 1;

class Writer {
 public:
  explicit Writer(std::size_t reserve) { bytes_.reserve(reserve); }
  template <typename T>
  void put(T v) {
    const std::size_t at = bytes_.size();
    bytes_.resize(at + sizeof(T));
    le::store<T>(bytes_.data() + at, v);
  }
  std::vector<std::byte> take() { return std::move(bytes_); }

 private:
  std::vector<std::byte> bytes_;
};

class Reader {
 public:
  explicit Reader(std::span<const std::byte> bytes) : bytes_(bytes) {}
  template <typename T>
  T get() {
    if (pos_ + sizeof(T) > bytes_.size()) throw FormatError("model file is truncated");
    T v = le::load<T>(bytes_.data() + pos_);
    pos_ += sizeof(T);
    return v;
  }
  std::size_t remaining() const { return bytes_.size() - pos_; }

 private:
  std::span<const std::byte> bytes_;
  std::size_t pos_ = 0;
};

}  // namespace

std::size_t model_file_size(const MfaModel& model) {
  std::size_t n = kModelHeaderBytes;
  for (int a = 0; a < 3; ++a) n += 4 + 8 * model.knots(a).knots().size();
  return n + 8 * model.ctrl().size();
}

std::vector<std::byte> serialize_model(const MfaModel& model) {
  Writer w(model_file_size(model));
  for (char c : kMagic) w.put<std::uint8_t>(static_cast<std::uint8_t>(c));
  w.put<std::uint32_t>(kVersion);
  for (int a = 0; a < 3; ++a) w.put<std::uint8_t>(static_cast<std::uint8_t>(model.degree()[a]));
  for (int a = 0; a < 3; ++a) w.put<std::uint32_t>(static_cast<std::uint32_t>(model.n_ctrl()[a]));
  for (int a = 0; a < 3; ++a) {
    w.put<std::uint32_t>(static_cast<std::uint32_t>(model.source_dims()[a]));
  }
  for (int a = 0; a < 3; ++a) w.put<double>(model.domain().lo[a]);
  for (int a = 0; a < 3; ++a) w.put<double>(model.domain().hi[a]);
  w.put<double>(model.e_max_achieved());
  for (int a = 0; a < 3; ++a) {
    const auto& k = model.knots(a).knots();
    w.put<std::uint32_t>(static_cast<std::uint32_t>(k.size()));
    for (double v : k) w.put<double>(v);
  }
  for (double v : model.ctrl()) w.put<double>(v);
  return w.take();
}

MfaModel deserialize_model(std::span<const std::byte> bytes) {
  Reader r(bytes);
  for (char c : kMagic) {
    if (r.get<std::uint8_t>() != static_cast<std::uint8_t>(c)) {
      throw FormatError("bad model magic");
    }
  }
  const auto version = r.get<std::uint32_t>();
  if (version != kVersion) {
    throw FormatError("unsupported model version " + std::to_string(version));
  }
  Index3 degree{}, n_ctrl{}, source{};
  for (int a = 0; a < 3; ++a) degree[a] = r.get<std::uint8_t>();
  for (int a = 0; a < 3; ++a) n_ctrl[a] = static_cast<int>(r.get<std::uint32_t>());
  for (int a = 0; a < 3; ++a) source[a] = static_cast<int>(r.get<std::uint32_t>());
  Aabb domain;
  for (int a = 0; a < 3; ++a) domain.lo[a] = r.get<double>();
  for (int a = 0; a < 3; ++a) domain.hi[a] = r.get<double>();
  const double e_max = r.get<double>();

  std::array<std::vector<double>, 3> knot_values;
  for (int a = 0; a < 3; ++a) {
    const auto count = r.get<std::uint32_t>();
    if (count != static_cast<std::uint32_t>(n_ctrl[a] + degree[a] + 1)) {
      throw FormatError("knot count inconsistent with degree and control points");
    }
    if (r.remaining() < 8ull * count) throw FormatError("model file is truncated");
    knot_values[a].resize(count);
    for (auto& v : knot_values[a]) v = r.get<double>();
  }
  const std::size_t n = product(n_ctrl);
  if (r.remaining() != 8 * n) {
    throw FormatError(r.remaining() < 8 * n ? "model file is truncated"
                                            : "trailing bytes after control points");
  }
  std::vector<double> ctrl(n);
  for (auto& v : ctrl) v = r.get<double>();

  try {
    std::array<KnotVector, 3> knots{KnotVector(degree[0], std::move(knot_values[0])),
                                    KnotVector(degree[1], std::move(knot_values[1])),
                                    KnotVector(degree[2], std::move(knot_values[2]))};
    return MfaModel(std::move(knots), std::move(ctrl), domain, source, e_max);
  } catch (const ParameterError& e) {
    throw FormatError(std::string("invalid model: ") + e.what());
  }
}

void save_model(const MfaModel& model, const std::filesystem::path& path) {
  const auto bytes = serialize_model(model);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot write " + path.string());
  out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw IoError("write failed for " + path.string());
}

MfaModel load_model(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary | std::ios::ate);
  if (!in) throw IoError("cannot open " + path.string());
  const auto size = static_cast<std::size_t>(in.tellg());
  in.seekg(0);
  std::vector<std::byte> bytes(size);
  in.read(reinterpret_cast<char*>(bytes.data()), static_cast<std::streamsize>(size));
  if (!in) throw IoError("short read from " + path.string());
  return deserialize_model(bytes);
}

}  // namespace mfavis
