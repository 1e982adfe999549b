// Copyright 2026 The mfavis Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "mfavis/vec3.hpp"

namespace mfavis {

// Line-oriented text document: `key value...` per line, `#` starts a comment.
// Keys may repeat (e.g. one `node` line per transfer-function node) and keep
// their order. Shared by volume sidecars, dataset manifests, camera and
// transfer-function files, and render-service request bodies.
class KvDocument {
 public:
  static KvDocument parse(std::string_view text);
  static KvDocument load(const std::filesystem::path& path);

  void add(std::string key, std::string value);
  void set(const std::string& key, std::string value);

  bool has(std::string_view key) const;
  std::optional<std::string> find(std::string_view key) const;
  std::string get(std::string_view key) const;
  std::vector<std::string> get_all(std::string_view key) const;

  double get_double(std::string_view key) const;
  double get_double(std::string_view key, double fallback) const;
  int get_int(std::string_view key) const;
  int get_int(std::string_view key, int fallback) const;
  Vec3 get_vec3(std::string_view key) const;
  Vec3 get_vec3(std::string_view key, Vec3 fallback) const;
  Index3 get_index3(std::string_view key) const;

  const std::vector<std::pair<std::string, std::string>>& entries() const { return entries_; }

  std::string to_string() const;
  void save(const std::filesystem::path& path) const;

 private:
  std::vector<std::pair<std::string, std::string>> entries_;
};

// Numeric helpers that round-trip doubles exactly.
std::string format_double(double v);
std::string format_vec3(Vec3 v);
std::string format_index3(const Index3& v);
std::vector<double> parse_doubles(std::string_view text);
double parse_double(std::string_view text);

}  // namespace mfavis
