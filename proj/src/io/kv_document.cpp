// Copyright 2026 The mfavis Authors
// SPDX-License-Identifier: Apache-2.0

#include "mfavis/io/kv_document.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include "mfavis/error.hpp"

namespace mfavis {

namespace {

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r\n");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r\n");
  return s.substr(first, last - first + 1);
}

}  // namespace

std::string format_double(double v) {
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  auto [end, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, end);
}

std::string format_vec3(Vec3 v) {
  return format_double(v.x) + " " + format_double(v.y) + " " + format_double(v.z);
}

std::string format_index3(const Index3& v) {
  return std::to_string(v[0]) + " " + std::to_string(v[1]) + " " + std::to_string(v[2]);
}

double parse_double(std::string_view text) {
  text = trim(text);
  if (text == "inf") return INFINITY;
  if (text == "-inf") return -INFINITY;
  double v = 0.0;
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (ec != std::errc{} || ptr != text.data() + text.size() || text.empty()) {
    throw FormatError("not a number: '" + std::string(text) + "'");
  }
  return v;
}

std::vector<double> parse_doubles(std::string_view text) {
  std::vector<double> out;
  std::size_t pos = 0;
  while (pos < text.size()) {
    const auto start = text.find_first_not_of(" \t,", pos);
    if (start == std::string_view::npos) break;
    auto end = text.find_first_of(" \t,", start);
    if (end == std::string_view::npos) end = text.size();
    out.push_back(parse_double(text.substr(start, end - start)));
    pos = end;
  }
  return out;
}

KvDocument KvDocument::parse(std::string_view text) {
  KvDocument doc;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    auto eol = text.find('\n', pos);
    if (eol == std::string_view::npos) eol = text.size();
    std::string_view line = text.substr(pos, eol - pos);
    pos = eol + 1;
    if (const auto hash = line.find('#'); hash != std::string_view::npos) {
      line = line.substr(0, hash);
    }
    line = trim(line);
    if (line.empty()) continue;
    const auto split = line.find_first_of(" \t");
    if (split == std::string_view::npos) {
      doc.add(std::string(line), "");
    } else {
      doc.add(std::string(line.substr(0, split)), std::string(trim(line.substr(split))));
    }
  }
  return doc;
}

KvDocument KvDocument::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse(ss.str());
}

void KvDocument::add(std::string key, std::string value) {
  entries_.emplace_back(std::move(key), std::move(value));
}

void KvDocument::set(const std::string& key, std::string value) {
  for (auto& [k, v] : entries_) {
    if (k == key) {
      v = std::move(value);
      return;
    }
  }
  add(key, std::move(value));
}

bool KvDocument::has(std::string_view key) const { return find(key).has_value(); }

std::optional<std::string> KvDocument::find(std::string_view key) const {
  for (const auto& [k, v] : entries_) {
    if (k == key) return v;
  }
  return std::nullopt;
}

std::string KvDocument::get(std::string_view key) const {
  auto v = find(key);
  if (!v) throw FormatError("missing key '" + std::string(key) + "'");
  return *v;
}

std::vector<std::string> KvDocument::get_all(std::string_view key) const {
  std::vector<std::string> out;
  for (const auto& [k, v] : entries_) {
    if (k == key) out.push_back(v);
  }
  return out;
}

double KvDocument::get_double(std::string_view key) const { return parse_double(get(key)); }

double KvDocument::get_double(std::string_view key, double fallback) const {
  auto v = find(key);
  return v ? parse_double(*v) : fallback;
}

int KvDocument::get_int(std::string_view key) const {
  const std::string text = get(key);
  int v = 0;
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (ec != std::errc{} || ptr != text.data() + text.size()) {
    throw FormatError("key '" + std::string(key) + "' is not an integer: '" + text + "'");
  }
  return v;
}

int KvDocument::get_int(std::string_view key, int fallback) const {
  return has(key) ? get_int(key) : fallback;
}

Vec3 KvDocument::get_vec3(std::string_view key) const {
  const auto v = parse_doubles(get(key));
  if (v.size() != 3) throw FormatError("key '" + std::string(key) + "' needs 3 numbers");
  return {v[0], v[1], v[2]};
}

Vec3 KvDocument::get_vec3(std::string_view key, Vec3 fallback) const {
  return has(key) ? get_vec3(key) : fallback;
}

Index3 KvDocument::get_index3(std::string_view key) const {
  const auto v = parse_doubles(get(key));
  if (v.size() != 3) throw FormatError("key '" + std::string(key) + "' needs 3 integers");
  Index3 out{};
  for (int a = 0; a < 3; ++a) {
    if (v[a] != std::floor(v[a])) throw FormatError("key '" + std::string(key) + "' needs integers");
    out[a] = static_cast<int>(v[a]);
  }
  return out;
}

std::string KvDocument::to_string() const {
  std::string out;
  for (const auto& [k, v] : entries_) {
    out += k;
    if (!v.empty()) {
      out += ' ';
      out += v;
    }
    out += '\n';
  }
  return out;
}

void KvDocument::save(const std::filesystem::path& path) const {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write " + path.string());
  out << to_string();
  if (!out) throw IoError("write failed for " + path.string());
}

}  // namespace mfavis
