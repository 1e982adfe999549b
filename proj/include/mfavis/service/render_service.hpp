// Copyright 2026 The mfavis Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <condition_variable>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <thread>

#include "json.hpp"

#include "mfavis/composite/dataset.hpp"
#include "mfavis/composite/pipeline.hpp"

namespace httplib {
class Server;
}

namespace mfavis {

enum class Quality { preview, full };

struct RenderRequest {
  std::string dataset;
  Camera camera;
  TransferFunction tf = tf_preset("grayscale");
  RayCastConfig config;
  Quality quality = Quality::full;
};

// JSON request schema (see docs/service-api.md). ParameterError on bad input.
RenderRequest parse_render_request(const nlohmann::json& body);
nlohmann::json to_json(const StageTimings& t);
nlohmann::json presets_json();

// Preview renders at half width and height (a quarter of the pixels) with
// twice the ray step.
RenderRequest effective_request(RenderRequest req);

struct RenderReply {
  enum class Status { ok, superseded, not_found };
  Status status = Status::ok;
  std::string png;
  StageTimings timings;
  int width = 0;
  int height = 0;
};

class RenderService {
 public:
  RenderService();
  ~RenderService();
  RenderService(const RenderService&) = delete;
  RenderService& operator=(const RenderService&) = delete;

  // Registers an encoded model directory; returns false (with a warning on
  // stderr) when it is not a readable dataset. Models load on first use and
  // then stay in memory.
  bool add_model_dir(const std::filesystem::path& dir, std::optional<std::string> name = {});
  void add_dataset(const std::string& name, Dataset dataset);

  nlohmann::json datasets_json() const;

  // Renders are serialised per dataset. A request still waiting when a newer
  // one arrives for the same dataset is answered `superseded` without
  // rendering.
  RenderReply render(const RenderRequest& req);

  /// Called with the dataset name just before each render executes.
  void set_render_start_hook(std::function<void(const std::string&)> hook);

  // HTTP front end. bind() returns the port actually bound (pass 0 for an
  // ephemeral one); start() serves on a background thread.
  int bind(const std::string& host, int port);
  void start();
  void listen();  // blocks
  void stop();

  std::uint64_t renders_executed() const;

 private:
  struct Session;
  Session* find(const std::string& name) const;
  void install_routes();

  std::map<std::string, std::unique_ptr<Session>> sessions_;
  std::function<void(const std::string&)> hook_;
  std::unique_ptr<httplib::Server> server_;
  std::thread thread_;
  mutable std::mutex stats_mu_;
  std::uint64_t renders_ = 0;
};

}  // namespace mfavis
