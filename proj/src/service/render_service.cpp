// Copyright 2026 The mfavis Authors
// SPDX-License-Identifier: Apache-2.0

#include "mfavis/service/render_service.hpp"

#include <algorithm>
#include <iostream>

#include "httplib.h"
#include "mfavis/error.hpp"

namespace mfavis {

using nlohmann::json;

namespace {

Vec3 vec3_from(const json& j, const char* what) {
  if (!j.is_array() || j.size() != 3) throw ParameterError(std::string(what) + " must be [x, y, z]");
  return {j[0].get<double>(), j[1].get<double>(), j[2].get<double>()};
}

json vec3_json(Vec3 v) { return json::array({v.x, v.y, v.z}); }

}  // namespace

RenderRequest parse_render_request(const json& body) {
  try {
    if (!body.is_object()) throw ParameterError("request body must be a JSON object");
    RenderRequest r;
    r.dataset = body.at("dataset").get<std::string>();

    const json& cam = body.at("camera");
    r.camera.position = vec3_from(cam.at("position"), "camera.position");
    r.camera.look_at = vec3_from(cam.at("look_at"), "camera.look_at");
    r.camera.up = vec3_from(cam.value("up", json::array({0.0, 0.0, 1.0})), "camera.up");
    r.camera.fov_deg = cam.value("fov", r.camera.fov_deg);
    r.camera.width = body.value("width", r.camera.width);
    r.camera.height = body.value("height", r.camera.height);
    r.camera.validate();

    if (body.contains("transfer")) {
      const json& t = body.at("transfer");
      std::vector<TfNode> nodes;
      for (const json& n : t.at("nodes")) {
        nodes.push_back({n.at("value").get<double>(), vec3_from(n.at("color"), "node.color"),
                         n.at("opacity").get<double>()});
      }
      r.tf = TransferFunction(std::move(nodes), t.value("dt_ref", 0.01));
    } else if (body.contains("preset")) {
      r.tf = tf_preset(body.at("preset").get<std::string>());
    }

    if (body.contains("config")) {
      const json& c = body.at("config");
      r.config.dt = c.value("dt", r.config.dt);
      r.config.termination_alpha = c.value("termination_alpha", r.config.termination_alpha);
      if (c.contains("shading")) r.config.shading = parse_shading(c.at("shading").get<std::string>());
      r.config.phong.ambient = c.value("ambient", r.config.phong.ambient);
      r.config.phong.diffuse = c.value("diffuse", r.config.phong.diffuse);
      r.config.phong.specular = c.value("specular", r.config.phong.specular);
      r.config.phong.shininess = c.value("shininess", r.config.phong.shininess);
      if (c.contains("light_dir")) r.config.phong.light_dir = vec3_from(c.at("light_dir"), "light_dir");
      if (c.contains("background")) {
        const json& bg = c.at("background");
        if (!bg.is_array() || bg.size() != 4) throw ParameterError("background must be [r, g, b, a]");
        r.config.background = {bg[0].get<double>(), bg[1].get<double>(), bg[2].get<double>(),
                               bg[3].get<double>()};
      }
    }
    r.config.validate();

    const std::string q = body.value("quality", std::string("full"));
    if (q == "preview") {
      r.quality = Quality::preview;
    } else if (q == "full") {
      r.quality = Quality::full;
    } else {
      throw ParameterError("quality must be preview or full");
    }
    return r;
  } catch (const json::exception& e) {
    throw ParameterError(std::string("bad request: ") + e.what());
  } catch (const CameraError& e) {
    throw ParameterError(e.what());
  }
}

RenderRequest effective_request(RenderRequest req) {
  if (req.quality == Quality::preview) {
    req.camera.width = std::max(1, req.camera.width / 2);
    req.camera.height = std::max(1, req.camera.height / 2);
    req.config.dt *= 2.0;
  }
  return req;
}

json to_json(const StageTimings& t) {
  return {{"fetch_s", t.fetch},
          {"render_s", t.render},
          {"composite_s", t.composite},
          {"merge_s", t.merge},
          {"total_s", t.total}};
}

json presets_json() {
  json out = json::array();
  for (const auto& p : tf_presets()) {
    json nodes = json::array();
    for (const auto& n : p.tf.nodes()) {
      nodes.push_back({{"value", n.value}, {"color", vec3_json(n.color)}, {"opacity", n.opacity}});
    }
    out.push_back({{"name", p.name}, {"dt_ref", p.tf.dt_ref()}, {"nodes", nodes}});
  }
  return out;
}

struct RenderService::Session {
  Session(Dataset d, std::optional<DatasetManifest> m) : dataset(std::move(d)), manifest(std::move(m)) {}
  Dataset dataset;
  std::optional<DatasetManifest> manifest;
  std::mutex mu;
  std::condition_variable cv;
  bool busy = false;
  std::uint64_t next_ticket = 0;
  std::uint64_t newest_waiting = 0;  // 0 = nobody queued
};

RenderService::RenderService() = default;

RenderService::~RenderService() { stop(); }

bool RenderService::add_model_dir(const std::filesystem::path& dir, std::optional<std::string> name) {
  try {
    DatasetManifest m = read_manifest(dir);
    Dataset ds = open_model_dataset(dir, true);
    const std::string key = name ? *name : m.name;
    if (sessions_.count(key)) throw ParameterError("duplicate dataset name '" + key + "'");
    sessions_.emplace(key, std::make_unique<Session>(std::move(ds), std::move(m)));
    return true;
  } catch (const std::exception& e) {
    std::cerr << "warning: skipping dataset " << dir.string() << ": " << e.what() << "\n";
    return false;
  }
}

void RenderService::add_dataset(const std::string& name, Dataset dataset) {
  sessions_.insert_or_assign(name, std::make_unique<Session>(std::move(dataset), std::nullopt));
}

RenderService::Session* RenderService::find(const std::string& name) const {
  auto it = sessions_.find(name);
  return it == sessions_.end() ? nullptr : it->second.get();
}

json RenderService::datasets_json() const {
  json out = json::array();
  for (const auto& [name, s] : sessions_) {
    const Dataset& ds = s->dataset;
    const auto& d = ds.decomposition();
    out.push_back({{"name", name},
                   {"dims", d.grid_dims()},
                   {"domain_min", vec3_json(d.domain().lo)},
                   {"domain_max", vec3_json(d.domain().hi)},
                   {"value_range", json::array({ds.range().min, ds.range().max})},
                   {"levels", d.levels()},
                   {"blocks", ds.block_count()}});
  }
  return out;
}

void RenderService::set_render_start_hook(std::function<void(const std::string&)> hook) {
  hook_ = std::move(hook);
}

std::uint64_t RenderService::renders_executed() const {
  std::lock_guard lock(stats_mu_);
  return renders_;
}

RenderReply RenderService::render(const RenderRequest& original) {
  RenderReply reply;
  Session* s = find(original.dataset);
  if (!s) {
    reply.status = RenderReply::Status::not_found;
    return reply;
  }
  const RenderRequest req = effective_request(original);
  {
    std::unique_lock lock(s->mu);
    const std::uint64_t ticket = ++s->next_ticket;
    s->newest_waiting = ticket;
    s->cv.notify_all();
    s->cv.wait(lock, [&] { return s->newest_waiting != ticket || !s->busy; });
    if (s->newest_waiting != ticket) {
      reply.status = RenderReply::Status::superseded;
      return reply;
    }
    s->busy = true;
    s->newest_waiting = 0;
  }
  struct Release {
    Session* s;
    ~Release() {
      {
        std::lock_guard lock(s->mu);
        s->busy = false;
      }
      s->cv.notify_all();
    }
  } release{s};

  if (hook_) hook_(original.dataset);
  {
    std::lock_guard lock(stats_mu_);
    ++renders_;
  }
  PipelineOptions opt;
  opt.n_workers = s->dataset.block_count();
  const PipelineResult res = run_pipeline(s->dataset, req.camera, req.tf, req.config, opt);
  reply.png = encode_png(res.image);
  reply.timings = res.timings;
  reply.width = req.camera.width;
  reply.height = req.camera.height;
  return reply;
}

namespace {

void send_json(httplib::Response& res, int status, const json& body) {
  res.status = status;
  res.set_content(body.dump(), "application/json");
}

}  // namespace

void RenderService::install_routes() {
  auto& srv = *server_;
  srv.set_default_headers({{"Access-Control-Allow-Origin", "*"},
                           {"Access-Control-Allow-Methods", "GET, POST, OPTIONS"},
                           {"Access-Control-Allow-Headers", "Content-Type"},
                           {"Access-Control-Expose-Headers", "X-Timings, X-Image-Size, X-Quality"}});
  srv.Options(R"(/api/.*)", [](const httplib::Request&, httplib::Response& res) { res.status = 204; });
  srv.Get("/api/health", [this](const httplib::Request&, httplib::Response& res) {
    send_json(res, 200, {{"status", "ok"}, {"datasets", sessions_.size()}});
  });
  srv.Get("/api/datasets", [this](const httplib::Request&, httplib::Response& res) {
    send_json(res, 200, datasets_json());
  });
  srv.Get("/api/presets", [](const httplib::Request&, httplib::Response& res) {
    send_json(res, 200, presets_json());
  });
  srv.Post("/api/render", [this](const httplib::Request& http_req, httplib::Response& res) {
    RenderRequest req;
    try {
      req = parse_render_request(json::parse(http_req.body));
    } catch (const json::exception& e) {
      return send_json(res, 400, {{"error", std::string("invalid JSON: ") + e.what()}});
    } catch (const Error& e) {
      return send_json(res, 400, {{"error", e.what()}});
    }
    try {
      const RenderReply r = render(req);
      switch (r.status) {
        case RenderReply::Status::not_found:
          return send_json(res, 404, {{"error", "unknown dataset '" + req.dataset + "'"}});
        case RenderReply::Status::superseded:
          return send_json(res, 409, {{"status", "superseded"}});
        case RenderReply::Status::ok:
          break;
      }
      res.status = 200;
      res.set_header("X-Timings", to_json(r.timings).dump());
      res.set_header("X-Image-Size", std::to_string(r.width) + "x" + std::to_string(r.height));
      res.set_header("X-Quality", req.quality == Quality::preview ? "preview" : "full");
      res.set_content(r.png, "image/png");
    } catch (const std::exception& e) {
      send_json(res, 500, {{"error", e.what()}});
    }
  });
}

int RenderService::bind(const std::string& host, int port) {
  server_ = std::make_unique<httplib::Server>();
  install_routes();
  if (port == 0) {
    const int p = server_->bind_to_any_port(host);
    if (p < 0) throw IoError("cannot bind " + host);
    return p;
  }
  if (!server_->bind_to_port(host, port)) {
    throw IoError("cannot bind " + host + ":" + std::to_string(port));
  }
  return port;
}

void RenderService::listen() {
  if (!server_) throw PipelineError("service not bound");
  server_->listen_after_bind();
}

void RenderService::start() {
  if (!server_) throw PipelineError("service not bound");
  thread_ = std::thread([this] { server_->listen_after_bind(); });
  server_->wait_until_ready();
}

void RenderService::stop() {
  if (server_) server_->stop();
  if (thread_.joinable()) thread_.join();
}

}  // namespace mfavis
