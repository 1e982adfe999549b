// Copyright 2026 The mfavis Authors
// SPDX-License-Identifier: Apache-2.0

#include <gtest/gtest.h>

#include <atomic>
#include <condition_variable>
#include <fstream>
#include <future>
#include <thread>

#include "httplib.h"
#include "mfavis/error.hpp"
#include "mfavis/field/marschner_lobb.hpp"
#include "mfavis/service/render_service.hpp"
#include "test_support.hpp"

namespace mfavis {
namespace {

using nlohmann::json;

json base_request(int w = 48, int h = 40) {
  return {{"dataset", "ml"},
          {"camera", {{"position", {15.0, -8.0, 11.0}}, {"look_at", {3.5, 3.5, 3.5}}, {"up", {0, 0, 1}}, {"fov", 40}}},
          {"width", w},
          {"height", h},
          {"preset", "warm"},
          {"config", {{"dt", 0.02}, {"shading", "blinn_phong"}, {"background", {0.25, 0.5, 0.75, 1.0}}}},
          {"quality", "full"}};
}

class ServiceTest : public ::testing::Test {
 protected:
  static void SetUpTestSuite() {
    dir_ = new testing::TempDir();
    DatasetEncodeOptions opt;
    opt.levels = 3;
    opt.ctrl = Index3{10, 10, 10};
    opt.name = "ml";
    encode_dataset(generate_marschner_lobb({33, 33, 33}), opt, dir_->path() / "ml");
    std::filesystem::create_directories(dir_->path() / "junk");
    std::ofstream(dir_->path() / "junk" / "dataset.meta") << "format something-else\n";
  }
  static void TearDownTestSuite() {
    delete dir_;
    dir_ = nullptr;
  }

  void SetUp() override {
    ASSERT_TRUE(service_.add_model_dir(dir_->path() / "ml"));
    port_ = service_.bind("127.0.0.1", 0);
    service_.start();
  }
  void TearDown() override { service_.stop(); }

  httplib::Client client() {
    httplib::Client c("127.0.0.1", port_);
    c.set_read_timeout(120, 0);
    return c;
  }

  httplib::Result post(const json& body) { return client().Post("/api/render", body.dump(), "application/json"); }

  static json timings(const httplib::Result& r) { return json::parse(r->get_header_value("X-Timings")); }

  static testing::TempDir* dir_;
  RenderService service_;
  int port_ = 0;
};

testing::TempDir* ServiceTest::dir_ = nullptr;

TEST(ServiceRegistry, EmptyRegistryListsNothing) {
  RenderService s;
  EXPECT_EQ(s.datasets_json(), json::array());
}

TEST(ServiceRegistry, MalformedDirectoryIsSkipped) {
  testing::TempDir dir;
  std::ofstream(dir / "dataset.meta") << "format nope\n";
  RenderService s;
  EXPECT_FALSE(s.add_model_dir(dir.path()));
  EXPECT_FALSE(s.add_model_dir(dir / "missing"));
  EXPECT_EQ(s.datasets_json().size(), 0u);
}

TEST(ServiceRequest, ParsesAndValidates) {
  const RenderRequest r = parse_render_request(base_request(64, 32));
  EXPECT_EQ(r.dataset, "ml");
  EXPECT_EQ(r.camera.width, 64);
  EXPECT_EQ(r.camera.height, 32);
  EXPECT_EQ(r.tf, tf_preset("warm"));
  EXPECT_EQ(r.config.shading, Shading::blinn_phong);
  EXPECT_EQ(r.quality, Quality::full);

  json bad = base_request();
  bad.erase("camera");
  EXPECT_THROW(parse_render_request(bad), ParameterError);
  bad = base_request();
  bad["quality"] = "ultra";
  EXPECT_THROW(parse_render_request(bad), ParameterError);
  bad = base_request();
  bad["camera"]["up"] = {1.0, 1.0, 1.0};
  bad["camera"]["position"] = {0.0, 0.0, 0.0};
  bad["camera"]["look_at"] = {2.0, 2.0, 2.0};
  EXPECT_THROW(parse_render_request(bad), ParameterError);
  bad = base_request();
  bad["transfer"] = {{"nodes", {{{"value", 0.5}, {"color", {1, 1, 1}}, {"opacity", 0.1}},
                                {{"value", 0.2}, {"color", {1, 1, 1}}, {"opacity", 0.1}}}}};
  EXPECT_THROW(parse_render_request(bad), ParameterError);
}

TEST(ServiceRequest, PreviewHalvesSizeAndDoublesStep) {
  json body = base_request(101, 60);
  body["quality"] = "preview";
  const RenderRequest r = effective_request(parse_render_request(body));
  EXPECT_EQ(r.camera.width, 50);
  EXPECT_EQ(r.camera.height, 30);
  EXPECT_DOUBLE_EQ(r.config.dt, 0.04);
}

TEST_F(ServiceTest, HealthAndCors) {
  auto r = client().Get("/api/health");
  ASSERT_TRUE(r);
  EXPECT_EQ(r->status, 200);
  EXPECT_EQ(json::parse(r->body)["status"], "ok");
  EXPECT_EQ(r->get_header_value("Access-Control-Allow-Origin"), "*");
  auto pre = client().Options("/api/render");
  ASSERT_TRUE(pre);
  EXPECT_EQ(pre->status, 204);
  EXPECT_EQ(pre->get_header_value("Access-Control-Allow-Origin"), "*");
}

TEST_F(ServiceTest, ListsRegisteredDataset) {
  auto r = client().Get("/api/datasets");
  ASSERT_TRUE(r);
  const json list = json::parse(r->body);
  ASSERT_EQ(list.size(), 1u);
  EXPECT_EQ(list[0]["name"], "ml");
  EXPECT_EQ(list[0]["blocks"], 8);
  EXPECT_EQ(list[0]["dims"], json::array({33, 33, 33}));
  EXPECT_EQ(list[0]["levels"], 3);
  const auto m = read_manifest(dir_->path() / "ml");
  EXPECT_EQ(list[0]["value_range"][0].get<double>(), m.range.min);
  EXPECT_EQ(list[0]["value_range"][1].get<double>(), m.range.max);
}

TEST_F(ServiceTest, PresetsAreSortedWithSpike) {
  auto r = client().Get("/api/presets");
  ASSERT_TRUE(r);
  const json p = json::parse(r->body);
  ASSERT_GE(p.size(), 3u);
  bool spike = false;
  for (const auto& preset : p) {
    double prev = -1.0;
    for (const auto& n : preset["nodes"]) {
      EXPECT_GE(n["value"].get<double>(), prev);
      prev = n["value"].get<double>();
    }
    spike = spike || preset["name"] == "spike";
  }
  EXPECT_TRUE(spike);
}

TEST_F(ServiceTest, TransparentTransferFunctionGivesBackground) {
  json body = base_request(20, 16);
  body.erase("preset");
  body["transfer"] = {{"dt_ref", 0.01},
                      {"nodes", {{{"value", 0.0}, {"color", {1, 1, 1}}, {"opacity", 0.0}},
                                 {{"value", 1.0}, {"color", {1, 1, 1}}, {"opacity", 0.0}}}}};
  auto r = post(body);
  ASSERT_TRUE(r);
  ASSERT_EQ(r->status, 200) << r->body;
  EXPECT_EQ(r->get_header_value("Content-Type"), "image/png");
  const Image8 img = decode_png(r->body);
  ASSERT_EQ(img.width, 20);
  ASSERT_EQ(img.height, 16);
  for (std::size_t i = 0; i < img.pixel_count(); ++i) {
    EXPECT_EQ(img.rgb[3 * i], 64);
    EXPECT_EQ(img.rgb[3 * i + 1], 128);
    EXPECT_EQ(img.rgb[3 * i + 2], 191);
  }
}

TEST_F(ServiceTest, RepeatedRequestIsByteIdentical) {
  auto a = post(base_request());
  auto b = post(base_request());
  ASSERT_TRUE(a && b);
  ASSERT_EQ(a->status, 200);
  ASSERT_EQ(b->status, 200);
  EXPECT_EQ(a->body, b->body);
}

TEST_F(ServiceTest, TimingsCompleteAndFetchOnlyOnce) {
  auto first = post(base_request());
  auto second = post(base_request());
  ASSERT_TRUE(first && second);
  for (const auto* r : {&first, &second}) {
    const json t = timings(*r);
    for (const char* k : {"fetch_s", "render_s", "composite_s", "merge_s", "total_s"}) {
      ASSERT_TRUE(t.contains(k)) << k;
    }
    const double sum = t["fetch_s"].get<double>() + t["render_s"].get<double>() +
                       t["composite_s"].get<double>() + t["merge_s"].get<double>();
    EXPECT_NEAR(t["total_s"].get<double>(), sum, 0.05 * sum);
  }
  EXPECT_GT(timings(first)["fetch_s"].get<double>(), 0.0);
  EXPECT_EQ(timings(second)["fetch_s"].get<double>(), 0.0);
}

TEST_F(ServiceTest, PreviewIsFasterThanFull) {
  ASSERT_TRUE(post(base_request(96, 96)));  // load models first
  json preview = base_request(96, 96);
  preview["quality"] = "preview";
  auto p = post(preview);
  auto f = post(base_request(96, 96));
  ASSERT_TRUE(p && f);
  ASSERT_EQ(p->status, 200);
  ASSERT_EQ(f->status, 200);
  EXPECT_EQ(p->get_header_value("X-Image-Size"), "48x48");
  EXPECT_EQ(decode_png(p->body).width, 48);
  EXPECT_LT(timings(p)["total_s"].get<double>(), timings(f)["total_s"].get<double>());
}

TEST_F(ServiceTest, ErrorStatuses) {
  json unknown = base_request();
  unknown["dataset"] = "nope";
  auto r = post(unknown);
  ASSERT_TRUE(r);
  EXPECT_EQ(r->status, 404);
  auto bad = client().Post("/api/render", "{not json", "application/json");
  ASSERT_TRUE(bad);
  EXPECT_EQ(bad->status, 400);
  json missing = base_request();
  missing.erase("camera");
  auto m = post(missing);
  ASSERT_TRUE(m);
  EXPECT_EQ(m->status, 400);
  EXPECT_TRUE(json::parse(m->body).contains("error"));
}

TEST_F(ServiceTest, BurstCoalescesToTwoRenders) {
  std::mutex mu;
  std::condition_variable cv;
  bool started = false, release = false;
  int calls = 0;
  service_.set_render_start_hook([&](const std::string&) {
    std::unique_lock lock(mu);
    if (calls++ > 0) return;
    started = true;
    cv.notify_all();
    cv.wait(lock, [&] { return release; });
  });
  const std::uint64_t before = service_.renders_executed();

  auto first = std::async(std::launch::async, [&] { return post(base_request(16, 16)); });
  {
    std::unique_lock lock(mu);
    cv.wait(lock, [&] { return started; });
  }
  const int burst = 6;
  std::atomic<int> superseded{0};
  std::vector<std::future<int>> rest;
  for (int i = 0; i < burst - 1; ++i) {
    rest.push_back(std::async(std::launch::async, [&] {
      auto r = post(base_request(16, 16));
      const int status = r ? r->status : -1;
      if (status == 409) ++superseded;
      return status;
    }));
    // let this request queue before the next one arrives
    while (superseded.load() < i) std::this_thread::sleep_for(std::chrono::milliseconds(1));
  }
  while (superseded.load() < burst - 2) std::this_thread::sleep_for(std::chrono::milliseconds(1));
  {
    std::lock_guard lock(mu);
    release = true;
  }
  cv.notify_all();

  auto r1 = first.get();
  ASSERT_TRUE(r1);
  EXPECT_EQ(r1->status, 200);
  int ok = 0, conflict = 0;
  for (auto& f : rest) {
    const int s = f.get();
    ok += s == 200;
    conflict += s == 409;
  }
  EXPECT_EQ(ok, 1);
  EXPECT_EQ(conflict, burst - 2);
  EXPECT_EQ(service_.renders_executed() - before, 2u);
}

}  // namespace
}  // namespace mfavis
