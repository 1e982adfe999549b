// Copyright 2026 The mfavis Authors
// SPDX-License-Identifier: Apache-2.0

#include "cli/cli.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <optional>
#include <sstream>

#include "CLI11.hpp"
#include "mfavis/composite/dataset.hpp"
#include "mfavis/composite/pipeline.hpp"
#include "mfavis/field/marschner_lobb.hpp"
#include "mfavis/io/image8.hpp"
#include "mfavis/io/raw_volume.hpp"
#include "mfavis/metrics/quality.hpp"
#include "mfavis/render/scene_io.hpp"
#include "mfavis/service/render_service.hpp"

namespace mfavis::cli {

namespace fs = std::filesystem;

int exit_code_for(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::io:
    case ErrorKind::format:
      return kIo;
    case ErrorKind::numeric:
    case ErrorKind::pipeline:
      return kNumeric;
    default:
      return kBadArgs;
  }
}

Camera default_camera(const Aabb& domain) {
  const Vec3 e = domain.extent();
  Camera c;
  c.look_at = domain.lo + e * 0.5;
  c.up = {0.0, 0.0, 1.0};
  c.fov_deg = 35.0;
  // bounding sphere just fits the vertical field of view
  const double radius = 0.5 * norm(e);
  const double dist = 1.05 * radius / std::sin(0.5 * c.fov_deg * std::numbers::pi / 180.0);
  c.position = c.look_at + normalize(Vec3{1.5, -1.2, 1.0}) * dist;
  return c;
}

namespace {

// "64" or "64,64,32"
Index3 parse_dims(const std::string& text, const char* what) {
  std::vector<int> v;
  std::stringstream ss(text);
  std::string tok;
  while (std::getline(ss, tok, ',')) {
    try {
      std::size_t used = 0;
      v.push_back(std::stoi(tok, &used));
      if (used != tok.size()) throw std::invalid_argument(tok);
    } catch (const std::exception&) {
      throw ParameterError(std::string(what) + ": '" + text + "' is not N or X,Y,Z");
    }
  }
  if (v.size() == 1) v = {v[0], v[0], v[0]};
  if (v.size() != 3) throw ParameterError(std::string(what) + ": '" + text + "' is not N or X,Y,Z");
  return {v[0], v[1], v[2]};
}

std::vector<int> parse_int_list(const std::string& text, const char* what) {
  std::vector<int> v;
  std::stringstream ss(text);
  std::string tok;
  while (std::getline(ss, tok, ',')) {
    try {
      v.push_back(std::stoi(tok));
    } catch (const std::exception&) {
      throw ParameterError(std::string(what) + ": bad entry '" + tok + "'");
    }
  }
  if (v.empty()) throw ParameterError(std::string(what) + " is empty");
  return v;
}

struct Shared {
  std::uint64_t seed = 0;  // every command is deterministic; kept for run manifests
  bool quiet = false;
};

struct SourceArgs {
  std::string models;
  std::string raw;
  std::string filter = "trilinear";
  int levels = 0;
};

struct SceneArgs {
  std::string camera, tf, config;
  std::string preset = "grayscale";
  int width = 0, height = 0;
};

void add_source_options(CLI::App* cmd, SourceArgs& a) {
  auto* models = cmd->add_option("--models", a.models, "encoded model directory");
  auto* raw = cmd->add_option("--raw", a.raw, "raw volume (sidecar next to it) rendered by filtering");
  models->excludes(raw);
  cmd->add_option("--filter", a.filter, "filter for --raw: nearest|trilinear|tricubic|catmull_rom")
      ->capture_default_str();
  cmd->add_option("--levels", a.levels, "partition levels for --raw")->capture_default_str();
}

void add_scene_options(CLI::App* cmd, SceneArgs& a) {
  cmd->add_option("--camera", a.camera, "camera document");
  cmd->add_option("--tf", a.tf, "transfer function document");
  cmd->add_option("--preset", a.preset, "transfer function preset when --tf is absent")
      ->capture_default_str();
  cmd->add_option("--config", a.config, "ray-cast settings document");
  cmd->add_option("--width", a.width, "image width (default: camera file, else 768)");
  cmd->add_option("--height", a.height, "image height (default: camera file, else 768)");
}

Dataset open_source(const SourceArgs& a) {
  if (!a.models.empty()) return open_model_dataset(a.models, /*resident=*/false);
  if (!a.raw.empty()) {
    const auto filter = parse_filter(a.filter);
    if (!filter) throw ParameterError("unknown filter '" + a.filter + "'");
    return open_raw_dataset(a.raw, a.levels, *filter, /*resident=*/false);
  }
  throw ParameterError("one of --models or --raw is required");
}

struct Scene {
  Camera camera;
  TransferFunction tf;
  RayCastConfig cfg;
};

Scene load_scene(const SceneArgs& a, const Aabb& domain) {
  Camera camera = default_camera(domain);
  if (!a.camera.empty()) camera = read_camera(KvDocument::load(a.camera), camera);
  if (a.width > 0) camera.width = a.width;
  if (a.height > 0) camera.height = a.height;
  camera.validate();
  TransferFunction tf =
      a.tf.empty() ? tf_preset(a.preset) : read_transfer_function(KvDocument::load(a.tf));
  RayCastConfig cfg;
  if (!a.config.empty()) cfg = read_raycast_config(KvDocument::load(a.config));
  cfg.validate();
  return {camera, std::move(tf), cfg};
}

std::ofstream open_output(const fs::path& path, std::ios::openmode mode = std::ios::trunc) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream f(path, std::ios::out | mode);
  if (!f) throw IoError("cannot write " + path.string());
  return f;
}

int cmd_gen(const Shared& s, const std::string& dims_text, const std::string& out,
            const std::string& dtype, double f_m, double alpha, std::ostream& os) {
  const Index3 dims = parse_dims(dims_text, "--dims");
  for (int d : dims) {
    if (d < 2) throw ParameterError("--dims: every axis needs at least 2 samples");
  }
  const RawType type = parse_raw_type(dtype);
  const ScalarGrid3D grid = generate_marschner_lobb(dims, kMarschnerLobbDomain, f_m, alpha);
  const fs::path path(out);
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  save_volume(grid, path, type);
  const VolumeMeta meta = read_sidecar(path);
  if (!s.quiet) {
    os << "wrote " << path.string() << " dims " << format_index3(dims) << " dtype "
       << to_string(type) << "\n"
       << "value_range " << format_double(meta.value_min.value_or(grid.value_min())) << " "
       << format_double(meta.value_max.value_or(grid.value_max())) << "\n";
  }
  return kOk;
}

int cmd_encode(const Shared& s, const std::string& in, const std::string& out, int levels,
               const std::string& ctrl, int degree, int overlap, bool adaptive, double e_max,
               int threads, std::string name, std::ostream& os) {
  const ScalarGrid3D grid = load_volume(in);
  DatasetEncodeOptions opt;
  opt.levels = levels;
  opt.threads = threads;
  opt.overlap = overlap;
  opt.name = name.empty() ? fs::path(in).stem().string() : std::move(name);
  opt.encode.degree = degree;
  opt.encode.adaptive = adaptive;
  opt.encode.e_max = e_max;
  if (ctrl != "match") {
    const Index3 c = parse_dims(ctrl, "--ctrl");
    if (adaptive) {
      opt.encode.ctrl_cap = c;
    } else {
      opt.ctrl = c;
    }
  }
  const DatasetManifest m = encode_dataset(grid, opt, out);
  if (!s.quiet) {
    for (const BlockSummary& b : m.blocks) {
      char line[160];
      std::snprintf(line, sizeof line, "block %d ctrl %s e_max %.6g cr %.4f%s\n", b.id,
                    format_index3(b.n_ctrl).c_str(), b.e_max_achieved, b.compression_ratio,
                    b.capped ? " capped" : "");
      os << line;
    }
    os << "wrote " << m.blocks.size() << " models to " << out << "\n";
  }
  return kOk;
}

int cmd_render(const Shared& s, const SourceArgs& src, const SceneArgs& scene, int workers,
               bool process, int slots, const std::string& out, std::string timings,
               std::ostream& os) {
  Dataset ds = open_source(src);
  const Scene sc = load_scene(scene, ds.decomposition().domain());
  PipelineOptions opt;
  opt.n_workers = workers > 0 ? workers : ds.block_count();
  opt.process_mode = process;
  opt.slots = slots;
  const PipelineResult r = run_pipeline(ds, sc.camera, sc.tf, sc.cfg, opt);

  const fs::path image_path(out);
  if (image_path.has_parent_path()) fs::create_directories(image_path.parent_path());
  write_png(r.image, image_path);

  const fs::path csv = timings.empty() ? fs::path(image_path).replace_extension(".csv")
                                       : fs::path(timings);
  const bool fresh = !fs::exists(csv) || fs::file_size(csv) == 0;
  std::ofstream f = open_output(csv, std::ios::app);
  if (fresh) write_bench_header(f);
  write_bench_row(f, {opt.n_workers, r.timings});
  if (!f) throw IoError("cannot write " + csv.string());

  if (!s.quiet) {
    char line[200];
    std::snprintf(line, sizeof line,
                  "workers %d fetch %.4fs render %.4fs composite %.4fs merge %.4fs total %.4fs\n",
                  opt.n_workers, r.timings.fetch, r.timings.render, r.timings.composite,
                  r.timings.merge, r.timings.total);
    os << "wrote " << image_path.string() << " (" << r.image.width << "x" << r.image.height
       << ") and " << csv.string() << "\n"
       << line;
  }
  return kOk;
}

int cmd_bench(const Shared& s, const SourceArgs& src, const SceneArgs& scene,
              const std::string& sweep, int repeats, bool process, int slots,
              const std::string& out, std::ostream& os) {
  Dataset ds = open_source(src);
  const Scene sc = load_scene(scene, ds.decomposition().domain());
  std::vector<int> counts;
  if (sweep.empty()) {
    for (int n = 1; n <= ds.block_count(); n *= 2) counts.push_back(n);
  } else {
    counts = parse_int_list(sweep, "--sweep");
  }
  if (repeats < 1) throw ParameterError("--repeats must be at least 1");
  PipelineOptions base;
  base.process_mode = process;
  base.slots = slots;
  const auto rows =
      run_bench([&](int) -> Dataset& { return ds; }, sc.camera, sc.tf, sc.cfg, counts, repeats, base);

  std::ostringstream csv;
  write_bench_header(csv);
  for (const BenchRow& row : rows) write_bench_row(csv, row);
  if (!out.empty()) {
    std::ofstream f = open_output(out);
    f << csv.str();
    if (!f) throw IoError("cannot write " + out);
  }
  if (!s.quiet || out.empty()) os << csv.str();
  return kOk;
}

int cmd_compare(const std::string& test, const std::string& ref, const std::string& out,
                std::ostream& os) {
  const Image8 a = read_png(test);
  const Image8 b = read_png(ref);
  const QualityReport r = image_metrics(a, b);
  const std::string line = to_string(r) + "\n";
  if (!out.empty()) {
    std::ofstream f = open_output(out);
    f << line;
  }
  os << line;
  return kOk;
}

int cmd_serve(const Shared& s, const std::string& host, int port,
              const std::vector<std::string>& models, std::ostream& os) {
  RenderService service;
  for (const std::string& m : models) {
    const fs::path dir(m);
    if (fs::exists(dir / kManifestFile)) {
      service.add_model_dir(dir);
      continue;
    }
    if (!fs::is_directory(dir)) throw IoError("no such model directory " + m);
    std::vector<fs::path> subdirs;
    for (const auto& e : fs::directory_iterator(dir)) {
      if (e.is_directory()) subdirs.push_back(e.path());
    }
    std::sort(subdirs.begin(), subdirs.end());
    for (const auto& d : subdirs) service.add_model_dir(d);
  }
  const int bound = service.bind(host, port);
  if (!s.quiet) {
    os << "serving " << service.datasets_json().size() << " dataset(s) on http://" << host << ":"
       << bound << "\n"
       << std::flush;
  }
  service.listen();
  return kOk;
}

std::string one_line(std::string text) {
  std::replace(text.begin(), text.end(), '\n', ' ');
  while (!text.empty() && text.back() == ' ') text.pop_back();
  return text;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"mfavis: MFA volume encoding, distributed rendering and quality metrics", "mfavis"};
  app.require_subcommand(1);
  app.fallthrough();
  Shared shared;
  app.add_option("--seed", shared.seed, "random seed recorded with the run (commands are deterministic)");
  app.add_flag("--quiet,-q", shared.quiet, "suppress progress output");

  // gen-ml
  auto* gen = app.add_subcommand("gen-ml", "write a Marschner-Lobb raw volume plus sidecar");
  std::string gen_dims, gen_out, gen_dtype = "f32";
  double gen_fm = 6.0, gen_alpha = 0.25;
  gen->add_option("--dims", gen_dims, "N or X,Y,Z samples")->required();
  gen->add_option("--out", gen_out, "raw output path")->required();
  gen->add_option("--dtype", gen_dtype, "f32|f64|u8")->capture_default_str();
  gen->add_option("--fm", gen_fm, "ripple frequency")->capture_default_str();
  gen->add_option("--alpha", gen_alpha, "ripple weight")->capture_default_str();

  // encode
  auto* enc = app.add_subcommand("encode", "partition a raw volume and encode every block");
  std::string enc_in, enc_out, enc_ctrl = "match", enc_name;
  int enc_levels = 0, enc_degree = 2, enc_threads = 0, enc_overlap = DatasetEncodeOptions{}.overlap;
  bool enc_adaptive = false;
  double enc_emax = 1e-3;
  enc->add_option("--in", enc_in, "raw volume (sidecar next to it)")->required();
  enc->add_option("--out", enc_out, "model directory")->required();
  enc->add_option("--levels", enc_levels, "bisection levels (2^levels blocks)")->capture_default_str();
  enc->add_option("--ctrl", enc_ctrl, "'match' (interpolate every fitted sample) or N or X,Y,Z")
      ->capture_default_str();
  enc->add_option("--degree", enc_degree)->capture_default_str();
  enc->add_option("--overlap", enc_overlap, "extra samples each block fits past internal faces")
      ->capture_default_str();
  enc->add_flag("--adaptive", enc_adaptive, "refine knots until --e-max is met (--ctrl caps)");
  enc->add_option("--e-max", enc_emax, "relative error target for --adaptive")->capture_default_str();
  enc->add_option("--threads", enc_threads, "encoder threads, 0 = all cores");
  enc->add_option("--name", enc_name, "dataset name (default: input stem)");

  // render
  auto* ren = app.add_subcommand("render", "render a dataset through the distributed pipeline");
  SourceArgs ren_src;
  SceneArgs ren_scene;
  int ren_workers = 0, ren_slots = 0;
  bool ren_process = false;
  std::string ren_out = "render.png", ren_timings;
  add_source_options(ren, ren_src);
  add_scene_options(ren, ren_scene);
  ren->add_option("--workers", ren_workers, "worker count, power of two (default: one per block)");
  ren->add_flag("--process", ren_process, "one OS process per worker");
  ren->add_option("--slots", ren_slots, "workers computing at once, 0 = cores");
  ren->add_option("--out", ren_out, "PNG output")->capture_default_str();
  ren->add_option("--timings", ren_timings, "CSV to append the timing row to (default: <out>.csv)");

  // bench
  auto* ben = app.add_subcommand("bench", "time the pipeline over a sweep of worker counts");
  SourceArgs ben_src;
  SceneArgs ben_scene;
  std::string ben_sweep, ben_out;
  int ben_repeats = 3, ben_slots = 0;
  bool ben_process = false;
  add_source_options(ben, ben_src);
  add_scene_options(ben, ben_scene);
  ben->add_option("--sweep", ben_sweep, "worker counts, e.g. 1,2,4,8 (default: 1..blocks)");
  ben->add_option("--repeats", ben_repeats, "runs per count; the median-total run is kept")
      ->capture_default_str();
  ben->add_flag("--process", ben_process, "one OS process per worker");
  ben->add_option("--slots", ben_slots, "workers computing at once, 0 = cores");
  ben->add_option("--out", ben_out, "CSV output (default: stdout)");

  // compare
  auto* cmp = app.add_subcommand("compare", "MSE, PSNR and SSIM of a test image against a reference");
  std::string cmp_test, cmp_ref, cmp_out;
  cmp->add_option("test", cmp_test, "test PNG")->required();
  cmp->add_option("reference", cmp_ref, "reference PNG")->required();
  cmp->add_option("--out", cmp_out, "also write the report here");

  // serve
  auto* srv = app.add_subcommand("serve", "HTTP render service");
  std::string srv_host = "127.0.0.1";
  int srv_port = 8080;
  std::vector<std::string> srv_models;
  srv->add_option("--host", srv_host)->capture_default_str();
  srv->add_option("--port", srv_port)->capture_default_str();
  srv->add_option("--models", srv_models,
                  "model directory, or a directory of model directories (repeatable)");

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kOk;
  } catch (const CLI::ParseError& e) {
    err << "error: args: " << one_line(e.what()) << "\n";
    return kBadArgs;
  }

  try {
    if (gen->parsed()) return cmd_gen(shared, gen_dims, gen_out, gen_dtype, gen_fm, gen_alpha, out);
    if (enc->parsed()) {
      return cmd_encode(shared, enc_in, enc_out, enc_levels, enc_ctrl, enc_degree, enc_overlap, enc_adaptive,
                        enc_emax, enc_threads, enc_name, out);
    }
    if (ren->parsed()) {
      return cmd_render(shared, ren_src, ren_scene, ren_workers, ren_process, ren_slots, ren_out,
                        ren_timings, out);
    }
    if (ben->parsed()) {
      return cmd_bench(shared, ben_src, ben_scene, ben_sweep, ben_repeats, ben_process, ben_slots,
                       ben_out, out);
    }
    if (cmp->parsed()) return cmd_compare(cmp_test, cmp_ref, cmp_out, out);
    if (srv->parsed()) return cmd_serve(shared, srv_host, srv_port, srv_models, out);
  } catch (const Error& e) {
    err << "error: " << to_string(e.kind()) << ": " << one_line(e.what()) << "\n";
    return exit_code_for(e.kind());
  } catch (const fs::filesystem_error& e) {
    err << "error: io: " << one_line(e.what()) << "\n";
    return kIo;
  } catch (const std::exception& e) {
    err << "error: internal: " << one_line(e.what()) << "\n";
    return kNumeric;
  }
  return kBadArgs;
}

}  // namespace mfavis::cli
