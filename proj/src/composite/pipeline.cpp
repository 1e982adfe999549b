// Copyright 2026 The mfavis Authors
// SPDX-License-Identifier: Apache-2.0

#include "mfavis/composite/pipeline.hpp"

#include <semaphore.h>
#include <signal.h>
#include <sys/mman.h>
#include <sys/socket.h>
#include <sys/wait.h>
#include <unistd.h>

#include <algorithm>
#include <chrono>
#include <cstdint>
#include <cstdio>
#include <exception>
#include <thread>

#include "mfavis/composite/binary_swap.hpp"
#include "mfavis/composite/comm.hpp"
#include "mfavis/composite/over.hpp"
#include "mfavis/composite/visibility.hpp"
#include "mfavis/error.hpp"

namespace mfavis {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

// Counting semaphore in shared anonymous memory, usable across fork().
class Slots {
 public:
  explicit Slots(int count) {
    void* mem = ::mmap(nullptr, sizeof(sem_t), PROT_READ | PROT_WRITE, MAP_SHARED | MAP_ANONYMOUS,
                       -1, 0);
    if (mem == MAP_FAILED) throw PipelineError("cannot map worker semaphore");
    sem_ = static_cast<sem_t*>(mem);
    if (::sem_init(sem_, 1, static_cast<unsigned>(count)) != 0) {
      ::munmap(mem, sizeof(sem_t));
      throw PipelineError("cannot initialise worker semaphore");
    }
  }
  ~Slots() {
    ::sem_destroy(sem_);
    ::munmap(sem_, sizeof(sem_t));
  }
  Slots(const Slots&) = delete;
  Slots& operator=(const Slots&) = delete;

  void acquire() {
    while (::sem_wait(sem_) != 0) {
    }
  }
  void release() { ::sem_post(sem_); }

 private:
  sem_t* sem_;
};

class SlotGuard {
 public:
  explicit SlotGuard(Slots& s) : s_(s) { s_.acquire(); }
  ~SlotGuard() { s_.release(); }
  SlotGuard(const SlotGuard&) = delete;
  SlotGuard& operator=(const SlotGuard&) = delete;

 private:
  Slots& s_;
};

struct Plan {
  int n_workers = 1;
  int per_worker = 1;
  std::vector<int> block_rank;   // visibility rank per block
  std::vector<int> worker_rank;  // min over the worker's blocks
};

Plan make_plan(const Dataset& ds, const Camera& camera, int n_workers) {
  const int blocks = ds.block_count();
  if (n_workers < 1 || (n_workers & (n_workers - 1)) != 0) {
    throw ParameterError("worker count must be a power of two, got " + std::to_string(n_workers));
  }
  if (n_workers > blocks || blocks % n_workers != 0) {
    throw ParameterError("worker count " + std::to_string(n_workers) +
                         " must divide the block count " + std::to_string(blocks));
  }
  Plan p;
  p.n_workers = n_workers;
  p.per_worker = blocks / n_workers;
  p.block_rank = visibility_ranks(visibility_order(ds.decomposition(), camera.position));
  p.worker_rank.assign(static_cast<std::size_t>(n_workers), blocks);
  for (int b = 0; b < blocks; ++b) {
    auto& r = p.worker_rank[static_cast<std::size_t>(b / p.per_worker)];
    r = std::min(r, p.block_rank[static_cast<std::size_t>(b)]);
  }
  return p;
}

// Fetch and render of one worker's blocks, folded front to back.
PartialImage fetch_and_render(Dataset& ds, const Plan& plan, int worker, const Camera& camera,
                              const TransferFunction& tf, const RayCastConfig& cfg, Slots& slots,
                              WorkerReport& report) {
  report.worker = worker;
  report.blocks.clear();
  for (int i = 0; i < plan.per_worker; ++i) report.blocks.push_back(worker * plan.per_worker + i);

  std::vector<RenderSource> sources;
  {
    SlotGuard g(slots);
    const auto t0 = Clock::now();
    bool any = false;
    for (int b : report.blocks) {
      bool fetched = false;
      sources.push_back(ds.source(b, &fetched));
      any = any || fetched;
    }
    report.fetched = any;
    report.fetch_s = any ? seconds_since(t0) : 0.0;
  }

  SlotGuard g(slots);
  const auto t0 = Clock::now();
  std::vector<int> order(report.blocks.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = static_cast<int>(i);
  std::sort(order.begin(), order.end(), [&](int a, int b) {
    return plan.block_rank[static_cast<std::size_t>(report.blocks[static_cast<std::size_t>(a)])] <
           plan.block_rank[static_cast<std::size_t>(report.blocks[static_cast<std::size_t>(b)])];
  });
  PartialImage acc;
  for (std::size_t i = 0; i < order.size(); ++i) {
    const int local = order[i];
    const int block = report.blocks[static_cast<std::size_t>(local)];
    PartialImage img = render_block(sources[static_cast<std::size_t>(local)],
                                    ds.decomposition().block(block).bounds, camera, tf, cfg,
                                    ds.range(), block);
    img.order_key = plan.block_rank[static_cast<std::size_t>(block)];
    acc = i == 0 ? std::move(img) : over_images(acc, img);
  }
  acc.order_key = plan.worker_rank[static_cast<std::size_t>(worker)];
  report.render_s = seconds_since(t0);
  return acc;
}

int slot_count(const PipelineOptions& opt) {
  if (opt.slots > 0) return opt.slots;
  return std::max(1, static_cast<int>(std::thread::hardware_concurrency()));
}

PipelineResult finish(std::vector<OwnedRange> ranges, std::vector<WorkerReport> reports,
                      double composite_s, const Camera& camera, const RayCastConfig& cfg) {
  PipelineResult res;
  res.workers = std::move(reports);
  for (const auto& w : res.workers) {
    res.timings.fetch = std::max(res.timings.fetch, w.fetch_s);
    res.timings.render = std::max(res.timings.render, w.render_s);
  }
  res.timings.composite = composite_s;
  const auto t0 = Clock::now();
  res.composited = assemble(ranges, camera.width, camera.height);
  res.image = to_image8(res.composited, cfg.background);
  res.timings.merge = seconds_since(t0);
  res.timings.finish();
  return res;
}

PipelineResult run_threads(Dataset& ds, const Plan& plan, const Camera& camera,
                           const TransferFunction& tf, const RayCastConfig& cfg,
                           const PipelineOptions& opt) {
  const std::size_t n = static_cast<std::size_t>(plan.n_workers);
  Slots slots(slot_count(opt));
  std::vector<PartialImage> partials(n);
  std::vector<WorkerReport> reports(n);
  std::vector<std::exception_ptr> errors(n);
  {
    std::vector<std::jthread> threads;
    for (std::size_t w = 0; w < n; ++w) {
      threads.emplace_back([&, w] {
        try {
          partials[w] = fetch_and_render(ds, plan, static_cast<int>(w), camera, tf, cfg, slots,
                                         reports[w]);
        } catch (...) {
          errors[w] = std::current_exception();
        }
      });
    }
  }
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
  const auto t0 = Clock::now();
  std::vector<OwnedRange> ranges = binary_swap(partials, plan.worker_rank);
  const double composite_s = seconds_since(t0);
  return finish(std::move(ranges), std::move(reports), composite_s, camera, cfg);
}

// Control channel framing, child -> parent: u8 tag then payload.
enum : std::uint8_t { kTagError = 0, kTagRendered = 1, kTagOwned = 2 };

void send_error(int fd, const std::string& msg) {
  const std::uint8_t tag = kTagError;
  const std::uint32_t len = static_cast<std::uint32_t>(msg.size());
  try {
    write_all(fd, &tag, 1);
    write_all(fd, &len, sizeof len);
    write_all(fd, msg.data(), msg.size());
  } catch (...) {
  }
}

std::uint8_t read_tag(int fd, int worker) {
  std::uint8_t tag = 0;
  try {
    read_all(fd, &tag, 1);
  } catch (const std::exception&) {
    throw PipelineError("worker " + std::to_string(worker) + " exited without reporting");
  }
  if (tag == kTagError) {
    std::uint32_t len = 0;
    read_all(fd, &len, sizeof len);
    std::string msg(len, '\0');
    read_all(fd, msg.data(), len);
    throw PipelineError("worker " + std::to_string(worker) + ": " + msg);
  }
  return tag;
}

[[noreturn]] void child_main(Dataset& ds, const Plan& plan, int w, const Camera& camera,
                             const TransferFunction& tf, const RayCastConfig& cfg, Slots& slots,
                             int ctl, std::vector<int> mesh) {
  int code = 0;
  try {
    WorkerReport rep;
    const PartialImage partial = fetch_and_render(ds, plan, w, camera, tf, cfg, slots, rep);
    const std::uint8_t tag = kTagRendered;
    const std::uint8_t fetched = rep.fetched ? 1 : 0;
    write_all(ctl, &tag, 1);
    write_all(ctl, &rep.fetch_s, sizeof(double));
    write_all(ctl, &rep.render_s, sizeof(double));
    write_all(ctl, &fetched, 1);

    std::uint8_t go = 0;
    read_all(ctl, &go, 1);
    SocketComm comm(w, std::move(mesh));
    const OwnedRange owned = binary_swap_worker(comm, plan.n_workers, partial, plan.worker_rank);
    const std::uint8_t tag2 = kTagOwned;
    const std::uint64_t range[2] = {owned.begin, owned.end};
    write_all(ctl, &tag2, 1);
    write_all(ctl, range, sizeof range);
    write_all(ctl, owned.rgba.data(), owned.rgba.size() * sizeof(float));
  } catch (const std::exception& e) {
    send_error(ctl, e.what());
    code = 1;
  }
  ::_exit(code);
}

PipelineResult run_processes(Dataset& ds, const Plan& plan, const Camera& camera,
                             const TransferFunction& tf, const RayCastConfig& cfg,
                             const PipelineOptions& opt) {
  const int n = plan.n_workers;
  Slots slots(slot_count(opt));
  // mesh[i][j]: worker i's end of the i<->j socket
  std::vector<std::vector<int>> mesh(static_cast<std::size_t>(n), std::vector<int>(static_cast<std::size_t>(n), -1));
  std::vector<int> ctl_parent(static_cast<std::size_t>(n), -1), ctl_child(static_cast<std::size_t>(n), -1);
  std::vector<int> all_fds;
  auto close_all = [&] {
    for (int fd : all_fds) ::close(fd);
    all_fds.clear();
  };
  auto make_pair = [&](int& a, int& b) {
    int sv[2];
    if (::socketpair(AF_UNIX, SOCK_STREAM, 0, sv) != 0) {
      close_all();
      throw PipelineError("socketpair failed");
    }
    a = sv[0];
    b = sv[1];
    all_fds.push_back(a);
    all_fds.push_back(b);
  };
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) {
      make_pair(mesh[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)],
                mesh[static_cast<std::size_t>(j)][static_cast<std::size_t>(i)]);
    }
    make_pair(ctl_parent[static_cast<std::size_t>(i)], ctl_child[static_cast<std::size_t>(i)]);
  }

  std::fflush(nullptr);
  std::vector<pid_t> pids;
  for (int w = 0; w < n; ++w) {
    const pid_t pid = ::fork();
    if (pid < 0) {
      for (pid_t p : pids) ::kill(p, SIGKILL);
      for (pid_t p : pids) ::waitpid(p, nullptr, 0);
      close_all();
      throw PipelineError("fork failed for worker " + std::to_string(w));
    }
    if (pid == 0) {
      const auto& mine = mesh[static_cast<std::size_t>(w)];
      const int ctl = ctl_child[static_cast<std::size_t>(w)];
      for (int fd : all_fds) {
        if (fd != ctl && std::find(mine.begin(), mine.end(), fd) == mine.end()) ::close(fd);
      }
      child_main(ds, plan, w, camera, tf, cfg, slots, ctl, mine);
    }
    pids.push_back(pid);
  }
  for (int fd : all_fds) {
    if (std::find(ctl_parent.begin(), ctl_parent.end(), fd) == ctl_parent.end()) ::close(fd);
  }
  all_fds = ctl_parent;

  auto reap = [&](bool kill_first) {
    if (kill_first) {
      for (pid_t p : pids) ::kill(p, SIGKILL);
    }
    for (pid_t p : pids) ::waitpid(p, nullptr, 0);
    close_all();
  };

  std::vector<WorkerReport> reports(static_cast<std::size_t>(n));
  std::vector<OwnedRange> ranges(static_cast<std::size_t>(n));
  double composite_s = 0.0;
  try {
    for (int w = 0; w < n; ++w) {
      const int fd = ctl_parent[static_cast<std::size_t>(w)];
      auto& rep = reports[static_cast<std::size_t>(w)];
      if (read_tag(fd, w) != kTagRendered) throw PipelineError("worker " + std::to_string(w) + ": protocol error");
      std::uint8_t fetched = 0;
      read_all(fd, &rep.fetch_s, sizeof(double));
      read_all(fd, &rep.render_s, sizeof(double));
      read_all(fd, &fetched, 1);
      rep.worker = w;
      rep.fetched = fetched != 0;
      for (int i = 0; i < plan.per_worker; ++i) rep.blocks.push_back(w * plan.per_worker + i);
    }
    // every worker has rendered; the swap starts together
    const auto t0 = Clock::now();
    const std::uint8_t go = 1;
    for (int fd : ctl_parent) write_all(fd, &go, 1);
    for (int w = 0; w < n; ++w) {
      const int fd = ctl_parent[static_cast<std::size_t>(w)];
      if (read_tag(fd, w) != kTagOwned) throw PipelineError("worker " + std::to_string(w) + ": protocol error");
      std::uint64_t range[2] = {0, 0};
      read_all(fd, range, sizeof range);
      auto& r = ranges[static_cast<std::size_t>(w)];
      r.worker = w;
      r.begin = range[0];
      r.end = range[1];
      if (r.end < r.begin) throw PipelineError("worker " + std::to_string(w) + ": bad range");
      r.rgba.resize(4 * (r.end - r.begin));
      read_all(fd, r.rgba.data(), r.rgba.size() * sizeof(float));
    }
    composite_s = seconds_since(t0);
  } catch (...) {
    reap(true);
    throw;
  }
  reap(false);
  return finish(std::move(ranges), std::move(reports), composite_s, camera, cfg);
}

}  // namespace

PipelineResult run_pipeline(Dataset& dataset, const Camera& camera, const TransferFunction& tf,
                            const RayCastConfig& cfg, const PipelineOptions& opt) {
  camera.validate();
  cfg.validate();
  const Plan plan = make_plan(dataset, camera, opt.n_workers);
  return opt.process_mode ? run_processes(dataset, plan, camera, tf, cfg, opt)
                          : run_threads(dataset, plan, camera, tf, cfg, opt);
}

std::vector<BenchRow> run_bench(const std::function<Dataset&(int n_workers)>& dataset_for,
                                const Camera& camera, const TransferFunction& tf,
                                const RayCastConfig& cfg, const std::vector<int>& worker_counts,
                                int repeats, const PipelineOptions& base) {
  if (repeats < 1) throw ParameterError("repeats must be at least 1");
  std::vector<BenchRow> rows;
  for (int n : worker_counts) {
    PipelineOptions opt = base;
    opt.n_workers = n;
    std::vector<StageTimings> runs;
    for (int r = 0; r < repeats; ++r) {
      runs.push_back(run_pipeline(dataset_for(n), camera, tf, cfg, opt).timings);
    }
    std::sort(runs.begin(), runs.end(),
              [](const StageTimings& a, const StageTimings& b) { return a.total < b.total; });
    rows.push_back({n, runs[runs.size() / 2]});
  }
  return rows;
}

void write_bench_header(std::ostream& out) {
  out << "n_workers,fetch_s,render_s,composite_s,merge_s,total_s\n";
}

void write_bench_row(std::ostream& out, const BenchRow& row) {
  char buf[256];
  const StageTimings& t = row.timings;
  std::snprintf(buf, sizeof buf, "%d,%.9g,%.9g,%.9g,%.9g,%.9g\n", row.n_workers, t.fetch, t.render,
                t.composite, t.merge, t.total);
  out << buf;
}

}  // namespace mfavis
