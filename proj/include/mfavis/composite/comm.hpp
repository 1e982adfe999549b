// Copyright 2026 The mfavis Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <condition_variable>
#include <cstddef>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace mfavis {

// Point-to-point channel seen by one worker. `exchange` sends `data` to
// `partner` and returns what the partner sent this worker for the same round.
// Failures surface as PipelineError naming the worker and round.
class Comm {
 public:
  virtual ~Comm() = default;
  virtual int self() const = 0;
  virtual std::vector<float> exchange(int partner, int round, std::span<const float> data) = 0;
  virtual void send(int to, int round, std::span<const float> data) = 0;
  virtual std::vector<float> recv(int from, int round) = 0;

  std::size_t bytes_sent() const { return bytes_sent_; }
  const std::vector<std::size_t>& bytes_per_round() const { return bytes_per_round_; }

 protected:
  void account(int round, std::size_t bytes);

 private:
  std::size_t bytes_sent_ = 0;
  std::vector<std::size_t> bytes_per_round_;
};

// In-process mailboxes shared by worker threads. abort() wakes every blocked
// receiver so one failing worker cannot hang the others.
class MemoryNetwork {
 public:
  explicit MemoryNetwork(int n_workers);

  std::unique_ptr<Comm> endpoint(int worker);

  /// Test hook: `worker`'s send in `round` fails as if the channel broke.
  void inject_failure(int worker, int round);
  void abort(const std::string& reason);
  std::optional<std::string> abort_reason();

  int size() const { return n_; }

 private:
  friend class MemoryComm;
  using Key = std::pair<int, int>;  // (from, round)

  void post(int from, int to, int round, std::vector<float> data);
  std::vector<float> take(int self, int from, int round);

  int n_;
  std::mutex mu_;
  std::condition_variable cv_;
  std::vector<std::map<Key, std::vector<float>>> inbox_;
  std::set<Key> failures_;
  std::optional<std::string> aborted_;
};

// Stream sockets between processes; fds[j] is this worker's end of the
// connection to worker j (-1 for itself). Messages are framed as
// (u32 round, u64 float count, floats).
class SocketComm final : public Comm {
 public:
  SocketComm(int self, std::vector<int> fds);
  int self() const override { return self_; }
  std::vector<float> exchange(int partner, int round, std::span<const float> data) override;
  void send(int to, int round, std::span<const float> data) override;
  std::vector<float> recv(int from, int round) override;

 private:
  int self_;
  std::vector<int> fds_;
};

// Blocking helpers on connected stream sockets; throw PipelineError on failure.
// Writing to a closed peer fails with an error instead of raising SIGPIPE.
void write_all(int fd, const void* data, std::size_t n);
void read_all(int fd, void* data, std::size_t n);

}  // namespace mfavis
