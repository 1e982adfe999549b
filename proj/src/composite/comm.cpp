// Copyright 2026 The mfavis Authors
// SPDX-License-Identifier: Apache-2.0

#include "mfavis/composite/comm.hpp"

#include <sys/socket.h>
#include <unistd.h>

#include <cerrno>
#include <cstdint>
#include <cstring>
#include <exception>
#include <thread>

#include "mfavis/error.hpp"

namespace mfavis {

namespace {

std::string where(int worker, int round) {
  return "worker " + std::to_string(worker) + " round " + std::to_string(round);
}

}  // namespace

void Comm::account(int round, std::size_t bytes) {
  bytes_sent_ += bytes;
  if (bytes_per_round_.size() <= static_cast<std::size_t>(round)) {
    bytes_per_round_.resize(static_cast<std::size_t>(round) + 1, 0);
  }
  bytes_per_round_[static_cast<std::size_t>(round)] += bytes;
}

class MemoryComm final : public Comm {
 public:
  MemoryComm(MemoryNetwork* net, int self) : net_(net), self_(self) {}
  int self() const override { return self_; }

  void send(int to, int round, std::span<const float> data) override {
    net_->post(self_, to, round, std::vector<float>(data.begin(), data.end()));
    account(round, data.size_bytes());
  }
  std::vector<float> recv(int from, int round) override { return net_->take(self_, from, round); }
  std::vector<float> exchange(int partner, int round, std::span<const float> data) override {
    send(partner, round, data);
    return recv(partner, round);
  }

 private:
  MemoryNetwork* net_;
  int self_;
};

MemoryNetwork::MemoryNetwork(int n_workers)
    : n_(n_workers), inbox_(static_cast<std::size_t>(n_workers)) {}

std::unique_ptr<Comm> MemoryNetwork::endpoint(int worker) {
  return std::make_unique<MemoryComm>(this, worker);
}

void MemoryNetwork::inject_failure(int worker, int round) {
  std::lock_guard lock(mu_);
  failures_.insert({worker, round});
}

void MemoryNetwork::abort(const std::string& reason) {
  {
    std::lock_guard lock(mu_);
    if (!aborted_) aborted_ = reason;
  }
  cv_.notify_all();
}

std::optional<std::string> MemoryNetwork::abort_reason() {
  std::lock_guard lock(mu_);
  return aborted_;
}

void MemoryNetwork::post(int from, int to, int round, std::vector<float> data) {
  {
    std::lock_guard lock(mu_);
    if (failures_.count({from, round})) {
      const std::string msg = where(from, round) + ": channel to worker " + std::to_string(to) +
                              " failed";
      if (!aborted_) aborted_ = msg;
      cv_.notify_all();
      throw PipelineError(msg);
    }
    if (to < 0 || to >= n_) throw PipelineError(where(from, round) + ": no worker " + std::to_string(to));
    inbox_[static_cast<std::size_t>(to)][{from, round}] = std::move(data);
  }
  cv_.notify_all();
}

std::vector<float> MemoryNetwork::take(int self, int from, int round) {
  std::unique_lock lock(mu_);
  auto& box = inbox_[static_cast<std::size_t>(self)];
  cv_.wait(lock, [&] { return aborted_ || box.count({from, round}); });
  auto it = box.find({from, round});
  if (it == box.end()) {
    throw PipelineError(where(self, round) + ": receive from worker " + std::to_string(from) +
                        " aborted (" + *aborted_ + ")");
  }
  std::vector<float> out = std::move(it->second);
  box.erase(it);
  return out;
}

void write_all(int fd, const void* data, std::size_t n) {
  const char* p = static_cast<const char*>(data);
  while (n > 0) {
    const ssize_t w = ::send(fd, p, n, MSG_NOSIGNAL);
    if (w < 0 && errno == EINTR) continue;
    if (w <= 0) throw PipelineError(std::string("socket write failed: ") + std::strerror(errno));
    p += w;
    n -= static_cast<std::size_t>(w);
  }
}

void read_all(int fd, void* data, std::size_t n) {
  char* p = static_cast<char*>(data);
  while (n > 0) {
    const ssize_t r = ::read(fd, p, n);
    if (r < 0 && errno == EINTR) continue;
    if (r == 0) throw PipelineError("socket closed by peer");
    if (r < 0) throw PipelineError(std::string("socket read failed: ") + std::strerror(errno));
    p += r;
    n -= static_cast<std::size_t>(r);
  }
}

SocketComm::SocketComm(int self, std::vector<int> fds) : self_(self), fds_(std::move(fds)) {}

void SocketComm::send(int to, int round, std::span<const float> data) {
  try {
    const std::uint32_t r = static_cast<std::uint32_t>(round);
    const std::uint64_t count = data.size();
    const int fd = fds_.at(static_cast<std::size_t>(to));
    write_all(fd, &r, sizeof r);
    write_all(fd, &count, sizeof count);
    write_all(fd, data.data(), data.size_bytes());
  } catch (const std::exception& e) {
    throw PipelineError(where(self_, round) + ": send to worker " + std::to_string(to) + ": " +
                        e.what());
  }
  account(round, data.size_bytes());
}

std::vector<float> SocketComm::recv(int from, int round) {
  try {
    const int fd = fds_.at(static_cast<std::size_t>(from));
    std::uint32_t r = 0;
    std::uint64_t count = 0;
    read_all(fd, &r, sizeof r);
    read_all(fd, &count, sizeof count);
    if (r != static_cast<std::uint32_t>(round)) throw PipelineError("message from wrong round");
    std::vector<float> out(count);
    read_all(fd, out.data(), count * sizeof(float));
    return out;
  } catch (const std::exception& e) {
    throw PipelineError(where(self_, round) + ": receive from worker " + std::to_string(from) +
                        ": " + e.what());
  }
}

std::vector<float> SocketComm::exchange(int partner, int round, std::span<const float> data) {
  // both sides send at once, so one direction runs on a helper thread to keep
  // full socket buffers from deadlocking the pair
  std::exception_ptr send_error;
  std::thread sender([&] {
    try {
      send(partner, round, data);
    } catch (...) {
      send_error = std::current_exception();
    }
  });
  std::vector<float> got;
  std::exception_ptr recv_error;
  try {
    got = recv(partner, round);
  } catch (...) {
    recv_error = std::current_exception();
  }
  sender.join();
  if (send_error) std::rethrow_exception(send_error);
  if (recv_error) std::rethrow_exception(recv_error);
  return got;
}

}  // namespace mfavis
