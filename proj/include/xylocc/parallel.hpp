#pragma once

#include <atomic>
#include <condition_variable>
#include <cstddef>
#include <functional>
#include <mutex>
#include <queue>
#include <thread>
#include <vector>

namespace xylocc {

/// Fixed-size worker pool. parallel_for partitions [0, n) into chunks and
/// blocks until every index has been visited; the body receives indices, so
/// callers that write results[i] get deterministic, order-independent output.
class ThreadPool {
 public:
  explicit ThreadPool(unsigned n_threads = 0);
  ~ThreadPool();

  ThreadPool(const ThreadPool&) = delete;
  ThreadPool& operator=(const ThreadPool&) = delete;

  unsigned size() const { return static_cast<unsigned>(workers_.size()); }

  void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body);

 private:
  void submit(std::function<void()> job);

  std::vector<std::thread> workers_;
  std::queue<std::function<void()>> jobs_;
  std::mutex mutex_;
  std::condition_variable cv_;
  bool stop_ = false;
};

/// Process-wide pool sized from hardware_concurrency (override with
/// XYLOCC_THREADS). Sweep drivers share it.
ThreadPool& global_pool();

}  // namespace xylocc
