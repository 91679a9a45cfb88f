#pragma once

#include <cstddef>
#include <functional>

namespace frqinet {

/// Fixed-size fork/join helper. Work is split into contiguous blocks, one per
/// worker, so which thread runs an index never affects results written to
/// per-index slots.
class WorkerPool {
 public:
  /// 0 means std::thread::hardware_concurrency().
  explicit WorkerPool(std::size_t threads = 0);

  std::size_t threads() const { return threads_; }

  /// Calls fn(i) for i in [0, n); rethrows the first exception.
  void parallel_for(std::size_t n, const std::function<void(std::size_t)>& fn) const;

 private:
  std::size_t threads_;
};

}  // namespace frqinet
