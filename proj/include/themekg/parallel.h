#pragma once

#include <algorithm>
#include <atomic>
#include <exception>
#include <functional>
#include <future>
#include <map>
#include <mutex>
#include <string>
#include <thread>
#include <vector>

namespace themekg {

// Runs fn(i) for i in [0, n) on up to `workers` threads. Results land by
// index, so output order never depends on scheduling. The exception from the
// lowest failing index is rethrown after all workers stop.
template <typename T>
std::vector<T> parallel_map(size_t n, size_t workers,
                            const std::function<T(size_t)> &fn) {
  std::vector<T> out(n);
  std::vector<std::exception_ptr> errors(n);
  workers = std::clamp<size_t>(workers, 1, std::max<size_t>(n, 1));
  if (workers == 1) {
    for (size_t i = 0; i < n; ++i) out[i] = fn(i);
    return out;
  }
  std::atomic<size_t> next{0};
  std::atomic<bool> failed{false};
  auto run = [&] {
    for (size_t i = next++; i < n && !failed; i = next++) {
      try {
        out[i] = fn(i);
      } catch (...) {
        errors[i] = std::current_exception();
        failed = true;
      }
    }
  };
  {
    std::vector<std::jthread> pool;
    for (size_t w = 0; w < workers; ++w) pool.emplace_back(run);
  }
  for (auto &e : errors) {
    if (e) std::rethrow_exception(e);
  }
  return out;
}

// Collapses concurrent calls for the same key into one computation; the
// other callers wait for its result. The key is released once the
// computation finishes, so compute should re-check any memo it fills.
template <typename V>
class SingleFlight {
 public:
  template <typename Compute>
  V run(const std::string &key, Compute &&compute) {
    std::promise<V> promise;
    std::shared_future<V> result;
    bool owner = false;
    {
      std::lock_guard lock(mu_);
      auto it = inflight_.find(key);
      if (it != inflight_.end()) {
        result = it->second;
      } else {
        result = promise.get_future().share();
        inflight_.emplace(key, result);
        owner = true;
      }
    }
    if (owner) {
      try {
        promise.set_value(compute());
      } catch (...) {
        promise.set_exception(std::current_exception());
      }
      std::lock_guard lock(mu_);
      inflight_.erase(key);
    }
    return result.get();
  }

 private:
  std::mutex mu_;
  std::map<std::string, std::shared_future<V>> inflight_;
};

}  // namespace themekg
