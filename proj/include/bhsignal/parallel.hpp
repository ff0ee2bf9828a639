/* parallel.hpp
 *
 * Minimal worker pool used for per-l grid solves and scan points. Results are
 * written to caller-indexed slots so reduction order never depends on thread
 * scheduling.
 */
#pragma once

#include <atomic>
#include <exception>
#include <functional>
#include <mutex>
#include <thread>
#include <vector>

namespace bhsignal {

inline int default_threads() {
  const unsigned hc = std::thread::hardware_concurrency();
  return hc == 0 ? 1 : static_cast<int>(hc);
}

/* Run body(i) for i in [0, n). body must only touch slot i of shared state. */
inline void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body,
                         int threads = default_threads()) {
  if (n == 0) return;
  if (threads <= 1 || n == 1) {
    for (std::size_t i = 0; i < n; ++i) body(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::atomic<bool> failed{false};
  std::exception_ptr eptr;
  std::mutex eptr_mutex;
  auto worker = [&] {
    for (;;) {
      const std::size_t i = next.fetch_add(1);
      if (i >= n || failed.load()) return;
      try {
        body(i);
      } catch (...) {
        std::lock_guard<std::mutex> lk(eptr_mutex);
        if (!failed.exchange(true)) eptr = std::current_exception();
        return;
      }
    }
  };
  std::vector<std::thread> pool;
  const int nt = std::min<std::size_t>(threads, n);
  pool.reserve(nt);
  for (int t = 0; t < nt; ++t) pool.emplace_back(worker);
  for (auto& th : pool) th.join();
  if (failed.load() && eptr) std::rethrow_exception(eptr);
}

}  // namespace bhsignal
