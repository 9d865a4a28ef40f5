#pragma once

#include <algorithm>
#include <atomic>
#include <cstddef>
#include <cstdlib>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace ajb {

/// Number of worker threads to use. Honors AJB_THREADS when set to a positive
/// integer, otherwise the hardware concurrency.
inline std::size_t thread_budget() {
  if (const char* env = std::getenv("AJB_THREADS")) {
    char* end = nullptr;
    long v = std::strtol(env, &end, 10);
    if (end != env && v > 0) return static_cast<std::size_t>(v);
  }
  return std::max<std::size_t>(1, std::thread::hardware_concurrency());
}

/// Runs fn(chunk) for chunk in [0, n_chunks). Chunks are claimed dynamically,
/// so callers that need reproducible results must write per-chunk outputs and
/// reduce them in chunk order afterwards.
template <class Fn>
void parallel_chunks(std::size_t n_chunks, Fn&& fn) {
  const std::size_t workers = std::min(thread_budget(), n_chunks);
  if (workers <= 1) {
    for (std::size_t c = 0; c < n_chunks; ++c) fn(c);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mu;
  auto body = [&] {
    for (;;) {
      std::size_t c = next.fetch_add(1);
      if (c >= n_chunks) return;
      try {
        fn(c);
      } catch (...) {
        std::lock_guard lock(failure_mu);
        if (!failure) failure = std::current_exception();
        next = n_chunks;
        return;
      }
    }
  };
  std::vector<std::thread> pool;
  pool.reserve(workers - 1);
  for (std::size_t t = 1; t < workers; ++t) pool.emplace_back(body);
  body();
  for (auto& th : pool) th.join();
  if (failure) std::rethrow_exception(failure);
}

/// Fixed-size partition of [0, n) into chunks; the partition does not depend
/// on the thread count.
struct ChunkPlan {
  std::size_t n = 0;
  std::size_t chunk = 64;

  std::size_t count() const { return n == 0 ? 0 : (n + chunk - 1) / chunk; }
  std::size_t begin(std::size_t c) const { return c * chunk; }
  std::size_t end(std::size_t c) const { return std::min(n, (c + 1) * chunk); }
};

}  // namespace ajb
