#pragma once

#include <algorithm>
#include <cstdlib>
#include <functional>
#include <thread>
#include <vector>

namespace mrect {

// Worker count: min(hardware, MRECT_THREADS if set, cap if nonzero).
inline unsigned thread_budget(unsigned cap = 0) {
  unsigned hw = std::max(1u, std::thread::hardware_concurrency());
  if (const char* env = std::getenv("MRECT_THREADS")) {
    long v = std::strtol(env, nullptr, 10);
    if (v >= 1) hw = std::min<unsigned>(hw, static_cast<unsigned>(v));
  }
  if (cap > 0) hw = std::min(hw, cap);
  return hw;
}

// Deterministic parallel sum: the index range is cut into fixed-size chunks
// whose boundaries do not depend on the worker count, each chunk is summed
// sequentially, and the chunk partials are combined by a fixed-shape pairwise
// tree. Results are therefore bit-identical for any number of threads.
//
// `fn(begin, end)` must return the sequential sum over [begin, end).
inline double deterministic_sum(std::size_t n,
                                const std::function<double(std::size_t, std::size_t)>& fn,
                                std::size_t chunk = 1 << 14,
                                unsigned max_threads = 0) {
  if (n == 0) return 0.0;
  chunk = std::max<std::size_t>(1, chunk);
  std::size_t nchunks = (n + chunk - 1) / chunk;
  std::vector<double> partial(nchunks, 0.0);

  unsigned workers = std::min<std::size_t>(thread_budget(max_threads), nchunks);
  if (workers <= 1) {
    for (std::size_t c = 0; c < nchunks; ++c)
      partial[c] = fn(c * chunk, std::min(n, (c + 1) * chunk));
  } else {
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (unsigned w = 0; w < workers; ++w) {
      pool.emplace_back([&, w]() {
        for (std::size_t c = w; c < nchunks; c += workers)
          partial[c] = fn(c * chunk, std::min(n, (c + 1) * chunk));
      });
    }
    for (auto& t : pool) t.join();
  }

  // pairwise tree over the chunk array; shape depends only on nchunks
  std::vector<double> level = std::move(partial);
  while (level.size() > 1) {
    std::vector<double> next((level.size() + 1) / 2, 0.0);
    for (std::size_t i = 0; i + 1 < level.size(); i += 2) next[i / 2] = level[i] + level[i + 1];
    if (level.size() % 2) next.back() = level.back();
    level = std::move(next);
  }
  return level[0];
}

// Templated variant for accumulators with operator+ (e.g. sum plus sum of
// squares). Same fixed chunking and fixed-shape pairwise tree.
template <class T, class Fn>
T deterministic_reduce(std::size_t n, const Fn& fn, T zero, std::size_t chunk = 1 << 14,
                       unsigned max_threads = 0) {
  if (n == 0) return zero;
  chunk = std::max<std::size_t>(1, chunk);
  std::size_t nchunks = (n + chunk - 1) / chunk;
  std::vector<T> partial(nchunks, zero);

  unsigned workers = static_cast<unsigned>(std::min<std::size_t>(thread_budget(max_threads), nchunks));
  if (workers <= 1) {
    for (std::size_t c = 0; c < nchunks; ++c)
      partial[c] = fn(c * chunk, std::min(n, (c + 1) * chunk));
  } else {
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (unsigned w = 0; w < workers; ++w) {
      pool.emplace_back([&, w]() {
        for (std::size_t c = w; c < nchunks; c += workers)
          partial[c] = fn(c * chunk, std::min(n, (c + 1) * chunk));
      });
    }
    for (auto& t : pool) t.join();
  }

  std::vector<T> level = std::move(partial);
  while (level.size() > 1) {
    std::vector<T> next((level.size() + 1) / 2, zero);
    for (std::size_t i = 0; i + 1 < level.size(); i += 2) next[i / 2] = level[i] + level[i + 1];
    if (level.size() % 2) next.back() = level.back();
    level = std::move(next);
  }
  return level[0];
}

// Same chunking scheme for independent per-index work with no reduction.
inline void parallel_for(std::size_t n,
                         const std::function<void(std::size_t)>& fn,
                         unsigned max_threads = 0) {
  if (n == 0) return;
  unsigned workers = static_cast<unsigned>(std::min<std::size_t>(thread_budget(max_threads), n));
  if (workers <= 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (unsigned w = 0; w < workers; ++w) {
    pool.emplace_back([&, w]() {
      for (std::size_t i = w; i < n; i += workers) fn(i);
    });
  }
  for (auto& t : pool) t.join();
}

}  // namespace mrect
