#pragma once

#include <algorithm>
#include <atomic>
#include <cstddef>
#include <cstdlib>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace icl {

// Worker cap: ICL_LAB_THREADS env var, else hardware concurrency.
inline int max_threads() {
  if (const char* env = std::getenv("ICL_LAB_THREADS")) {
    int v = std::atoi(env);
    if (v >= 1) return v;
  }
  unsigned hc = std::thread::hardware_concurrency();
  return hc == 0 ? 1 : static_cast<int>(hc);
}

// Evaluates block(i) for i in [0, n_blocks) on a worker pool and folds the
// per-block results with a fixed-shape pairwise tree. The block partition and
// the merge order never depend on the thread count, so results are bitwise
// reproducible. merge(into, from) accumulates `from` into `into`.
template <class Acc, class BlockFn, class MergeFn>
Acc parallel_block_reduce(std::size_t n_blocks, BlockFn&& block,
                          MergeFn&& merge, Acc zero) {
  if (n_blocks == 0) return zero;
  std::vector<Acc> parts(n_blocks, zero);
  const std::size_t workers =
      std::min<std::size_t>(static_cast<std::size_t>(max_threads()), n_blocks);
  if (workers <= 1) {
    for (std::size_t i = 0; i < n_blocks; ++i) parts[i] = block(i);
  } else {
    std::atomic<std::size_t> next{0};
    std::exception_ptr first_error;
    std::mutex error_mutex;
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (std::size_t w = 0; w < workers; ++w) {
      pool.emplace_back([&]() {
        try {
          for (std::size_t i = next.fetch_add(1); i < n_blocks;
               i = next.fetch_add(1)) {
            parts[i] = block(i);
          }
        } catch (...) {
          std::lock_guard<std::mutex> lock(error_mutex);
          if (!first_error) first_error = std::current_exception();
        }
      });
    }
    for (auto& th : pool) th.join();
    if (first_error) std::rethrow_exception(first_error);
  }
  for (std::size_t stride = 1; stride < n_blocks; stride *= 2) {
    for (std::size_t i = 0; i + stride < n_blocks; i += 2 * stride) {
      merge(parts[i], parts[i + stride]);
    }
  }
  return parts[0];
}

}  // namespace icl
