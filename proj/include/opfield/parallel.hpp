/* SPDX-License-Identifier: Apache-2.0 */
#ifndef OPFIELD_PARALLEL_HPP
#define OPFIELD_PARALLEL_HPP

#include <algorithm>
#include <cstdlib>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

#include "opfield/types.hpp"

namespace opfield {

// Thread cap for pointwise loops. OPFIELD_THREADS overrides the hardware
// default; values < 1 are treated as 1.
inline unsigned max_threads() {
  if (const char* env = std::getenv("OPFIELD_THREADS")) {
    const long n = std::strtol(env, nullptr, 10);
    return n >= 1 ? static_cast<unsigned>(n) : 1u;
  }
  const unsigned hw = std::thread::hardware_concurrency();
  return hw >= 1 ? hw : 1u;
}

// Runs f(i) for i in [0, n). Each index owns its output slot, so the result
// does not depend on the thread count; reductions stay with the caller and
// run in declared point order.
template <typename F>
void parallel_for(Index n, F&& f) {
  const Index threads = std::min<Index>(static_cast<Index>(max_threads()), n);
  if (threads <= 1) {
    for (Index i = 0; i < n; ++i) f(i);
    return;
  }
  std::exception_ptr first_error;
  std::mutex error_mutex;
  std::vector<std::thread> pool;
  pool.reserve(static_cast<size_t>(threads));
  for (Index w = 0; w < threads; ++w) {
    pool.emplace_back([&, w] {
      try {
        for (Index i = w; i < n; i += threads) f(i);
      } catch (...) {
        std::scoped_lock lock(error_mutex);
        if (!first_error) first_error = std::current_exception();
      }
    });
  }
  for (auto& t : pool) t.join();
  if (first_error) std::rethrow_exception(first_error);
}

}  // namespace opfield

#endif  // OPFIELD_PARALLEL_HPP
