#pragma once

#include "fsi/core.hpp"

#include <exception>
#include <thread>
#include <vector>

namespace fsi {

/// Number of worker threads used for per-fiber loops. 0 selects
/// std::thread::hardware_concurrency().
void set_thread_count(unsigned count) noexcept;
unsigned thread_count() noexcept;

/// Runs body(i) for i in [0, count). Each index is visited exactly once and
/// results must be written to per-index slots, so the outcome does not depend
/// on the number of threads. If any body throws, the exception raised at the
/// lowest index is rethrown after all workers finish.
template <typename Body>
void parallel_for(Index count, Body&& body) {
  const Index workers = std::min<Index>(thread_count(), count);
  if (workers <= 1) {
    for (Index i = 0; i < count; ++i) body(i);
    return;
  }

  std::vector<std::exception_ptr> failure(static_cast<std::size_t>(workers));
  std::vector<Index> failed_at(static_cast<std::size_t>(workers), count);
  std::vector<std::thread> pool;
  pool.reserve(static_cast<std::size_t>(workers));
  const Index chunk = (count + workers - 1) / workers;
  for (Index w = 0; w < workers; ++w) {
    pool.emplace_back([&, w] {
      const Index begin = w * chunk;
      const Index end = std::min(count, begin + chunk);
      for (Index i = begin; i < end; ++i) {
        try {
          body(i);
        } catch (...) {
          failure[static_cast<std::size_t>(w)] = std::current_exception();
          failed_at[static_cast<std::size_t>(w)] = i;
          return;
        }
      }
    });
  }
  for (auto& t : pool) t.join();

  std::size_t first = failure.size();
  for (std::size_t w = 0; w < failure.size(); ++w) {
    if (failure[w] && (first == failure.size() || failed_at[w] < failed_at[first])) first = w;
  }
  if (first != failure.size()) std::rethrow_exception(failure[first]);
}

}  // namespace fsi
