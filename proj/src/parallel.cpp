#include "fsi/parallel.hpp"

#include <atomic>

namespace fsi {

namespace {
std::atomic<unsigned> configured_threads{1};
}

void set_thread_count(unsigned count) noexcept { configured_threads.store(count); }

unsigned thread_count() noexcept {
  const unsigned requested = configured_threads.load();
  if (requested != 0) return requested;
  const unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1 : hw;
}

}  // namespace fsi
