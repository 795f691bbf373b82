#pragma once

#include <algorithm>
#include <atomic>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace morin {

/// Runs fn(i) for i in [0, count) on `workers` threads. Results must be
/// written to slot i by fn, so the outcome does not depend on scheduling.
template <class Fn>
void parallel_for(std::size_t count, unsigned workers, Fn&& fn) {
  if (workers <= 1 || count < 2) {
    for (std::size_t i = 0; i < count; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr err;
  std::mutex err_mu;
  auto body = [&] {
    for (;;) {
      std::size_t i = next.fetch_add(1);
      if (i >= count) return;
      try {
        fn(i);
      } catch (...) {
        std::lock_guard<std::mutex> lk(err_mu);
        if (!err) err = std::current_exception();
      }
    }
  };
  std::vector<std::thread> pool;
  unsigned nt = std::min<unsigned>(workers, static_cast<unsigned>(count));
  for (unsigned t = 0; t < nt; ++t) pool.emplace_back(body);
  for (auto& th : pool) th.join();
  if (err) std::rethrow_exception(err);
}

}  // namespace morin
