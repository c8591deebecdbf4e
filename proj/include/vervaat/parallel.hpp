#ifndef VERVAAT_PARALLEL_HPP_
#define VERVAAT_PARALLEL_HPP_

#include <algorithm>
#include <atomic>
#include <cstddef>
#include <exception>
#include <mutex>
#include <thread>
#include <type_traits>
#include <vector>

namespace vervaat {

/// Hardware concurrency, at least 1.
inline unsigned default_workers() { return std::max(1u, std::thread::hardware_concurrency()); }

/*
 * results[i] = fn(i) for i in [0, count). Each index is computed exactly once
 * by some worker; since fn draws only from its own stream the output does not
 * depend on the number of workers or on scheduling.
 */
template <class Fn>
auto run_replicates(std::size_t count, unsigned workers, Fn fn) -> std::vector<std::invoke_result_t<Fn, std::size_t>> {
  using T = std::invoke_result_t<Fn, std::size_t>;
  std::vector<T> results(count);
  workers = std::max(1u, std::min<unsigned>(workers, static_cast<unsigned>(std::max<std::size_t>(count, 1))));
  if (workers == 1) {
    for (std::size_t i = 0; i < count; ++i) results[i] = fn(i);
    return results;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr error;
  std::mutex error_mutex;
  constexpr std::size_t kChunk = 64;
  auto work = [&] {
    for (;;) {
      const std::size_t start = next.fetch_add(kChunk);
      if (start >= count) return;
      const std::size_t stop = std::min(count, start + kChunk);
      try {
        for (std::size_t i = start; i < stop; ++i) results[i] = fn(i);
      } catch (...) {
        std::lock_guard lock(error_mutex);
        if (!error) error = std::current_exception();
        next.store(count);
        return;
      }
    }
  };
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (unsigned w = 0; w < workers; ++w) pool.emplace_back(work);
  for (auto& t : pool) t.join();
  if (error) std::rethrow_exception(error);
  return results;
}

}  // namespace vervaat

#endif  // VERVAAT_PARALLEL_HPP_
