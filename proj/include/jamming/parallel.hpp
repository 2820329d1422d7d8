#pragma once

#include <algorithm>
#include <atomic>
#include <cstdint>
#include <exception>
#include <mutex>
#include <thread>
#include <type_traits>
#include <vector>

namespace jamming {

/// Worker count to use when the caller passes 0.
inline unsigned default_workers() {
  const unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1 : hw;
}

/// Runs job(i) for i in [0, trials) on `workers` threads.  Results are
/// stored by trial index, so the output never depends on scheduling.  The
/// first exception thrown by any job is rethrown after all workers join.
template <class Job>
auto run_trials(std::uint64_t trials, unsigned workers, Job&& job) {
  using Result = std::invoke_result_t<Job&, std::uint64_t>;
  std::vector<Result> results(trials);
  if (workers == 0) workers = default_workers();
  workers = static_cast<unsigned>(std::min<std::uint64_t>(workers, std::max<std::uint64_t>(trials, 1)));

  if (workers <= 1) {
    for (std::uint64_t i = 0; i < trials; ++i) results[i] = job(i);
    return results;
  }

  constexpr std::uint64_t kChunk = 64;
  std::atomic<std::uint64_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  auto worker = [&] {
    for (;;) {
      const std::uint64_t begin = next.fetch_add(kChunk);
      if (begin >= trials) return;
      const std::uint64_t end = std::min(trials, begin + kChunk);
      try {
        for (std::uint64_t i = begin; i < end; ++i) results[i] = job(i);
      } catch (...) {
        std::lock_guard lock(failure_mutex);
        if (!failure) failure = std::current_exception();
        next.store(trials);
        return;
      }
    }
  };
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (unsigned w = 0; w < workers; ++w) pool.emplace_back(worker);
  for (auto& t : pool) t.join();
  if (failure) std::rethrow_exception(failure);
  return results;
}

}  // namespace jamming
