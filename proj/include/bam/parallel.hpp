#pragma once

#include <algorithm>
#include <atomic>
#include <cstdint>
#include <exception>
#include <mutex>
#include <optional>
#include <thread>
#include <vector>

namespace bam {

inline unsigned default_threads() { return std::max(1u, std::thread::hardware_concurrency()); }

/// Evaluates fn(r) for r in [0, reps) on up to `threads` workers and returns
/// the results in replica order. Each replica owns its RNG stream, so the
/// output does not depend on the thread count.
template <class Fn>
auto run_replicas(std::uint64_t reps, Fn&& fn, unsigned threads = default_threads()) {
  using R = decltype(fn(std::uint64_t{}));
  std::vector<std::optional<R>> slots(reps);
  auto unwrap = [&] {
    std::vector<R> out;
    out.reserve(reps);
    for (auto& s : slots) out.push_back(std::move(*s));
    return out;
  };
  threads = static_cast<unsigned>(std::clamp<std::uint64_t>(threads, 1, std::max<std::uint64_t>(reps, 1)));
  if (threads == 1) {
    for (std::uint64_t r = 0; r < reps; ++r) slots[r].emplace(fn(r));
    return unwrap();
  }
  std::atomic<std::uint64_t> next{0};
  std::exception_ptr error;
  std::mutex error_mu;
  std::vector<std::jthread> pool;
  pool.reserve(threads);
  for (unsigned t = 0; t < threads; ++t) {
    pool.emplace_back([&] {
      for (std::uint64_t r; (r = next.fetch_add(1)) < reps;) {
        try {
          slots[r].emplace(fn(r));
        } catch (...) {
          std::lock_guard lock(error_mu);
          if (!error) error = std::current_exception();
          next = reps;
        }
      }
    });
  }
  pool.clear();
  if (error) std::rethrow_exception(error);
  return unwrap();
}

}  // namespace bam
