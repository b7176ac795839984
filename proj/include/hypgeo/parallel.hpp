#pragma once

// Deterministic block parallelism. Work is split into blocks of a fixed size
// that does not depend on the thread count, and every reduction merges block
// results in block order, so results are identical for any thread count.

#include <algorithm>
#include <atomic>
#include <cstddef>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace hypgeo {

inline std::atomic<int>& thread_setting() {
  static std::atomic<int> n{1};
  return n;
}

inline void set_threads(int n) { thread_setting().store(std::max(1, n)); }
inline int threads() { return thread_setting().load(); }

namespace detail {
inline bool& in_worker() {
  thread_local bool flag = false;
  return flag;
}
}  // namespace detail

/// Calls fn(block_index, begin, end) for every block of [0, n).
template <class Fn>
void parallel_blocks(std::size_t n, std::size_t block, Fn&& fn) {
  if (n == 0) return;
  block = std::max<std::size_t>(1, block);
  const std::size_t nblocks = (n + block - 1) / block;
  // nested regions run on the calling worker
  const int nt = detail::in_worker() ? 1
                                     : static_cast<int>(std::min<std::size_t>(static_cast<std::size_t>(threads()), nblocks));
  if (nt <= 1) {
    for (std::size_t b = 0; b < nblocks; ++b) fn(b, b * block, std::min(n, (b + 1) * block));
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr err;
  std::mutex err_mutex;
  std::vector<std::thread> pool;
  pool.reserve(static_cast<std::size_t>(nt));
  for (int t = 0; t < nt; ++t) {
    pool.emplace_back([&] {
      detail::in_worker() = true;
      for (;;) {
        std::size_t b = next.fetch_add(1);
        if (b >= nblocks) return;
        try {
          fn(b, b * block, std::min(n, (b + 1) * block));
        } catch (...) {
          std::lock_guard lock(err_mutex);
          if (!err) err = std::current_exception();
        }
      }
    });
  }
  for (auto& th : pool) th.join();
  if (err) std::rethrow_exception(err);
}

template <class Fn>
void parallel_for(std::size_t n, Fn&& fn, std::size_t block = 256) {
  parallel_blocks(n, block, [&](std::size_t, std::size_t lo, std::size_t hi) {
    for (std::size_t i = lo; i < hi; ++i) fn(i);
  });
}

/// Neumaier compensated sum.
class CompensatedSum {
 public:
  void add(double x) noexcept {
    const double t = sum_ + x;
    if (std::abs(sum_) >= std::abs(x))
      comp_ += (sum_ - t) + x;
    else
      comp_ += (x - t) + sum_;
    sum_ = t;
  }
  double value() const noexcept { return sum_ + comp_; }

 private:
  double sum_ = 0.0;
  double comp_ = 0.0;
};

}  // namespace hypgeo
