#pragma once

#include <exception>
#include <functional>
#include <stdexcept>
#include <thread>
#include <vector>

namespace expbasis {

// Deterministic parallel for over [0, n): each index writes only its own
// output slot, so results are identical for every thread count. Exceptions
// are captured per worker and the one from the lowest-numbered worker is
// rethrown after the join, which keeps error reporting reproducible too.
inline void parallel_for_n(long n, int threads,
                           const std::function<void(long)>& body) {
  if (n < 0) throw std::invalid_argument("parallel_for_n: negative count");
  if (threads < 1) throw std::invalid_argument("parallel_for_n: threads < 1");
  if (n == 0) return;
  long t = threads;
  if (t > n) t = n;
  if (t == 1) {
    for (long i = 0; i < n; ++i) body(i);
    return;
  }
  std::vector<std::thread> pool;
  std::vector<std::exception_ptr> errs(static_cast<std::size_t>(t));
  pool.reserve(static_cast<std::size_t>(t));
  for (long k = 0; k < t; ++k) {
    long lo = n * k / t;
    long hi = n * (k + 1) / t;
    pool.emplace_back([&, lo, hi, k]() {
      try {
        for (long i = lo; i < hi; ++i) body(i);
      } catch (...) {
        errs[static_cast<std::size_t>(k)] = std::current_exception();
      }
    });
  }
  for (auto& th : pool) th.join();
  for (auto& e : errs)
    if (e) std::rethrow_exception(e);
}

}  // namespace expbasis
