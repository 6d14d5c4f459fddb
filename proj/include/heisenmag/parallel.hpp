#pragma once
// Index-parallel map over std::thread. Results land in index order, so the
// output does not depend on the thread count.

#include <atomic>
#include <cstdlib>
#include <exception>
#include <mutex>
#include <string>
#include <thread>
#include <vector>

namespace heisenmag {

// Thread count from HEISENMAG_THREADS, else 1.
inline int default_threads() {
  if (const char* s = std::getenv("HEISENMAG_THREADS")) {
    try {
      const int n = std::stoi(s);
      if (n >= 1) return n;
    } catch (...) {
    }
  }
  return 1;
}

template <class F>
auto parallel_map(int n, int threads, const F& f) {
  using T = decltype(f(0));
  std::vector<T> out(n);
  if (threads <= 1 || n <= 1) {
    for (int i = 0; i < n; ++i) out[i] = f(i);
    return out;
  }
  std::atomic<int> next{0};
  std::exception_ptr err;
  std::mutex m;
  auto worker = [&] {
    for (int i; (i = next++) < n;) {
      try {
        out[i] = f(i);
      } catch (...) {
        std::lock_guard<std::mutex> lk(m);
        if (!err) err = std::current_exception();
      }
    }
  };
  std::vector<std::thread> pool;
  for (int t = 0; t < std::min(threads, n); ++t) pool.emplace_back(worker);
  for (auto& t : pool) t.join();
  if (err) std::rethrow_exception(err);
  return out;
}

}  // namespace heisenmag
