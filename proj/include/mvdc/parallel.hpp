#pragma once

#include <algorithm>
#include <thread>
#include <vector>

namespace mvdc {

// Global worker count used by all dense passes. Every parallel loop must
// produce bit-identical results for any value here.
void set_thread_count(int n);
int thread_count();

// Runs fn(begin, end) over contiguous chunks of [0, n), one worker each.
template <typename F>
void parallel_chunks(int n, F&& fn) {
  if (n <= 0) return;
  int workers = std::min(thread_count(), n);
  if (workers <= 1) {
    fn(0, n);
    return;
  }
  std::vector<std::thread> pool;
  pool.reserve(workers);
  int base = n / workers;
  int rem = n % workers;
  int begin = 0;
  for (int w = 0; w < workers; ++w) {
    int end = begin + base + (w < rem ? 1 : 0);
    if (begin < end) pool.emplace_back([&fn, begin, end] { fn(begin, end); });
    begin = end;
  }
  for (auto& t : pool) t.join();
}

}  // namespace mvdc
