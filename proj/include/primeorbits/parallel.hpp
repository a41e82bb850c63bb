#pragma once

#include <cstddef>
#include <functional>

namespace primeorbits {

/// Process-wide worker count used by the parallel loops. 0 selects the
/// hardware concurrency.
void set_thread_count(unsigned threads);
unsigned thread_count();

/// Runs body(begin, end) over contiguous blocks of [0, n). Blocks are fixed
/// by n and the thread count only; each index is visited exactly once, so
/// callers that write results by index get output independent of scheduling.
void parallel_for_blocks(std::size_t n,
                         const std::function<void(std::size_t, std::size_t)>& body);

template <class Fn>
void parallel_for(std::size_t n, Fn&& fn) {
  parallel_for_blocks(n, [&](std::size_t b, std::size_t e) {
    for (std::size_t i = b; i < e; ++i) fn(i);
  });
}

}  // namespace primeorbits
