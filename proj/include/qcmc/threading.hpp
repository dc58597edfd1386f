#pragma once

#include <cstddef>
#include <functional>

namespace qcmc {

/// Process-wide worker count for the amplitude kernels (default 1).
/// Results are independent of this setting: elementwise kernels share no
/// state and reductions always use the same fixed chunking.
int thread_count();
void set_thread_count(int n);

/// Runs fn(begin, end) over contiguous sub-ranges of [begin, end), possibly
/// on several threads. Ranges below `grain` stay on the calling thread.
void parallel_for(std::size_t begin, std::size_t end,
                  const std::function<void(std::size_t, std::size_t)>& fn,
                  std::size_t grain = std::size_t{1} << 15);

}  // namespace qcmc
