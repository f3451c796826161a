#pragma once

#include <cstddef>
#include <functional>

namespace postsel {

/// Worker cap: POSTSEL_THREADS when set to a positive integer, else the hardware concurrency.
int default_thread_count();

/// Runs body(begin, end) over a fixed partition of [0, count) into at most
/// `threads` contiguous chunks. The partition depends only on (count, threads).
void parallel_for(std::size_t count, int threads,
                  const std::function<void(std::size_t, std::size_t)>& body);

}  // namespace postsel
