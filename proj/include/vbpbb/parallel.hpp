#pragma once

#include <cstddef>
#include <functional>

namespace vbpbb {

/// Hardware concurrency, at least 1.
[[nodiscard]] std::size_t default_thread_count() noexcept;

/**
 * Runs body(begin, end) over contiguous chunks of [0, count) on up to
 * `threads` workers (0 selects default_thread_count()). The first exception
 * thrown by any chunk is rethrown on the calling thread.
 */
void parallel_for(std::size_t count, std::size_t threads, const std::function<void(std::size_t, std::size_t)>& body);

}  // namespace vbpbb
