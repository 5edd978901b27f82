#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>

namespace degenkit {

// Worker count: DEGENKIT_THREADS if set and positive, else hardware concurrency.
std::size_t worker_count();

// Runs body(i) for i in [0, n) across worker threads. Each index is handled by
// exactly one call, so callers that write results per index stay deterministic.
// The first exception thrown by any call is rethrown after all workers join.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body);

// splitmix64 step; derives independent sub-seeds from a run seed.
std::uint64_t sub_seed(std::uint64_t seed, std::uint64_t index) noexcept;

}  // namespace degenkit
