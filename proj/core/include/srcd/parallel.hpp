#pragma once

#include <cstddef>
#include <functional>
#include <span>

namespace srcd {

// Worker count from SRCD_THREADS (unset or 0 = hardware concurrency).
std::size_t thread_count();

// Calls body(begin, end) on disjoint contiguous chunks of [0, count).
// The first exception thrown by any chunk is rethrown on the caller.
void parallel_for(std::size_t count, const std::function<void(std::size_t, std::size_t)>& body,
                  std::size_t threads = 0);

// Fixed-shape pairwise summation; the result depends only on the input order.
double pairwise_sum(std::span<const double> values);

}  // namespace srcd
