#pragma once

#include <cstddef>
#include <functional>

namespace zitter {

// Worker count used by the evaluation loops. Results never depend on it:
// every loop writes disjoint output slots and reductions run in a fixed
// order afterwards.
void set_thread_count(int count);
int thread_count() noexcept;

// Calls body(begin, end) on contiguous chunks covering [0, count).
void parallel_for(std::size_t count, const std::function<void(std::size_t, std::size_t)>& body);

}  // namespace zitter
