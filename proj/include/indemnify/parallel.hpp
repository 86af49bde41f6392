#ifndef INDEMNIFY_PARALLEL_HPP
#define INDEMNIFY_PARALLEL_HPP

#include <cstddef>
#include <functional>

namespace indemnify {

// Worker threads to use: hardware concurrency, capped by the
// INDEMNIFY_THREADS environment variable when it is set.
int worker_count();

// Runs body(i) for every i in [0, n). Each index must write only to its own
// output slot; results are then independent of the thread count.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body);

}  // namespace indemnify

#endif
