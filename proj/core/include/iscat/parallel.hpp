#ifndef ISCAT_PARALLEL_HPP
#define ISCAT_PARALLEL_HPP

#include <cstddef>
#include <functional>

namespace iscat {

// Global worker count for embarrassingly parallel loops.  0 = hardware
// concurrency.  Loops only ever write disjoint output slots, so results
// do not depend on the thread count.
void set_threads(unsigned n);
unsigned threads();

// Runs fn(i) for i in [0, n).  Falls back to a serial loop for small n
// or a single worker.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& fn);

}  // namespace iscat

#endif
