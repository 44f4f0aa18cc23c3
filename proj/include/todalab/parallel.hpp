#pragma once

#include <tbb/blocked_range.h>
#include <tbb/parallel_for.h>

#include <cstddef>

namespace todalab {

/// Caps the worker count for all later parallel loops (0 restores the default).
void set_max_threads(int threads);
int max_threads();

/// Runs body(i) for i in [0, n). Each index must write only its own outputs,
/// which keeps results independent of the thread count.
template <class Body>
void parallel_for(std::size_t n, Body&& body) {
    tbb::parallel_for(tbb::blocked_range<std::size_t>(0, n), [&](const tbb::blocked_range<std::size_t>& r) {
        for (std::size_t i = r.begin(); i != r.end(); ++i) body(i);
    });
}

}  // namespace todalab
