#pragma once

#include <cstddef>
#include <functional>

namespace patchprior {

/// Worker count: hardware concurrency, capped by PATCHPRIOR_THREADS when set.
std::size_t worker_count();

/// Runs body(i) for every i in [0, count). Each index must write only its own
/// outputs; results are therefore independent of the thread count.
void parallel_for(std::size_t count, const std::function<void(std::size_t)>& body);

}  // namespace patchprior
