#pragma once

#include <cstddef>
#include <functional>

namespace lct {

/// Runs body(i) for i in [0, count) on at most `jobs` threads (jobs ≤ 0 means
/// hardware concurrency). Indices are handed out dynamically; callers store
/// results by index so the outcome does not depend on scheduling. The first
/// exception thrown by any body is rethrown after all workers stop.
void parallel_for(std::size_t count, int jobs, const std::function<void(std::size_t)>& body);

}  // namespace lct
