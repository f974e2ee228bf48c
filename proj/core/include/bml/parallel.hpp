#pragma once

#include <cstddef>
#include <functional>

namespace bml {

/// Worker count: BML_THREADS if set (>= 1), else hardware concurrency.
std::size_t thread_count();

/// Runs body(i) for i in [0, count) over contiguous index blocks. Each index
/// is visited exactly once; callers write results to per-index slots so the
/// outcome does not depend on scheduling.
void parallel_for(std::size_t count, const std::function<void(std::size_t)>& body);

}  // namespace bml
