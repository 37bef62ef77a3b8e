#pragma once

#include <cstddef>
#include <functional>

namespace qci {

/// Worker count used by parallel_for: the value passed to set_thread_count, else QCI_THREADS,
/// else the hardware concurrency.
int thread_count();

/// 0 restores the automatic choice.
void set_thread_count(int n);

/// Runs body(i) for i in [0, n). Each index is handled exactly once; callers write results by
/// index, so the outcome does not depend on scheduling. The exception thrown by the lowest
/// failing index is rethrown after all workers finish.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body);

}  // namespace qci
