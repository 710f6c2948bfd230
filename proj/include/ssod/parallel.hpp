#pragma once

#include <cstddef>
#include <functional>

namespace ssod {

// Runs fn(0..n-1) on up to `jobs` threads. Callers must write results into
// per-index slots so the outcome is independent of scheduling; reductions
// happen serially afterwards. jobs <= 1 runs inline. The first exception
// thrown by fn is rethrown after all workers join.
void parallel_for(size_t n, int jobs, const std::function<void(size_t)>& fn);

// --jobs flag value (0 = unset) with SSOD_JOBS fallback; defaults to 1.
int resolve_jobs(int flag_value);

}  // namespace ssod
