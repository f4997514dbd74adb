#pragma once

#include <cstddef>
#include <functional>

namespace bentcert {

/// Worker threads to use: `requested` if positive, else the hardware
/// concurrency; always capped by the BENTCERT_WORKERS environment variable.
int worker_count(int requested = 0);

/// Runs body(i) for i in [0, n) on a pool of worker threads. Work is handed
/// out by index, so callers that write results to slot i get deterministic
/// output. The first exception thrown by any task is rethrown.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body, int workers = 0);

}  // namespace bentcert
