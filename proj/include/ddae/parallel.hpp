#pragma once

#include <cstddef>
#include <functional>

namespace ddae {

// Number of worker threads: min(DDAE_THREADS, hardware_concurrency), at least 1.
int thread_count();

// Runs fn(i) for i in [0, count) on up to thread_count() threads.
// fn must only write to disjoint output slots; results are deterministic.
void parallel_for(std::size_t count, const std::function<void(std::size_t)>& fn);

}  // namespace ddae
