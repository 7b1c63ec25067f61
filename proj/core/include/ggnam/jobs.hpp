#pragma once

#include <cstdint>
#include <functional>
#include <string>

namespace ggnam {

/// Stable per-job seed from a base seed and a textual job descriptor, so
/// scheduling order cannot change any result.
std::uint64_t derive_seed(std::uint64_t base_seed, const std::string& descriptor);

/// Runs fn(0..n-1) on up to `workers` threads; results must be written by
/// index, aggregation stays with the caller. workers <= 1 runs inline.
void parallel_for(int n, int workers, const std::function<void(int)>& fn);

int default_worker_count();

}  // namespace ggnam
