#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>

namespace msparisi {

/// Worker count: MSPARISI_THREADS if set to a positive integer, else the hardware concurrency.
int worker_count();

/// Runs body(i) for i in [0, n) on up to worker_count() threads. Work items must be
/// independent; the first exception thrown by any item is rethrown after all workers stop.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body);

/// Pairwise (cascade) summation; the result depends only on the order of `values`.
double pairwise_sum(std::span<const double> values);

/// SplitMix64 finalizer; used to derive independent substream seeds from (seed, counter).
std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t counter);

}  // namespace msparisi
