#pragma once

#include <cstddef>
#include <functional>

namespace wavecq {

/// Worker count from the WAVECQ_WORKERS environment variable, falling back to
/// the hardware concurrency (at least 1).
[[nodiscard]] std::size_t default_worker_count();

/// Runs body(0) .. body(count - 1) on up to `workers` threads (0 selects
/// default_worker_count()). Items are claimed from a shared counter, so every
/// index runs at most once. After a failure no new items start; once all
/// workers have stopped, the exception of the lowest failing index is rethrown.
void parallel_for(std::size_t count, std::size_t workers, const std::function<void(std::size_t)>& body);

}  // namespace wavecq
