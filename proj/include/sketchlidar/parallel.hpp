#pragma once

#include <cstddef>
#include <functional>

namespace sketchlidar {

/// Runs fn(i) for i in [0, count) across up to threads workers (0 = hardware
/// concurrency). Each i must write only to its own output slot; results are
/// then identical for any thread count.
void parallel_for(std::size_t count, unsigned threads, const std::function<void(std::size_t)>& fn);

}  // namespace sketchlidar
