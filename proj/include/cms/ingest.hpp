#pragma once

#include <span>
#include <vector>

#include "cms/sketch.hpp"

namespace cms {

// Serial reference kernels. The parallel versions must match them exactly.
Sketch ingest_serial(const SketchConfig& config, std::span<const FlowId> stream);
std::vector<Counter> query_serial(const Sketch& sketch,
                                  std::span<const FlowId> items);

// OpenMP kernels. ingest_parallel splits the stream into one contiguous shard
// per thread, sketches each shard privately, then merges; merge linearity
// makes the result bit-identical to ingest_serial. `threads` <= 0 uses the
// OpenMP default.
Sketch ingest_parallel(const SketchConfig& config,
                       std::span<const FlowId> stream, int threads = 0);
std::vector<Counter> query_parallel(const Sketch& sketch,
                                    std::span<const FlowId> items,
                                    int threads = 0);

}  // namespace cms
