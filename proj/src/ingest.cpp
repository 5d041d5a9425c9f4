#include "cms/ingest.hpp"

#include <algorithm>
#include <cstddef>
#include <exception>
#include <optional>

#include <omp.h>

namespace cms {

namespace {

int resolve_threads(int threads) {
  return threads > 0 ? threads : omp_get_max_threads();
}

}  // namespace

Sketch ingest_serial(const SketchConfig& config,
                     std::span<const FlowId> stream) {
  Sketch sketch(config);
  for (FlowId id : stream) {
    sketch.update(id);
  }
  return sketch;
}

std::vector<Counter> query_serial(const Sketch& sketch,
                                  std::span<const FlowId> items) {
  std::vector<Counter> out(items.size());
  for (std::size_t i = 0; i < items.size(); ++i) {
    out[i] = sketch.query(items[i]);
  }
  return out;
}

Sketch ingest_parallel(const SketchConfig& config,
                       std::span<const FlowId> stream, int threads) {
  Sketch result(config);
  const int nthreads = resolve_threads(threads);
  std::vector<std::optional<Sketch>> shards(static_cast<std::size_t>(nthreads));
  std::exception_ptr failure;

#pragma omp parallel num_threads(nthreads)
  {
    const auto tid = static_cast<std::size_t>(omp_get_thread_num());
    const auto team = static_cast<std::size_t>(omp_get_num_threads());
    const std::size_t chunk = (stream.size() + team - 1) / team;
    const std::size_t begin = std::min(stream.size(), tid * chunk);
    const std::size_t end = std::min(stream.size(), begin + chunk);
    try {
      Sketch local(config);
      for (std::size_t i = begin; i < end; ++i) {
        local.update(stream[i]);
      }
      shards[tid].emplace(std::move(local));
    } catch (...) {
#pragma omp critical(cms_ingest_failure)
      failure = std::current_exception();
    }
  }

  if (failure) {
    std::rethrow_exception(failure);
  }
  for (const auto& shard : shards) {
    if (shard) {
      result.merge(*shard);
    }
  }
  return result;
}

std::vector<Counter> query_parallel(const Sketch& sketch,
                                    std::span<const FlowId> items,
                                    int threads) {
  std::vector<Counter> out(items.size());
  const auto n = static_cast<std::ptrdiff_t>(items.size());
#pragma omp parallel for schedule(static) num_threads(resolve_threads(threads))
  for (std::ptrdiff_t i = 0; i < n; ++i) {
    out[static_cast<std::size_t>(i)] = sketch.query(items[static_cast<std::size_t>(i)]);
  }
  return out;
}

}  // namespace cms
