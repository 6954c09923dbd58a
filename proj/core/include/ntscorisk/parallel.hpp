#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>

namespace ntscorisk {

// Fixed chunk size for parallel loops and reductions. Chunk boundaries never
// depend on the thread count, so merged sums are bit-identical across runs.
inline constexpr std::size_t kChunkSize = 4096;

// splitmix64 finalizer.
constexpr std::uint64_t mix64(std::uint64_t z) {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

// Substream seed for stream `k` of master `seed`.
constexpr std::uint64_t hash64(std::uint64_t seed, std::uint64_t k) { return mix64(seed ^ mix64(k)); }

// Worker count: NTSCORISK_THREADS if set and positive, else hardware concurrency.
std::size_t max_threads();

// Runs body(chunk_index, begin, end) over [0, n) split into kChunkSize pieces.
// Chunks are distributed over worker threads; the body must only write to
// chunk-private state.
void for_each_chunk(std::size_t n, const std::function<void(std::size_t, std::size_t, std::size_t)>& body);

// Runs body(i) for i in [0, n) across worker threads (one index per task).
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body);

}  // namespace ntscorisk
