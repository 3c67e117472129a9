#pragma once

#include <cstddef>
#include <functional>
#include <vector>

namespace corespect {

// Deterministic data parallelism.
//
// Work over [0, n) is cut into chunks whose boundaries depend on n only,
// never on the thread count. parallel_for runs one callback per chunk (any
// thread may pick up any chunk); as long as a chunk writes only to locations
// keyed by its own indices, output is bit-identical whether the pool has 1
// thread or 8. Ordered reductions evaluate per-chunk partials the same way
// and then combine them sequentially in ascending chunk order.
//
// Thread count: min(hardware_concurrency, CORESPECT_THREADS) when the
// environment variable is set, else hardware_concurrency. Never below 1.

int max_threads();

// For tests: number of chunks [0,n) is split into. Pure function of n.
std::size_t chunk_count(std::size_t n);

// fn(begin, end) is invoked once per chunk.
void parallel_for(std::size_t n,
                  const std::function<void(std::size_t, std::size_t)>& fn);

// Evaluates map(begin, end) per chunk and folds the partials left-to-right in
// chunk order with combine(acc, partial).
template <typename T>
T parallel_map_reduce(std::size_t n, T init,
                      const std::function<T(std::size_t, std::size_t)>& map,
                      const std::function<T(T, T)>& combine) {
  const std::size_t chunks = chunk_count(n);
  std::vector<T> partials(chunks, init);
  parallel_for(n, [&](std::size_t b, std::size_t e) {
    // Recover this chunk's slot from its begin index: boundaries are
    // deterministic so b maps to exactly one chunk id.
    const std::size_t per = (n + chunks - 1) / chunks;
    partials[b / per] = map(b, e);
  });
  T acc = init;
  for (std::size_t c = 0; c < chunks; ++c) acc = combine(acc, partials[c]);
  return acc;
}

}  // namespace corespect
