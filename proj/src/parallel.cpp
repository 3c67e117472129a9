#include "corespect/parallel.hpp"

#include <algorithm>
#include <atomic>
#include <cstdlib>
#include <exception>
#include <mutex>
#include <string>
#include <thread>

namespace corespect {

int max_threads() {
  int hw = static_cast<int>(std::thread::hardware_concurrency());
  if (hw < 1) hw = 1;
  // CORESPECT_THREADS overrides outright (oversubscription included, which
  // the determinism tests rely on when cores are scarce).
  const char* cap = std::getenv("CORESPECT_THREADS");
  if (cap != nullptr) {
    int v = std::atoi(cap);
    if (v >= 1) return v;
  }
  return hw;
}

std::size_t chunk_count(std::size_t n) {
  if (n == 0) return 0;
  return n < 64 ? n : 64;
}

void parallel_for(std::size_t n,
                  const std::function<void(std::size_t, std::size_t)>& fn) {
  if (n == 0) return;
  const std::size_t chunks = chunk_count(n);
  const std::size_t per = (n + chunks - 1) / chunks;
  const int threads = max_threads();

  if (threads == 1 || chunks == 1) {
    for (std::size_t c = 0; c < chunks; ++c) {
      const std::size_t b = c * per;
      const std::size_t e = std::min(n, b + per);
      if (b < e) fn(b, e);
    }
    return;
  }

  std::atomic<std::size_t> next_chunk{0};
  std::exception_ptr error;
  std::mutex error_mu;
  auto worker = [&]() {
    for (;;) {
      const std::size_t c = next_chunk.fetch_add(1);
      if (c >= chunks) return;
      const std::size_t b = c * per;
      const std::size_t e = std::min(n, b + per);
      if (b >= e) continue;
      try {
        fn(b, e);
      } catch (...) {
        std::lock_guard<std::mutex> lock(error_mu);
        if (!error) error = std::current_exception();
        return;
      }
    }
  };

  std::vector<std::thread> pool;
  const int spawn = static_cast<int>(
      std::min<std::size_t>(static_cast<std::size_t>(threads), chunks));
  pool.reserve(spawn > 1 ? spawn - 1 : 0);
  for (int i = 1; i < spawn; ++i) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();
  if (error) std::rethrow_exception(error);
}

}  // namespace corespect
