#pragma once

#include <memory>
#include <vector>

#include "corespect/linalg.hpp"

namespace corespect {

// k nearest neighbors per query, sorted by (distance, index) ascending.
// Distances are Euclidean.
struct KnnResult {
  std::vector<std::vector<int>> idx;
  std::vector<std::vector<double>> dist;
  bool q_clamped = false;  // q exceeded n - 1 and was reduced to n - 1
};

// Exact q-NN of every point among all other points (self excluded).
// Requires q >= 1; q > n - 1 is clamped to n - 1 and flagged in the result.
// Ties broken by ascending point index.
//
// Internally: blocked gram-matrix distances for candidate selection, then the
// candidates near the cut are re-evaluated with the plain per-pair kernel, so
// results match an O(n^2) direct scan bit for bit.
KnnResult knn_exact(const Matrix& x, int q);

// For each query index, the t nearest pool indices (t > pool size is clamped
// to the pool size; identical indices are excluded). Same exactness contract
// as knn_exact.
KnnResult nearest_in_pool(const Matrix& x, const std::vector<int>& queries,
                          const std::vector<int>& pool, int t);

// Pluggable neighbor search. The exact backend is the reference; an
// approximate drop-in must clear recall_at_q >= 0.95 against it before use.
class NeighborBackend {
 public:
  virtual ~NeighborBackend() = default;
  virtual KnnResult all_knn(const Matrix& x, int q) const = 0;
  virtual const char* name() const = 0;
};

class ExactBackend final : public NeighborBackend {
 public:
  KnnResult all_knn(const Matrix& x, int q) const override;
  const char* name() const override { return "exact"; }
};

// Mean over queries of |approx row  ∩ exact row| / q.
double recall_at_q(const KnnResult& approx, const KnnResult& exact);

}  // namespace corespect
