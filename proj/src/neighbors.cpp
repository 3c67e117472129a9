#include "corespect/neighbors.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "corespect/errors.hpp"
#include "corespect/parallel.hpp"

namespace corespect {

namespace {

// Canonical distance kernel. Candidate ordering is always decided by this
// exact form, never by the gram-matrix shortcut, so every code path agrees
// with a direct O(n^2) scan.
inline double sq_dist_rows(const Matrix& x, int a, int b) {
  return (x.row(a) - x.row(b)).squaredNorm();
}

struct Candidate {
  double d2;
  int pool_pos;
};

// For each query (a row index into x), the k nearest among pool (row indices
// into x), excluding entries whose index equals the query's. Results sorted
// by (exact distance, index).
KnnResult select_neighbors(const Matrix& x, const std::vector<int>& queries,
                           const std::vector<int>& pool, int k) {
  const int nq = static_cast<int>(queries.size());
  const int np = static_cast<int>(pool.size());
  const int d = static_cast<int>(x.cols());

  KnnResult res;
  res.idx.resize(nq);
  res.dist.resize(nq);

  // Gather the pool once; queries are gathered per chunk.
  Matrix p(np, d);
  for (int j = 0; j < np; ++j) p.row(j) = x.row(pool[j]);
  Vector psq(np);
  for (int j = 0; j < np; ++j) psq(j) = p.row(j).squaredNorm();
  const double psq_max = np > 0 ? psq.maxCoeff() : 0.0;

  parallel_for(static_cast<std::size_t>(nq), [&](std::size_t b, std::size_t e) {
    const int nb = static_cast<int>(e - b);
    Matrix q(nb, d);
    for (int i = 0; i < nb; ++i) q.row(i) = x.row(queries[b + i]);
    Vector qsq(nb);
    for (int i = 0; i < nb; ++i) qsq(i) = q.row(i).squaredNorm();

    // Gram matrix for the whole chunk: one big GEMM instead of nb*np scalar
    // distance evaluations.
    Matrix g = q * p.transpose();

    std::vector<Candidate> approx(np);
    std::vector<Candidate> finalists;
    for (int i = 0; i < nb; ++i) {
      const int qi = queries[b + i];
      int m = 0;
      for (int j = 0; j < np; ++j) {
        if (pool[j] == qi) continue;
        double a = qsq(i) + psq(j) - 2.0 * g(i, j);
        approx[m++] = {a < 0.0 ? 0.0 : a, j};
      }
      const int kk = std::min(k, m);
      if (kk < m) {
        std::nth_element(approx.begin(), approx.begin() + (kk - 1),
                         approx.begin() + m,
                         [](const Candidate& l, const Candidate& r) {
                           return l.d2 < r.d2;
                         });
      }
      // Everything at or below the k-th approximate distance plus a margin
      // that dominates the gram-matrix rounding error gets re-measured with
      // the exact kernel.
      double cut = 0.0;
      for (int j = 0; j < kk; ++j) cut = std::max(cut, approx[j].d2);
      cut += 1e-10 * (1.0 + qsq(i) + psq_max);

      finalists.clear();
      for (int j = 0; j < m; ++j) {
        if (approx[j].d2 <= cut) {
          finalists.push_back(
              {sq_dist_rows(x, qi, pool[approx[j].pool_pos]),
               approx[j].pool_pos});
        }
      }
      std::sort(finalists.begin(), finalists.end(),
                [&](const Candidate& l, const Candidate& r) {
                  if (l.d2 != r.d2) return l.d2 < r.d2;
                  return pool[l.pool_pos] < pool[r.pool_pos];
                });

      auto& oi = res.idx[b + i];
      auto& od = res.dist[b + i];
      oi.resize(kk);
      od.resize(kk);
      for (int j = 0; j < kk; ++j) {
        oi[j] = pool[finalists[j].pool_pos];
        od[j] = std::sqrt(finalists[j].d2);
      }
    }
  });

  return res;
}

}  // namespace

KnnResult knn_exact(const Matrix& x, int q) {
  const int n = static_cast<int>(x.rows());
  if (q < 1) throw config_error("knn_exact: q must be at least 1");
  bool clamped = false;
  if (q > n - 1) {
    // nothing beyond the complete graph to ask for
    q = n - 1;
    clamped = true;
  }
  std::vector<int> all(n);
  for (int i = 0; i < n; ++i) all[i] = i;
  KnnResult res = select_neighbors(x, all, all, q);
  res.q_clamped = clamped;
  return res;
}

KnnResult nearest_in_pool(const Matrix& x, const std::vector<int>& queries,
                          const std::vector<int>& pool, int t) {
  const int n = static_cast<int>(x.rows());
  if (t < 1) throw config_error("nearest_in_pool: t must be at least 1");
  if (pool.empty()) throw config_error("nearest_in_pool: empty pool");
  for (int i : queries)
    if (i < 0 || i >= n) throw invariant_error("nearest_in_pool: query index out of range");
  for (int i : pool)
    if (i < 0 || i >= n) throw invariant_error("nearest_in_pool: pool index out of range");
  return select_neighbors(x, queries, pool, t);
}

KnnResult ExactBackend::all_knn(const Matrix& x, int q) const {
  return knn_exact(x, q);
}

double recall_at_q(const KnnResult& approx, const KnnResult& exact) {
  if (approx.idx.size() != exact.idx.size())
    throw invariant_error("recall_at_q: query counts differ");
  if (approx.idx.empty()) return 1.0;
  double total = 0.0;
  for (std::size_t i = 0; i < exact.idx.size(); ++i) {
    std::vector<int> a = approx.idx[i], b = exact.idx[i];
    std::sort(a.begin(), a.end());
    std::sort(b.begin(), b.end());
    std::vector<int> common;
    std::set_intersection(a.begin(), a.end(), b.begin(), b.end(),
                          std::back_inserter(common));
    total += b.empty() ? 1.0
                       : static_cast<double>(common.size()) /
                             static_cast<double>(b.size());
  }
  return total / static_cast<double>(exact.idx.size());
}

}  // namespace corespect
