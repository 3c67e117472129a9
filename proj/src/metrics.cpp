#include "corespect/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <queue>
#include <string>

#include "corespect/corecluster.hpp"
#include "corespect/errors.hpp"
#include "corespect/neighbors.hpp"
#include "corespect/parallel.hpp"

namespace corespect {

namespace {

struct Contingency {
  std::vector<std::vector<std::int64_t>> table;  // ka x kb
  std::vector<std::int64_t> row, col;
  std::int64_t n = 0;
};

Contingency contingency(const std::vector<int>& a, const std::vector<int>& b) {
  if (a.size() != b.size())
    throw config_error("metrics: labelings have different lengths");
  if (a.empty()) throw config_error("metrics: empty labelings");
  int ka = 0, kb = 0;
  for (int v : a) {
    if (v < 0) throw config_error("metrics: negative label");
    ka = std::max(ka, v + 1);
  }
  for (int v : b) {
    if (v < 0) throw config_error("metrics: negative label");
    kb = std::max(kb, v + 1);
  }
  Contingency c;
  c.table.assign(ka, std::vector<std::int64_t>(kb, 0));
  c.row.assign(ka, 0);
  c.col.assign(kb, 0);
  c.n = static_cast<std::int64_t>(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    c.table[a[i]][b[i]]++;
    c.row[a[i]]++;
    c.col[b[i]]++;
  }
  return c;
}

double choose2(std::int64_t m) {
  return 0.5 * static_cast<double>(m) * static_cast<double>(m - 1);
}

}  // namespace

double ari(const std::vector<int>& a, const std::vector<int>& b) {
  Contingency c = contingency(a, b);
  double sum_ij = 0.0;
  for (const auto& row : c.table)
    for (std::int64_t v : row) sum_ij += choose2(v);
  double sum_a = 0.0, sum_b = 0.0;
  for (std::int64_t v : c.row) sum_a += choose2(v);
  for (std::int64_t v : c.col) sum_b += choose2(v);
  const double pairs = choose2(c.n);

  if (pairs == 0.0) return 1.0;  // a single point: partitions trivially agree
  const double expected = sum_a * sum_b / pairs;
  const double max_index = 0.5 * (sum_a + sum_b);
  if (max_index == expected) {
    // Both partitions are all-singletons or all-one-cluster; they agree
    // exactly when they are equal, and in these shapes they always are.
    return 1.0;
  }
  return (sum_ij - expected) / (max_index - expected);
}

double nmi(const std::vector<int>& a, const std::vector<int>& b, NmiNorm norm) {
  Contingency c = contingency(a, b);
  const double n = static_cast<double>(c.n);

  double h_a = 0.0, h_b = 0.0;
  for (std::int64_t v : c.row)
    if (v > 0) h_a -= (v / n) * std::log(v / n);
  for (std::int64_t v : c.col)
    if (v > 0) h_b -= (v / n) * std::log(v / n);

  // Both labelings constant: identical trivial partitions.
  if (c.row.size() == 1 && c.col.size() == 1) return 1.0;

  double mi = 0.0;
  for (std::size_t i = 0; i < c.table.size(); ++i) {
    for (std::size_t j = 0; j < c.table[i].size(); ++j) {
      const std::int64_t v = c.table[i][j];
      if (v == 0) continue;
      const double pij = v / n;
      mi += pij * std::log(pij * n * n /
                           (static_cast<double>(c.row[i]) *
                            static_cast<double>(c.col[j])));
    }
  }
  if (mi <= 0.0) return 0.0;

  double denom = 0.0;
  switch (norm) {
    case NmiNorm::arithmetic: denom = 0.5 * (h_a + h_b); break;
    case NmiNorm::geometric: denom = std::sqrt(h_a * h_b); break;
    case NmiNorm::min: denom = std::min(h_a, h_b); break;
    case NmiNorm::max: denom = std::max(h_a, h_b); break;
  }
  if (denom <= 0.0) return 0.0;
  return mi / denom;
}

namespace {

// Hungarian algorithm (shortest augmenting paths with potentials) on a square
// cost matrix; returns the minimum-cost assignment of rows to columns.
std::vector<int> hungarian_min(const std::vector<std::vector<double>>& cost) {
  const int n = static_cast<int>(cost.size());
  // 1-based potentials arrays, standard formulation
  std::vector<double> u(n + 1, 0.0), v(n + 1, 0.0);
  std::vector<int> p(n + 1, 0), way(n + 1, 0);
  for (int i = 1; i <= n; ++i) {
    p[0] = i;
    int j0 = 0;
    std::vector<double> minv(n + 1, std::numeric_limits<double>::infinity());
    std::vector<char> used(n + 1, 0);
    do {
      used[j0] = 1;
      int i0 = p[j0], j1 = 0;
      double delta = std::numeric_limits<double>::infinity();
      for (int j = 1; j <= n; ++j) {
        if (used[j]) continue;
        double cur = cost[i0 - 1][j - 1] - u[i0] - v[j];
        if (cur < minv[j]) {
          minv[j] = cur;
          way[j] = j0;
        }
        if (minv[j] < delta) {
          delta = minv[j];
          j1 = j;
        }
      }
      for (int j = 0; j <= n; ++j) {
        if (used[j]) {
          u[p[j]] += delta;
          v[j] -= delta;
        } else {
          minv[j] -= delta;
        }
      }
      j0 = j1;
    } while (p[j0] != 0);
    do {
      int j1 = way[j0];
      p[j0] = p[j1];
      j0 = j1;
    } while (j0);
  }
  std::vector<int> row_to_col(n, -1);
  for (int j = 1; j <= n; ++j)
    if (p[j] > 0) row_to_col[p[j] - 1] = j - 1;
  return row_to_col;
}

}  // namespace

double best_match_accuracy(const std::vector<int>& truth,
                           const std::vector<int>& pred) {
  Contingency c = contingency(truth, pred);
  const int ka = static_cast<int>(c.row.size());
  const int kb = static_cast<int>(c.col.size());
  const int n_sq = std::max(ka, kb);
  // Maximize matches == minimize negated counts on a zero-padded square.
  std::vector<std::vector<double>> cost(n_sq, std::vector<double>(n_sq, 0.0));
  for (int i = 0; i < ka; ++i)
    for (int j = 0; j < kb; ++j)
      cost[i][j] = -static_cast<double>(c.table[i][j]);
  std::vector<int> match = hungarian_min(cost);
  double agree = 0.0;
  for (int i = 0; i < ka; ++i)
    if (match[i] < kb) agree += static_cast<double>(c.table[i][match[i]]);
  return agree / static_cast<double>(c.n);
}

SubsetObjectiveReport subset_kmeans_objective_report(
    const Matrix& x, const std::vector<int>& labels_full,
    const std::vector<int>& labels_core, const std::vector<int>& core) {
  const int n = static_cast<int>(x.rows());
  if (static_cast<int>(labels_full.size()) != n ||
      static_cast<int>(labels_core.size()) != n)
    throw config_error("subset_kmeans_objective_report: label lengths differ "
                       "from point count");
  if (core.empty())
    throw config_error("subset_kmeans_objective_report: empty core");

  Matrix core_x(core.size(), x.cols());
  std::vector<int> core_full(core.size()), core_core(core.size());
  for (std::size_t i = 0; i < core.size(); ++i) {
    const int idx = core[i];
    if (idx < 0 || idx >= n)
      throw config_error("subset_kmeans_objective_report: core index out of "
                         "range");
    core_x.row(i) = x.row(idx);
    core_full[i] = labels_full[idx];
    core_core[i] = labels_core[idx];
  }

  SubsetObjectiveReport rep;
  rep.core_by_core_labels = kmeans_objective(core_x, core_core);
  rep.core_by_full_labels = kmeans_objective(core_x, core_full);
  rep.full_by_core_labels = kmeans_objective(x, labels_core);
  rep.full_by_full_labels = kmeans_objective(x, labels_full);
  return rep;
}

std::vector<double> nn_label_agreement(const Matrix& x,
                                       const std::vector<int>& labels,
                                       const std::vector<int>& queries,
                                       const std::vector<int>& pool, int m,
                                       AgreementMetric metric,
                                       const CdnnGraph* graph) {
  const int n = static_cast<int>(x.rows());
  if (static_cast<int>(labels.size()) != n)
    throw config_error("nn_label_agreement: label count does not match rows");
  if (m < 1) throw config_error("nn_label_agreement: m must be at least 1");
  if (queries.empty() || pool.empty())
    throw config_error("nn_label_agreement: queries and pool must be "
                       "non-empty");
  for (int i : queries)
    if (i < 0 || i >= n)
      throw config_error("nn_label_agreement: query index out of range");
  for (int i : pool)
    if (i < 0 || i >= n)
      throw config_error("nn_label_agreement: pool index out of range");

  const std::size_t nq = queries.size();
  std::vector<double> agree(nq, 0.0);

  if (metric == AgreementMetric::euclidean) {
    KnnResult nn = nearest_in_pool(x, queries, pool, m);
    for (std::size_t i = 0; i < nq; ++i) {
      if (nn.idx[i].empty())
        throw config_error("nn_label_agreement: a query's pool is empty "
                           "after excluding itself");
      int same = 0;
      for (int j : nn.idx[i])
        if (labels[j] == labels[queries[i]]) ++same;
      agree[i] = static_cast<double>(same) /
                 static_cast<double>(nn.idx[i].size());
    }
    return agree;
  }

  if (graph == nullptr)
    throw config_error("nn_label_agreement: cdnn_path needs a CDNN graph");

  // Undirected view of the CDNN edges with Euclidean lengths.
  std::vector<std::vector<std::pair<int, double>>> adj(n);
  for (int u = 0; u < n; ++u) {
    for (std::size_t e = 0; e < graph->nbr[u].size(); ++e) {
      const int v = graph->nbr[u][e];
      const double d = graph->dist[u][e];
      adj[u].push_back({v, d});
      adj[v].push_back({u, d});
    }
  }

  parallel_for(nq, [&](std::size_t b, std::size_t e) {
    std::vector<double> dist(n);
    std::priority_queue<std::pair<double, int>,
                        std::vector<std::pair<double, int>>,
                        std::greater<>> heap;
    for (std::size_t qi = b; qi < e; ++qi) {
      const int s = queries[qi];
      std::fill(dist.begin(), dist.end(),
                std::numeric_limits<double>::infinity());
      dist[s] = 0.0;
      heap.push({0.0, s});
      while (!heap.empty()) {
        auto [d, u] = heap.top();
        heap.pop();
        if (d > dist[u]) continue;
        for (const auto& [v, w] : adj[u]) {
          if (d + w < dist[v]) {
            dist[v] = d + w;
            heap.push({dist[v], v});
          }
        }
      }
      // Rank the pool by (path distance, index); unreachable members
      // (infinite distance) sort last, still by index.
      std::vector<int> order;
      order.reserve(pool.size());
      for (int i : pool)
        if (i != s) order.push_back(i);
      if (order.empty())
        throw config_error("nn_label_agreement: a query's pool is empty "
                           "after excluding itself");
      std::stable_sort(order.begin(), order.end(), [&](int a2, int b2) {
        if (dist[a2] != dist[b2]) return dist[a2] < dist[b2];
        return a2 < b2;
      });
      const int take = std::min<int>(m, static_cast<int>(order.size()));
      int same = 0;
      for (int j = 0; j < take; ++j)
        if (labels[order[j]] == labels[s]) ++same;
      agree[qi] = static_cast<double>(same) / static_cast<double>(take);
    }
  });
  return agree;
}

std::vector<double> nn_label_agreement(const Matrix& x,
                                       const std::vector<int>& labels, int m,
                                       AgreementMetric metric,
                                       const CdnnGraph* graph) {
  const int n = static_cast<int>(x.rows());
  if (m >= n)
    throw config_error("nn_label_agreement: m must satisfy 1 <= m < n");
  std::vector<int> all(n);
  for (int i = 0; i < n; ++i) all[i] = i;
  return nn_label_agreement(x, labels, all, all, m, metric, graph);
}

}  // namespace corespect
