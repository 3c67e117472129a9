#include "corespect/flowrank.hpp"

#include <algorithm>
#include <numeric>
#include <string>

#include "corespect/errors.hpp"

namespace corespect {

std::vector<double> rarw_expectation(const std::vector<double>& pi,
                                     const std::vector<std::vector<int>>& rnn) {
  const std::size_t n = pi.size();
  if (rnn.size() != n)
    throw config_error("rarw_expectation: pi and neighbor lists disagree on n");
  for (double v : pi)
    if (!(v >= 0.0))
      throw config_error("rarw_expectation: densities must be non-negative");

  // Ascent edges only go to strictly larger pi, so processing points in
  // decreasing-pi order makes every z[j] final before it is read. Equal-pi
  // points never reference each other and may appear in any order.
  std::vector<int> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](int a, int b) {
    if (pi[a] != pi[b]) return pi[a] > pi[b];
    return a < b;
  });

  std::vector<double> z(n);
  for (int i : order) {
    double sum = 0.0;
    int ascents = 0;
    for (int j : rnn[i]) {
      if (pi[j] > pi[i]) {
        sum += z[j];
        ++ascents;
      }
    }
    z[i] = ascents == 0 ? pi[i] : sum / static_cast<double>(ascents);
  }
  return z;
}

FlowRankResult flowrank_from_rnn(const std::vector<double>& pi,
                                 const std::vector<std::vector<int>>& rnn) {
  FlowRankResult fr;
  fr.pi = pi;
  fr.z = rarw_expectation(pi, rnn);
  fr.score.resize(pi.size());
  for (std::size_t i = 0; i < pi.size(); ++i) {
    if (pi[i] == 0.0) {
      // A point the walk graph never feeds. Rank it below everything that
      // carries mass instead of failing the whole run.
      fr.score[i] = 0.0;
      ++fr.zero_density;
      continue;
    }
    fr.score[i] = pi[i] / fr.z[i];
    if (!(fr.score[i] > 0.0) || fr.score[i] > 1.0 + 1e-12)
      throw invariant_error("flowrank: score out of (0, 1] at point " +
                            std::to_string(i));
    if (fr.score[i] > 1.0) fr.score[i] = 1.0;  // clip rounding residue
  }
  return fr;
}

FlowRankResult flowrank(const Matrix& x, const std::vector<double>& pi, int r) {
  if (static_cast<std::size_t>(x.rows()) != pi.size())
    throw config_error("flowrank: pi length does not match point count");
  KnnResult rnn = knn_exact(x, r);
  return flowrank_from_rnn(pi, rnn.idx);
}

LayerPartition partition_layers(const FlowRankResult& fr, int ell) {
  const int n = static_cast<int>(fr.score.size());
  if (ell < 1) throw config_error("partition_layers: ell must be at least 1");
  if (ell > n)
    throw config_error("partition_layers: ell = " + std::to_string(ell) +
                       " exceeds point count " + std::to_string(n));

  LayerPartition lp;
  lp.order.resize(n);
  std::iota(lp.order.begin(), lp.order.end(), 0);
  std::sort(lp.order.begin(), lp.order.end(), [&](int a, int b) {
    if (fr.score[a] != fr.score[b]) return fr.score[a] > fr.score[b];
    if (fr.pi[a] != fr.pi[b]) return fr.pi[a] > fr.pi[b];
    return a < b;
  });

  lp.layer.assign(n, -1);
  lp.position.resize(n);
  lp.members.resize(ell);
  const int base = n / ell;
  const int extra = n % ell;  // first `extra` layers hold base + 1
  int at = 0;
  for (int l = 0; l < ell; ++l) {
    const int sz = base + (l < extra ? 1 : 0);
    lp.members[l].reserve(sz);
    for (int s = 0; s < sz; ++s, ++at) {
      lp.members[l].push_back(lp.order[at]);
      lp.layer[lp.order[at]] = l;
    }
    // Canonical member order inside a layer is ascending index, so a single
    // layer covers the dataset in its original row order.
    std::sort(lp.members[l].begin(), lp.members[l].end());
  }
  for (int p = 0; p < n; ++p) lp.position[lp.order[p]] = p;
  return lp;
}

double layer_preservation_check(const std::vector<int>& position,
                                const std::vector<int>& true_layers,
                                const std::vector<int>& clusters) {
  const std::size_t n = position.size();
  if (true_layers.size() != n || clusters.size() != n)
    throw config_error("layer_preservation_check: input lengths differ");

  // Group by cluster, then count ordered pairs across distinct true layers.
  int max_c = 0;
  for (int c : clusters) max_c = std::max(max_c, c);
  std::vector<std::vector<int>> by_cluster(max_c + 1);
  for (std::size_t i = 0; i < n; ++i) by_cluster[clusters[i]].push_back(i);

  std::size_t good = 0, total = 0;
  for (const auto& pts : by_cluster) {
    for (std::size_t a = 0; a < pts.size(); ++a) {
      for (std::size_t b = a + 1; b < pts.size(); ++b) {
        int u = pts[a], v = pts[b];
        if (true_layers[u] == true_layers[v]) continue;
        // inner = smaller true layer id; should sit earlier in the ranking
        int inner = true_layers[u] < true_layers[v] ? u : v;
        int outer = inner == u ? v : u;
        ++total;
        if (position[inner] < position[outer]) ++good;
      }
    }
  }
  if (total == 0) return 1.0;
  return static_cast<double>(good) / static_cast<double>(total);
}

}  // namespace corespect
