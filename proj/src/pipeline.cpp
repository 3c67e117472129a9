#include "corespect/pipeline.hpp"

#include <algorithm>
#include <chrono>
#include <string>

#include "corespect/density.hpp"
#include "corespect/errors.hpp"
#include "corespect/neighbors.hpp"

namespace corespect {

namespace {

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
      .count();
}

std::vector<std::vector<int>> layers_from_override(const std::vector<int>& ids,
                                                   int n) {
  if (static_cast<int>(ids.size()) != n)
    throw config_error("corespect: layer_override length does not match n");
  int max_l = -1;
  for (int l : ids) {
    if (l < 0) throw config_error("corespect: negative layer id in override");
    max_l = std::max(max_l, l);
  }
  std::vector<std::vector<int>> layers(max_l + 1);
  for (int i = 0; i < n; ++i) layers[ids[i]].push_back(i);
  for (std::size_t j = 0; j < layers.size(); ++j)
    if (layers[j].empty())
      throw config_error("corespect: layer " + std::to_string(j) +
                         " in override is empty");
  return layers;
}

}  // namespace

CorespectResult corespect(const Matrix& x, const CorespectParams& p) {
  const int n = static_cast<int>(x.rows());
  if (n < 2) throw data_error("corespect: need at least 2 points");
  if (p.k < 1) throw config_error("corespect: k must be at least 1");
  const bool own_layers = p.layer_override.empty();
  if (own_layers) {
    // Upper bounds are soft: the neighbor search clamps q and r to n - 1.
    if (p.q < 1) throw config_error("corespect: q must be at least 1");
    if (p.r < 1) throw config_error("corespect: r must be at least 1");
    if (p.ell < 1 || p.ell > n)
      throw config_error("corespect: ell must satisfy 1 <= ell <= n");
  }
  if (p.t < 1) throw config_error("corespect: t must be at least 1");

  Rng root(p.seed);
  CorespectResult res;
  auto clock = std::chrono::steady_clock::now;

  // Steps 1-2: density and FlowRank layers (or the caller's layers).
  if (own_layers) {
    auto t0 = clock();
    if (p.pi_override.empty()) {
      KnnResult qnn = knn_exact(x, p.q);
      res.pi = rw_density(qnn, p.density_steps);
    } else {
      if (static_cast<int>(p.pi_override.size()) != n)
        throw config_error("corespect: pi_override length does not match n");
      res.pi = p.pi_override;
    }
    res.seconds.density = seconds_since(t0);

    t0 = clock();
    FlowRankResult fr = flowrank(x, res.pi, p.r);
    LayerPartition lp = partition_layers(fr, p.ell);
    res.zero_density = fr.zero_density;
    res.z = std::move(fr.z);
    res.score = std::move(fr.score);
    res.layer = std::move(lp.layer);
    res.layer_members = std::move(lp.members);
    res.seconds.flowrank = seconds_since(t0);
  } else {
    res.layer_members = layers_from_override(p.layer_override, n);
    res.layer = p.layer_override;
  }

  // Step 3a: cluster the core.
  const std::vector<int>& core = res.layer_members[0];
  res.core_size = static_cast<int>(core.size());
  if (p.k > res.core_size)
    throw config_error("corespect: k = " + std::to_string(p.k) +
                       " exceeds core size " + std::to_string(res.core_size) +
                       "; increase ell coverage or lower k");

  Matrix core_x(core.size(), x.cols());
  for (std::size_t i = 0; i < core.size(); ++i)
    core_x.row(i) = x.row(core[i]);

  auto t0 = clock();
  Matrix core_membership;
  std::vector<int> core_labels;
  Rng core_rng = root.split("core");
  if (p.algo == CoreAlgo::kmeans) {
    KmeansParams kp = p.km;
    kp.k = p.k;
    KmeansResult km = p.variant == CoreVariant::oneshot
                          ? kmeans_oneshot_restarts(core_x, p.k, core_rng)
                          : kmeans(core_x, kp, core_rng);
    core_membership = kmeans_membership(core_x, km.centers);
    core_labels = std::move(km.labels);
    res.core_objective = km.objective;
  } else {
    GmmParams gp = p.gm;
    gp.k = p.k;
    GmmResult gm = gmm_fit(core_x, gp, core_rng);
    core_membership = gmm_membership(core_x, gm);
    core_labels = std::move(gm.labels);
    res.gmm_degenerate = gm.degenerate;
    res.core_objective = kmeans_objective(core_x, core_labels);
  }
  res.seconds.core = seconds_since(t0);

  // Step 3b: CDNN graph over the layer structure.
  t0 = clock();
  res.graph = build_cdnn(x, res.layer_members, p.t);
  weight_edges(res.graph, p.kernel);
  res.cdnn_edges = res.graph.edge_count;
  res.seconds.cdnn = seconds_since(t0);

  // Step 4: expansion.
  t0 = clock();
  ExpansionResult ex = expand(core_membership, core_labels, res.layer_members,
                              res.graph, static_cast<std::size_t>(n));
  res.seconds.expansion = seconds_since(t0);
  res.labels = std::move(ex.labels);
  res.membership = std::move(ex.membership);
  res.work_count = ex.work_count;

  if (res.work_count !=
      static_cast<std::size_t>(p.k) * res.cdnn_edges)
    throw invariant_error("corespect: work count does not equal k * edges");
  return res;
}

KmeansResult plain_kmeans(const Matrix& x, int k, std::uint64_t seed,
                          const KmeansParams& base) {
  KmeansParams kp = base;
  kp.k = k;
  Rng rng = Rng(seed).split("core");
  return kmeans(x, kp, rng);
}

GmmResult plain_gmm(const Matrix& x, int k, std::uint64_t seed,
                    const GmmParams& base) {
  GmmParams gp = base;
  gp.k = k;
  Rng rng = Rng(seed).split("core");
  return gmm_fit(x, gp, rng);
}

}  // namespace corespect
