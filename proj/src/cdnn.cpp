#include "corespect/cdnn.hpp"

#include <algorithm>
#include <cmath>

#include "corespect/errors.hpp"
#include "corespect/neighbors.hpp"
#include "corespect/parallel.hpp"

namespace corespect {

Kernel kernel_from_string(const std::string& name) {
  if (name == "umap_local") return Kernel::umap_local;
  if (name == "linear") return Kernel::linear;
  if (name == "global_gaussian") return Kernel::global_gaussian;
  throw config_error("unknown kernel '" + name +
                     "' (expected umap_local, linear or global_gaussian)");
}

const char* kernel_name(Kernel k) {
  switch (k) {
    case Kernel::umap_local: return "umap_local";
    case Kernel::linear: return "linear";
    case Kernel::global_gaussian: return "global_gaussian";
  }
  return "?";
}

CdnnGraph build_cdnn(const Matrix& x,
                     const std::vector<std::vector<int>>& layers, int t) {
  const int n = static_cast<int>(x.rows());
  if (t < 1) throw config_error("build_cdnn: t must be at least 1");
  if (layers.empty() || layers[0].empty())
    throw config_error("build_cdnn: core layer is empty");

  CdnnGraph g;
  g.t = t;
  g.nbr.resize(n);
  g.dist.resize(n);
  g.weight.resize(n);

  std::vector<int> pool = layers[0];
  for (std::size_t j = 1; j < layers.size(); ++j) {
    if (!layers[j].empty()) {
      KnnResult r = nearest_in_pool(x, layers[j], pool, t);
      for (std::size_t u = 0; u < layers[j].size(); ++u) {
        const int point = layers[j][u];
        g.nbr[point] = std::move(r.idx[u]);
        g.dist[point] = std::move(r.dist[u]);
        g.edge_count += g.nbr[point].size();
      }
    }
    pool.insert(pool.end(), layers[j].begin(), layers[j].end());
  }
  return g;
}

double umap_sigma(const std::vector<double>& dist, double rho, double target) {
  auto raw_sum = [&](double sigma) {
    double s = 0.0;
    for (double d : dist) s += std::exp(-std::max(0.0, d - rho) / sigma);
    return s;
  };

  double lo = 0.0, hi = 1.0;
  for (int grow = 0; grow < 64 && raw_sum(hi) < target; ++grow) hi *= 2.0;
  double mid = hi;
  for (int it = 0; it < 30; ++it) {
    mid = 0.5 * (lo + hi);
    double s = raw_sum(mid);
    if (std::fabs(s - target) <= 1e-5 * target) break;
    if (s > target)
      hi = mid;
    else
      lo = mid;
  }
  return mid;
}

void weight_edges(CdnnGraph& g, Kernel kernel) {
  const std::size_t n = g.nbr.size();
  parallel_for(n, [&](std::size_t b, std::size_t e) {
    std::vector<double> raw;
    for (std::size_t u = b; u < e; ++u) {
      const auto& d = g.dist[u];
      const std::size_t s = d.size();
      auto& w = g.weight[u];
      w.assign(s, 0.0);
      if (s == 0) continue;
      if (s == 1) {
        w[0] = 1.0;  // single edge carries everything, no kernel math
        continue;
      }
      const double rho = d[0];  // edges sorted by distance
      raw.assign(s, 0.0);
      switch (kernel) {
        case Kernel::umap_local: {
          const double target =
              std::log2(std::max<double>(static_cast<double>(s), 2.0));
          const double sigma = umap_sigma(d, rho, target);
          for (std::size_t v = 0; v < s; ++v)
            raw[v] = std::exp(-std::max(0.0, d[v] - rho) / sigma);
          break;
        }
        case Kernel::linear:
          for (std::size_t v = 0; v < s; ++v) raw[v] = 1.0 / (1.0 + d[v]);
          break;
        case Kernel::global_gaussian:
          for (std::size_t v = 0; v < s; ++v)
            raw[v] = std::exp(-(d[v] - rho) * (d[v] - rho));
          break;
      }
      double total = 0.0;
      for (double v : raw) total += v;
      if (!(total > 0.0))
        throw invariant_error("weight_edges: kernel produced a zero row");
      for (std::size_t v = 0; v < s; ++v) w[v] = raw[v] / total;
    }
  });
}

}  // namespace corespect
