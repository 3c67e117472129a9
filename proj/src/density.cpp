#include "corespect/density.hpp"

#include <cmath>
#include <numeric>

#include "corespect/errors.hpp"
#include "corespect/parallel.hpp"

namespace corespect {

std::vector<double> rw_density(const KnnResult& graph, int steps) {
  const std::size_t n = graph.idx.size();
  if (n == 0) throw config_error("rw_density: empty graph");
  for (const auto& nbrs : graph.idx)
    if (nbrs.empty())
      throw config_error("rw_density: every node needs at least one out-edge");
  if (steps < 0) throw config_error("rw_density: steps must be >= 0");
  const int t_steps =
      steps > 0 ? steps
                : static_cast<int>(std::ceil(std::log(static_cast<double>(n))));

  // Transpose adjacency: in-edges per node, each with the source's 1/deg.
  // Receiving-side accumulation keeps every node's sum a fixed-order serial
  // loop, so the result is independent of the thread count.
  std::vector<std::vector<std::pair<int, double>>> in_edges(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double w = 1.0 / static_cast<double>(graph.idx[i].size());
    for (int j : graph.idx[i]) {
      if (j < 0 || static_cast<std::size_t>(j) >= n)
        throw invariant_error("rw_density: edge endpoint out of range");
      in_edges[j].push_back({static_cast<int>(i), w});
    }
  }

  std::vector<double> mass(n, 1.0 / static_cast<double>(n));
  std::vector<double> next(n);
  for (int step = 0; step < t_steps; ++step) {
    parallel_for(n, [&](std::size_t b, std::size_t e) {
      for (std::size_t j = b; j < e; ++j) {
        double acc = 0.0;
        for (const auto& [src, w] : in_edges[j]) acc += mass[src] * w;
        next[j] = acc;
      }
    });
    mass.swap(next);
  }

  const double total = std::accumulate(mass.begin(), mass.end(), 0.0);
  if (std::fabs(total - 1.0) > 1e-9)
    throw invariant_error("rw_density: mass not conserved (sum = " +
                          std::to_string(total) + ")");
  return mass;
}

}  // namespace corespect
