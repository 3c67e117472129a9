#pragma once

#include <string>
#include <vector>

#include "corespect/linalg.hpp"

namespace corespect {

enum class Kernel { umap_local, linear, global_gaussian };

Kernel kernel_from_string(const std::string& name);  // config_error on junk
const char* kernel_name(Kernel k);

// Core-directed nearest neighbor graph. Every point in layer j >= 1 links to
// its min(t, pool) nearest neighbors in the union of all strictly inner
// layers (0..j-1); pooling every inner layer rather than just j-1 keeps one
// bad hop from cascading outward. Core points (layer 0) have no edges.
struct CdnnGraph {
  std::vector<std::vector<int>> nbr;     // per point, global indices, sorted
                                         // by (distance, index)
  std::vector<std::vector<double>> dist; // Euclidean, parallel to nbr
  std::vector<std::vector<double>> weight;  // filled by weight_edges
  std::size_t edge_count = 0;
  int t = 0;
};

// layers[j] lists the members of layer j (layer 0 = core). Ties inside the
// neighbor search break by ascending global index.
CdnnGraph build_cdnn(const Matrix& x, const std::vector<std::vector<int>>& layers,
                     int t);

// Per-node normalized edge weights (each node's weights sum to 1; a single
// edge gets weight exactly 1):
//   umap_local      exp(-max(0, d - rho) / sigma), sigma bisected per node so
//                   the raw sum hits log2(max(s, 2))
//   linear          1 / (1 + d)
//   global_gaussian exp(-(d - rho)^2)
// rho is the node's smallest edge distance.
void weight_edges(CdnnGraph& g, Kernel kernel);

// Exposed for tests: the sigma bisection (30 iterations or relative error
// 1e-5 against the target raw sum).
double umap_sigma(const std::vector<double>& dist, double rho, double target);

}  // namespace corespect
