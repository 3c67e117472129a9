#pragma once

#include <cstdint>
#include <vector>

#include "corespect/dataset.hpp"
#include "corespect/linalg.hpp"

namespace corespect {

// Layered concentric-density model generator. Each cluster is a dense core
// disk (radius rho0) wrapped in ell-1 annular layers of width `width` whose
// density drops by a factor of `ratio` per layer. Cluster centers are placed
// so the measured core separation honours mu (max intra-core distance over
// min inter-core distance); layer alignment (every outer point much closer to
// its own inner layer than to any other cluster's) is enforced by rejection
// sampling with a 100x oversample cap per point.
struct LcpdmParams {
  int k = 2;          // clusters; gen_entangled requires exactly 2
  int ell = 6;        // layers including the core, at least 2
  int dim = 2;        // ambient dimension; structure lives in the first two
                      // coordinates, the rest are zero
  double rho0 = 1.0;  // core radius
  double width = 0.8; // annulus / tail band width
  double ratio = 1.5; // density decay per layer (C > 1)
  double mu = 0.3;    // separation bound, in (0, 0.5)
  double align = 0.9; // alignment bound delta, in (0, 1)
  int n_core = 400;   // points per core (per cluster)
  std::vector<int> core_sizes;  // optional per-cluster core sizes (length k);
                                // empty means n_core everywhere
  double tail_curl = 0.8;  // entangled only: fraction of a half-turn the
                           // tails sweep; 0 falls back to concentric layers
  std::uint64_t seed = 1;
};

struct SynthDataset {
  Matrix points;
  std::vector<int> labels;       // cluster ids
  std::vector<int> true_layers;  // 0 = core
  std::vector<int> per_layer_counts;  // one cluster's layer sizes
  Matrix centers;                // k x dim core centers used for generation
  double measured_mu = 0.0;
  double measured_align = 0.0;

  Dataset to_dataset() const;
};

// Per-layer point counts for one cluster: n_j = max(1, round(n_core *
// vol_j / (ratio^j * vol_0))) with 2-D volumes.
std::vector<int> lcpdm_layer_counts(const LcpdmParams& p);

// Concentric annuli around well-separated centers (regular k-gon spacing).
SynthDataset gen_separable(const LcpdmParams& p);

// Two clusters whose outer layers curl into interleaving crescents around
// each other (two-moons style) while the cores stay compact and separated.
SynthDataset gen_entangled(const LcpdmParams& p);

}  // namespace corespect
