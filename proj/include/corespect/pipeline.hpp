#pragma once

#include <cstdint>
#include <vector>

#include "corespect/cdnn.hpp"
#include "corespect/corecluster.hpp"
#include "corespect/expansion.hpp"
#include "corespect/flowrank.hpp"
#include "corespect/linalg.hpp"

namespace corespect {

enum class CoreAlgo { kmeans, gmm };
enum class CoreVariant { lloyd, oneshot };

// Four-step pipeline: density -> FlowRank layers -> core clustering -> CDNN
// expansion. Defaults are the tuned operating point (q=40, r=20, t=20,
// ell=10); callers working under ~2000 points usually want the small preset
// (q=20, r=10, t=10), which the CLI applies automatically.
struct CorespectParams {
  int k = 2;
  CoreAlgo algo = CoreAlgo::kmeans;
  CoreVariant variant = CoreVariant::lloyd;
  int q = 40;
  int r = 20;
  int t = 20;
  int ell = 10;
  int density_steps = 0;  // 0 = ceil(ln n)
  Kernel kernel = Kernel::umap_local;
  std::uint64_t seed = 1;
  KmeansParams km{};
  GmmParams gm{};
  // Diagnostics/ablation hooks: supply densities instead of the random-walk
  // estimate, or a per-point layer assignment instead of the FlowRank
  // partition (layer ids must be 0..L-1; layer 0 is the core).
  std::vector<double> pi_override;
  std::vector<int> layer_override;
};

struct StageSeconds {
  double density = 0.0;
  double flowrank = 0.0;
  double core = 0.0;
  double cdnn = 0.0;
  double expansion = 0.0;
};

struct CorespectResult {
  std::vector<int> labels;
  Matrix membership;
  std::vector<double> pi, z, score;  // empty when layer_override was used
  std::vector<int> layer;            // per point
  std::vector<std::vector<int>> layer_members;
  CdnnGraph graph;
  std::size_t work_count = 0;
  std::size_t cdnn_edges = 0;
  StageSeconds seconds;
  double core_objective = 0.0;  // k-means objective of the core clustering
  int core_size = 0;
  bool gmm_degenerate = false;
  int zero_density = 0;  // points ranked last because the walk left them dry
};

// ell = 1 degenerates to plain core clustering of the full dataset.
CorespectResult corespect(const Matrix& x, const CorespectParams& p);

// Baselines with the same seeding discipline as the pipeline's core stage.
KmeansResult plain_kmeans(const Matrix& x, int k, std::uint64_t seed,
                          const KmeansParams& base = {});
GmmResult plain_gmm(const Matrix& x, int k, std::uint64_t seed,
                    const GmmParams& base = {});

}  // namespace corespect
