#pragma once

#include <vector>

#include "corespect/linalg.hpp"
#include "corespect/rng.hpp"

namespace corespect {

// --- K-Means ----------------------------------------------------------------

struct KmeansParams {
  int k = 2;
  int n_init = 10;    // restarts, best objective wins (earliest on ties)
  int max_iter = 300;
  double tol = 1e-4;  // stop when the largest center shift drops below this
};

struct KmeansResult {
  Matrix centers;           // k x d
  std::vector<int> labels;  // argmin distance, ties to the lowest index
  double objective = 0.0;   // sum of squared distances to assigned centers
  int iterations = 0;       // of the winning restart
};

// k-means++ seeding: first center uniform, the rest sampled proportionally to
// the squared distance to the nearest chosen center. When all remaining mass
// is zero (duplicate-heavy data), falls back to the lowest unchosen index, so
// k == n always yields a permutation of the input points.
Matrix kmeans_pp_init(const Matrix& x, int k, Rng& rng);

// Lloyd iterations from k-means++ starts. Empty clusters are repaired by
// re-seeding at the point farthest from its assigned center.
KmeansResult kmeans(const Matrix& x, const KmeansParams& p, Rng& rng);

// 2 * ceil(ln n) independent runs of (k-means++ seeding, exactly one Lloyd
// assignment + update step); the run with the smallest objective wins. The
// cheap variant for separated-core data.
KmeansResult kmeans_oneshot_restarts(const Matrix& x, int k, Rng& rng);

// Objective of a labeling with centers implied as per-label means.
double kmeans_objective(const Matrix& x, const std::vector<int>& labels);

// Membership matrix convention for the expansion step: row i holds the
// Euclidean distances from point i to each center (argmin row == label).
Matrix kmeans_membership(const Matrix& x, const Matrix& centers);

// --- Gaussian mixture --------------------------------------------------------

struct GmmParams {
  int k = 2;
  int max_iter = 100;
  double tol = 1e-3;   // stop when mean log-likelihood improves by less
  double reg = 1e-6;   // ridge added to covariance diagonals
};

struct GmmResult {
  Matrix means;                            // k x d
  std::vector<Eigen::MatrixXd> covariances;  // k of d x d
  Vector weights;                          // k, sums to 1
  Matrix responsibilities;                 // n x k, rows sum to 1
  std::vector<int> labels;                 // argmax responsibility
  double mean_log_likelihood = 0.0;
  std::vector<double> ll_history;          // per EM iteration (monotone)
  int iterations = 0;
  bool degenerate = false;  // ridge had to be raised beyond `reg`
};

// Full-covariance EM initialized from a k-means run on the same data.
GmmResult gmm_fit(const Matrix& x, const GmmParams& p, Rng& rng);

// Membership rows are negated posteriors so that argmin row == label,
// matching the K-Means convention.
Matrix gmm_membership(const Matrix& x, const GmmResult& g);

}  // namespace corespect
