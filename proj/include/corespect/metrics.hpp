#pragma once

#include <vector>

#include "corespect/cdnn.hpp"
#include "corespect/linalg.hpp"

namespace corespect {

// Adjusted Rand index via pair counting with the expected-index correction.
// 1 for identical partitions, ~0 for independent ones; can go negative.
double ari(const std::vector<int>& a, const std::vector<int>& b);

// Normalized mutual information, natural log. Arithmetic-mean normalization
// is the default used across this project.
enum class NmiNorm { arithmetic, geometric, min, max };
double nmi(const std::vector<int>& a, const std::vector<int>& b,
           NmiNorm norm = NmiNorm::arithmetic);

// Maximum fraction of agreeing points over all injective assignments of
// predicted clusters to true ones (optimal matching on the confusion matrix).
double best_match_accuracy(const std::vector<int>& truth,
                           const std::vector<int>& pred);

// The objective-inversion diagnostic: a core-driven clustering can lose on
// the global K-Means objective while winning on the core subset.
struct SubsetObjectiveReport {
  double core_by_core_labels = 0.0;  // corespect labels, core points only
  double core_by_full_labels = 0.0;  // plain labels, core points only
  double full_by_core_labels = 0.0;  // corespect labels, all points
  double full_by_full_labels = 0.0;  // plain labels, all points
};
SubsetObjectiveReport subset_kmeans_objective_report(
    const Matrix& x, const std::vector<int>& labels_full,
    const std::vector<int>& labels_core, const std::vector<int>& core);

// Per-query fraction of the m nearest pool members sharing the query's
// label. euclidean ranks the pool by distance; cdnn_path ranks it by
// shortest-path length over the CDNN edges treated as undirected (Euclidean
// edge lengths, one single-source pass per query, unreachable points rank
// last by index). A query inside the pool never counts itself; m is clamped
// to the available pool size.
enum class AgreementMetric { euclidean, cdnn_path };
std::vector<double> nn_label_agreement(const Matrix& x,
                                       const std::vector<int>& labels,
                                       const std::vector<int>& queries,
                                       const std::vector<int>& pool, int m,
                                       AgreementMetric metric,
                                       const CdnnGraph* graph = nullptr);

// Convenience form: every point queries against all the others.
std::vector<double> nn_label_agreement(const Matrix& x,
                                       const std::vector<int>& labels, int m,
                                       AgreementMetric metric,
                                       const CdnnGraph* graph = nullptr);

}  // namespace corespect
