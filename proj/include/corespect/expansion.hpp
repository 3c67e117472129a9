#pragma once

#include <cstddef>
#include <vector>

#include "corespect/cdnn.hpp"
#include "corespect/linalg.hpp"

namespace corespect {

// Layer-wise label expansion. Core points keep their clustering verbatim;
// every outer point's membership row is the weighted sum of its CDNN
// neighbors' rows (all strictly inner, hence already final), and its label is
// the row argmin (ties to the lowest cluster index).
//
// work_count counts k multiply-accumulates per edge: exactly k * edge_count
// of the processed layers, which is bounded by n * k * t.
struct ExpansionResult {
  std::vector<int> labels;   // length n; -1 for points outside the processed
                             // layers (prefix runs only)
  Matrix membership;         // n x k; untouched rows are zero
  std::size_t work_count = 0;
};

// layers[0] must be the core; core_membership has one row per core point (in
// layers[0] order) and core_labels one entry each. Passing a prefix of the
// full layer list expands only that prefix.
ExpansionResult expand(const Matrix& core_membership,
                       const std::vector<int>& core_labels,
                       const std::vector<std::vector<int>>& layers,
                       const CdnnGraph& graph, std::size_t n_total);

}  // namespace corespect
