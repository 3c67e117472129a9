#pragma once

#include <vector>

#include "corespect/neighbors.hpp"

namespace corespect {

// Random-walk density over the directed q-NN graph.
//
// P is row-stochastic with P(i, j) = 1/deg(i) for each out-neighbor j. The
// walk starts from the uniform distribution and the full distribution is
// propagated exactly for T steps (T = ceil(ln n) when steps == 0); the
// resulting mass per node is the density estimate. No sampling is involved,
// so the output is deterministic by construction.
//
// Postcondition: output sums to 1 within 1e-9 (checked).
std::vector<double> rw_density(const KnnResult& graph, int steps = 0);

}  // namespace corespect
