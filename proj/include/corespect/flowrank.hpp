#pragma once

#include <vector>

#include "corespect/linalg.hpp"
#include "corespect/neighbors.hpp"

namespace corespect {

// FlowRank: score each point by pi / z, where z is the expected terminal
// density of a rank-ascending random walk started at the point. The walk
// moves uniformly at random among the r nearest neighbors with strictly
// higher density and stops when there is none; z has a closed recursive form
// evaluated by dynamic programming in decreasing-density order, so no walks
// are simulated.
//
// Scores lie in (0, 1], with score == 1 exactly for r-local density maxima.
// Points whose density is exactly zero (possible on very sparse graphs where
// nothing links back to them) get score 0 and are counted in zero_density.

struct FlowRankResult {
  std::vector<double> pi;     // input densities (copied through)
  std::vector<double> z;      // expected terminal density per point
  std::vector<double> score;  // pi / z, or 0 where pi is 0
  int zero_density = 0;       // how many points were scored 0 for zero pi
};

// z per point. rnn[i] lists the r nearest neighbors of i (any order); pi must
// be non-negative.
std::vector<double> rarw_expectation(const std::vector<double>& pi,
                                     const std::vector<std::vector<int>>& rnn);

// Convenience wrapper: computes the r-NN lists from x, then z and scores.
FlowRankResult flowrank(const Matrix& x, const std::vector<double>& pi, int r);

// As above when the caller already has neighbor lists.
FlowRankResult flowrank_from_rnn(const std::vector<double>& pi,
                                 const std::vector<std::vector<int>>& rnn);

// Layer partition: points ordered by (score desc, pi desc, index asc) and cut
// into ell blocks of near-equal size (the first n mod ell blocks get the
// extra element). Returns per-point layer ids 0..ell-1 plus the member lists
// and the full ranking.
struct LayerPartition {
  std::vector<int> layer;                 // per point
  std::vector<std::vector<int>> members;  // per layer, ascending index
  std::vector<int> order;                 // ranking, best first
  std::vector<int> position;              // inverse of order
};
LayerPartition partition_layers(const FlowRankResult& fr, int ell);

// Fraction of correctly ordered pairs among pairs of same-cluster points from
// different true layers (inner should rank above outer). 1.0 means the
// ranking is layer-preserving on this instance.
double layer_preservation_check(const std::vector<int>& position,
                                const std::vector<int>& true_layers,
                                const std::vector<int>& clusters);

}  // namespace corespect
