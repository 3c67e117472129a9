#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "corespect/corecluster.hpp"
#include "corespect/errors.hpp"
#include "corespect/parallel.hpp"

namespace corespect {

namespace {

// Assignment decisions are canonically made on the exact per-pair squared
// distance. The gram-matrix fast path only shortlists candidates; anything
// within a rounding margin of the best gets re-measured exactly, so the
// outcome is the one a naive scan would produce.
void assign_labels(const Matrix& x, const Matrix& centers,
                   std::vector<int>& labels) {
  const int n = static_cast<int>(x.rows());
  const int k = static_cast<int>(centers.rows());
  Vector csq(k);
  for (int c = 0; c < k; ++c) csq(c) = centers.row(c).squaredNorm();
  const double csq_max = csq.maxCoeff();
  labels.resize(n);

  parallel_for(n, [&](std::size_t b, std::size_t e) {
    const int nb = static_cast<int>(e - b);
    Matrix g = x.middleRows(b, nb) * centers.transpose();  // nb x k
    for (int i = 0; i < nb; ++i) {
      const int gi = static_cast<int>(b) + i;
      // score = |c|^2 - 2 x.c ranks centers like the true distance
      double best = std::numeric_limits<double>::infinity();
      for (int c = 0; c < k; ++c)
        best = std::min(best, csq(c) - 2.0 * g(i, c));
      const double margin =
          1e-10 * (1.0 + x.row(gi).squaredNorm() + csq_max);
      int arg = -1;
      double arg_d2 = std::numeric_limits<double>::infinity();
      for (int c = 0; c < k; ++c) {
        if (csq(c) - 2.0 * g(i, c) > best + margin) continue;
        double d2 = (x.row(gi) - centers.row(c)).squaredNorm();
        if (d2 < arg_d2) {
          arg_d2 = d2;
          arg = c;
        }
      }
      labels[gi] = arg;
    }
  });
}

struct MeanAccum {
  Matrix sums;
  std::vector<std::int64_t> counts;
};

// Per-label means with fixed-chunk ordered combination (thread count never
// changes the sums).
MeanAccum label_sums(const Matrix& x, const std::vector<int>& labels, int k) {
  const std::size_t n = x.rows();
  const std::size_t chunks = chunk_count(n);
  const std::size_t per = chunks ? (n + chunks - 1) / chunks : 0;
  std::vector<MeanAccum> parts(chunks);
  parallel_for(n, [&](std::size_t b, std::size_t e) {
    MeanAccum& a = parts[b / per];
    a.sums = Matrix::Zero(k, x.cols());
    a.counts.assign(k, 0);
    for (std::size_t i = b; i < e; ++i) {
      a.sums.row(labels[i]) += x.row(i);
      a.counts[labels[i]]++;
    }
  });
  MeanAccum total;
  total.sums = Matrix::Zero(k, x.cols());
  total.counts.assign(k, 0);
  for (const auto& a : parts) {
    if (a.counts.empty()) continue;
    total.sums += a.sums;
    for (int c = 0; c < k; ++c) total.counts[c] += a.counts[c];
  }
  return total;
}

double exact_objective(const Matrix& x, const Matrix& centers,
                       const std::vector<int>& labels) {
  const std::size_t n = x.rows();
  return parallel_map_reduce<double>(
      n, 0.0,
      [&](std::size_t b, std::size_t e) {
        double acc = 0.0;
        for (std::size_t i = b; i < e; ++i)
          acc += (x.row(i) - centers.row(labels[i])).squaredNorm();
        return acc;
      },
      [](double a, double b2) { return a + b2; });
}

// Re-seed each empty cluster at the point farthest from its assigned center.
// Clusters are handled in ascending index order; a point is used at most once
// per round; ties go to the lowest point index.
void repair_empty_clusters(const Matrix& x, Matrix& centers,
                           std::vector<int>& labels,
                           const std::vector<std::int64_t>& counts) {
  const int n = static_cast<int>(x.rows());
  const int k = static_cast<int>(centers.rows());
  std::vector<char> taken(n, 0);
  for (int c = 0; c < k; ++c) {
    if (counts[c] != 0) continue;
    int far = -1;
    double far_d2 = -1.0;
    for (int i = 0; i < n; ++i) {
      if (taken[i]) continue;
      double d2 = (x.row(i) - centers.row(labels[i])).squaredNorm();
      if (d2 > far_d2) {
        far_d2 = d2;
        far = i;
      }
    }
    if (far < 0) break;  // fewer distinct points than clusters
    centers.row(c) = x.row(far);
    labels[far] = c;
    taken[far] = 1;
  }
}

KmeansResult lloyd_run(const Matrix& x, int k, int max_iter, double tol,
                       Rng& rng) {
  KmeansResult out;
  out.centers = kmeans_pp_init(x, k, rng);
  const int n = static_cast<int>(x.rows());

  std::vector<int> labels(n);
  int iter = 0;
  for (; iter < max_iter; ++iter) {
    assign_labels(x, out.centers, labels);
    MeanAccum acc = label_sums(x, labels, k);
    Matrix next = out.centers;
    for (int c = 0; c < k; ++c) {
      if (acc.counts[c] > 0)
        next.row(c) = acc.sums.row(c) / static_cast<double>(acc.counts[c]);
    }
    repair_empty_clusters(x, next, labels, acc.counts);
    double shift = 0.0;
    for (int c = 0; c < k; ++c)
      shift = std::max(shift, (next.row(c) - out.centers.row(c)).norm());
    out.centers = next;
    if (shift < tol) {
      ++iter;
      break;
    }
  }
  assign_labels(x, out.centers, labels);
  out.labels = std::move(labels);
  out.objective = exact_objective(x, out.centers, out.labels);
  out.iterations = iter;
  return out;
}

}  // namespace

Matrix kmeans_pp_init(const Matrix& x, int k, Rng& rng) {
  const int n = static_cast<int>(x.rows());
  if (k < 1) throw config_error("kmeans: k must be at least 1");
  if (k > n)
    throw config_error("kmeans: k = " + std::to_string(k) +
                       " exceeds point count " + std::to_string(n));

  Matrix centers(k, x.cols());
  std::vector<char> chosen(n, 0);
  std::vector<double> d2(n, std::numeric_limits<double>::infinity());

  int first = static_cast<int>(rng.uniform_int(n));
  centers.row(0) = x.row(first);
  chosen[first] = 1;

  for (int c = 1; c < k; ++c) {
    double total = 0.0;
    for (int i = 0; i < n; ++i) {
      double nd = (x.row(i) - centers.row(c - 1)).squaredNorm();
      if (nd < d2[i]) d2[i] = nd;
      total += d2[i];
    }
    int pick = -1;
    if (total > 0.0) {
      double u = rng.uniform() * total;
      double run = 0.0;
      for (int i = 0; i < n; ++i) {
        run += d2[i];
        if (run >= u) {
          pick = i;
          break;
        }
      }
      if (pick < 0) {  // rounding spill: take the last nonzero-mass point
        for (int i = n - 1; i >= 0; --i)
          if (d2[i] > 0.0) {
            pick = i;
            break;
          }
      }
    }
    if (pick < 0) {
      // All remaining mass is zero (duplicates of chosen centers); take the
      // lowest unchosen index so k == n degenerates to a permutation.
      for (int i = 0; i < n; ++i)
        if (!chosen[i]) {
          pick = i;
          break;
        }
    }
    centers.row(c) = x.row(pick);
    chosen[pick] = 1;
  }
  return centers;
}

KmeansResult kmeans(const Matrix& x, const KmeansParams& p, Rng& rng) {
  if (p.n_init < 1) throw config_error("kmeans: n_init must be at least 1");
  if (p.max_iter < 1) throw config_error("kmeans: max_iter must be at least 1");
  if (p.tol < 0.0) throw config_error("kmeans: tol must be >= 0");

  KmeansResult best;
  bool have = false;
  for (int rep = 0; rep < p.n_init; ++rep) {
    KmeansResult run = lloyd_run(x, p.k, p.max_iter, p.tol, rng);
    if (!have || run.objective < best.objective) {
      best = std::move(run);
      have = true;
    }
  }
  return best;
}

KmeansResult kmeans_oneshot_restarts(const Matrix& x, int k, Rng& rng) {
  const int n = static_cast<int>(x.rows());
  if (k < 1) throw config_error("kmeans: k must be at least 1");
  if (k > n)
    throw config_error("kmeans: k = " + std::to_string(k) +
                       " exceeds point count " + std::to_string(n));
  const int restarts = std::max(
      1, 2 * static_cast<int>(std::ceil(std::log(static_cast<double>(n)))));

  KmeansResult best;
  bool have = false;
  for (int rep = 0; rep < restarts; ++rep) {
    Matrix init = kmeans_pp_init(x, k, rng);
    std::vector<int> labels;
    assign_labels(x, init, labels);  // the one assignment step
    MeanAccum acc = label_sums(x, labels, k);
    Matrix centers = init;
    for (int c = 0; c < k; ++c) {   // the one update step
      if (acc.counts[c] > 0)
        centers.row(c) = acc.sums.row(c) / static_cast<double>(acc.counts[c]);
    }
    double obj = exact_objective(x, centers, labels);
    if (!have || obj < best.objective) {
      best.centers = std::move(centers);
      best.labels = std::move(labels);
      best.objective = obj;
      best.iterations = 1;
      have = true;
    }
  }
  return best;
}

double kmeans_objective(const Matrix& x, const std::vector<int>& labels) {
  const int n = static_cast<int>(x.rows());
  if (static_cast<int>(labels.size()) != n)
    throw config_error("kmeans_objective: label count does not match rows");
  int k = 0;
  for (int l : labels) {
    if (l < 0) throw config_error("kmeans_objective: negative label");
    k = std::max(k, l + 1);
  }
  MeanAccum acc = label_sums(x, labels, k);
  Matrix centers = Matrix::Zero(k, x.cols());
  for (int c = 0; c < k; ++c)
    if (acc.counts[c] > 0)
      centers.row(c) = acc.sums.row(c) / static_cast<double>(acc.counts[c]);
  return exact_objective(x, centers, labels);
}

Matrix kmeans_membership(const Matrix& x, const Matrix& centers) {
  const int n = static_cast<int>(x.rows());
  const int k = static_cast<int>(centers.rows());
  Matrix m(n, k);
  parallel_for(n, [&](std::size_t b, std::size_t e) {
    for (std::size_t i = b; i < e; ++i)
      for (int c = 0; c < k; ++c)
        m(i, c) = (x.row(i) - centers.row(c)).norm();
  });
  return m;
}

}  // namespace corespect
