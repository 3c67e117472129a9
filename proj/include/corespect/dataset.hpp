#pragma once

#include <optional>
#include <string>
#include <vector>

#include "corespect/linalg.hpp"
#include "corespect/rng.hpp"

namespace corespect {

// In-memory dataset: an n x d point matrix plus optional per-row metadata.
// Metadata columns in CSV files are recognized by name ("label",
// "true_layer"); everything else is a feature.
struct Dataset {
  Matrix points;
  std::vector<int> labels;       // empty when absent
  std::vector<int> true_layers;  // empty when absent (synthetic data only)
  std::vector<std::string> feature_names;

  int n() const { return static_cast<int>(points.rows()); }
  int dim() const { return static_cast<int>(points.cols()); }
  bool has_labels() const { return !labels.empty(); }
  bool has_true_layers() const { return !true_layers.empty(); }
};

// CSV with a header row, comma separated, no quoting. Columns named
// `label_column` or "true_layer" become metadata; label values must be
// integers (relabeled to 0..k-1 by sorted value order). Throws data_error on
// malformed input with row/column context in the message.
Dataset load_csv(const std::string& path,
                 const std::string& label_column = "label");

// Writes header + rows; doubles printed at 17 significant digits so that
// load(save(x)) round-trips bit-identically for finite values.
void save_csv(const Dataset& ds, const std::string& path);

// Labels files are two-column CSVs: index,label with indices 0..n-1 in order.
void save_labels_csv(const std::vector<int>& labels, const std::string& path);
std::vector<int> load_labels_csv(const std::string& path);

// ln(1 + x) elementwise; throws data_error on negative entries.
void log_normalize(Matrix& x);

// Projects onto the top m principal components (centered data). Components
// are ordered by decreasing eigenvalue; each component's entry of largest
// absolute value is made non-negative so the projection is sign-stable.
// Eigendecomposition of the d x d covariance when d <= 512, block subspace
// iteration above that (residual tolerance 1e-10).
Matrix pca_reduce(const Matrix& x, int m);

// Adds an independent N(0, sigma^2) draw to every coordinate. sigma = 0
// leaves the matrix bit-identical. sigma < 0 is a config error.
void add_gaussian_noise(Matrix& x, double sigma, Rng& rng);

// Repetition summary convention used in all reports: mean plus the maximum
// absolute deviation from that mean.
struct MeanMaxDev {
  double mean = 0.0;
  double max_dev = 0.0;
};
MeanMaxDev mean_max_dev(const std::vector<double>& xs);

}  // namespace corespect
