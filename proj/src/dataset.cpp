#include "corespect/dataset.hpp"

#include <algorithm>
#include <cerrno>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <fstream>
#include <map>
#include <sstream>

#include "corespect/errors.hpp"

namespace corespect {

namespace {

std::vector<std::string> split_line(const std::string& line) {
  std::vector<std::string> out;
  std::size_t start = 0;
  for (;;) {
    std::size_t pos = line.find(',', start);
    if (pos == std::string::npos) {
      out.push_back(line.substr(start));
      return out;
    }
    out.push_back(line.substr(start, pos - start));
    start = pos + 1;
  }
}

void strip_cr(std::string& s) {
  if (!s.empty() && s.back() == '\r') s.pop_back();
}

double parse_double(const std::string& cell, std::size_t row, std::size_t col) {
  const char* begin = cell.c_str();
  char* end = nullptr;
  errno = 0;
  double v = std::strtod(begin, &end);
  if (end == begin || *end != '\0' || errno == ERANGE) {
    throw data_error("csv: row " + std::to_string(row) + ", column " +
                     std::to_string(col + 1) + ": cannot parse '" + cell +
                     "' as a number");
  }
  return v;
}

int parse_label(const std::string& cell, std::size_t row, std::size_t col,
                const char* what) {
  double v = parse_double(cell, row, col);
  double r = std::nearbyint(v);
  if (std::fabs(v - r) > 1e-9 || r < -2147483648.0 || r > 2147483647.0) {
    throw data_error("csv: row " + std::to_string(row) + ": " + what +
                     " value '" + cell + "' is not an integer");
  }
  return static_cast<int>(r);
}

// Relabel arbitrary integers to 0..k-1 by sorted value order.
std::vector<int> canonicalize_labels(const std::vector<int>& raw) {
  std::vector<int> sorted = raw;
  std::sort(sorted.begin(), sorted.end());
  sorted.erase(std::unique(sorted.begin(), sorted.end()), sorted.end());
  std::map<int, int> remap;
  for (std::size_t i = 0; i < sorted.size(); ++i)
    remap[sorted[i]] = static_cast<int>(i);
  std::vector<int> out(raw.size());
  for (std::size_t i = 0; i < raw.size(); ++i) out[i] = remap[raw[i]];
  return out;
}

void print_double(std::string& buf, double v) {
  char tmp[40];
  std::snprintf(tmp, sizeof(tmp), "%.17g", v);
  buf += tmp;
}

}  // namespace

Dataset load_csv(const std::string& path, const std::string& label_column) {
  std::ifstream in(path);
  if (!in) throw data_error("cannot open '" + path + "' for reading");

  std::string line;
  if (!std::getline(in, line)) throw data_error("'" + path + "': empty file");
  strip_cr(line);
  std::vector<std::string> header = split_line(line);

  int label_col = -1, layer_col = -1;
  std::vector<int> feature_cols;
  Dataset ds;
  for (std::size_t c = 0; c < header.size(); ++c) {
    if (header[c] == label_column) {
      if (label_col >= 0)
        throw data_error("'" + path + "': duplicate label column");
      label_col = static_cast<int>(c);
    } else if (header[c] == "true_layer") {
      if (layer_col >= 0)
        throw data_error("'" + path + "': duplicate true_layer column");
      layer_col = static_cast<int>(c);
    } else {
      feature_cols.push_back(static_cast<int>(c));
      ds.feature_names.push_back(header[c]);
    }
  }
  if (feature_cols.empty())
    throw data_error("'" + path + "': no feature columns");
  // Asking for a specific label column that is not there is a caller mistake;
  // the default name is merely an offer, absent in plain feature files.
  if (label_col < 0 && label_column != "label")
    throw data_error("'" + path + "': label column '" + label_column +
                     "' not found");

  std::vector<double> values;
  std::vector<int> raw_labels, raw_layers;
  std::size_t row = 1;
  while (std::getline(in, line)) {
    ++row;
    strip_cr(line);
    if (line.empty()) continue;
    std::vector<std::string> cells = split_line(line);
    if (cells.size() != header.size()) {
      throw data_error("csv: row " + std::to_string(row) + ": expected " +
                       std::to_string(header.size()) + " columns, got " +
                       std::to_string(cells.size()));
    }
    for (int c : feature_cols)
      values.push_back(parse_double(cells[c], row, c));
    if (label_col >= 0)
      raw_labels.push_back(parse_label(cells[label_col], row, label_col, "label"));
    if (layer_col >= 0)
      raw_layers.push_back(
          parse_label(cells[layer_col], row, layer_col, "true_layer"));
  }

  const std::size_t d = feature_cols.size();
  const std::size_t n = values.size() / d;
  if (n == 0) throw data_error("'" + path + "': no data rows");

  ds.points.resize(n, d);
  std::memcpy(ds.points.data(), values.data(), values.size() * sizeof(double));
  if (label_col >= 0) ds.labels = canonicalize_labels(raw_labels);
  if (layer_col >= 0) ds.true_layers = raw_layers;
  return ds;
}

void save_csv(const Dataset& ds, const std::string& path) {
  const int n = ds.n(), d = ds.dim();
  if (ds.has_labels() && static_cast<int>(ds.labels.size()) != n)
    throw invariant_error("save_csv: label count does not match rows");
  if (ds.has_true_layers() && static_cast<int>(ds.true_layers.size()) != n)
    throw invariant_error("save_csv: true_layer count does not match rows");

  std::ofstream out(path);
  if (!out) throw data_error("cannot open '" + path + "' for writing");

  std::string buf;
  for (int c = 0; c < d; ++c) {
    if (c) buf += ',';
    if (c < static_cast<int>(ds.feature_names.size()) &&
        !ds.feature_names[c].empty()) {
      buf += ds.feature_names[c];
    } else {
      buf += "x" + std::to_string(c);
    }
  }
  if (ds.has_labels()) buf += ",label";
  if (ds.has_true_layers()) buf += ",true_layer";
  buf += '\n';

  for (int i = 0; i < n; ++i) {
    for (int c = 0; c < d; ++c) {
      if (c) buf += ',';
      print_double(buf, ds.points(i, c));
    }
    if (ds.has_labels()) {
      buf += ',';
      buf += std::to_string(ds.labels[i]);
    }
    if (ds.has_true_layers()) {
      buf += ',';
      buf += std::to_string(ds.true_layers[i]);
    }
    buf += '\n';
    if (buf.size() > (1u << 20)) {
      out << buf;
      buf.clear();
    }
  }
  out << buf;
  if (!out) throw data_error("write failed for '" + path + "'");
}

void save_labels_csv(const std::vector<int>& labels, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw data_error("cannot open '" + path + "' for writing");
  out << "index,label\n";
  for (std::size_t i = 0; i < labels.size(); ++i)
    out << i << ',' << labels[i] << '\n';
  if (!out) throw data_error("write failed for '" + path + "'");
}

std::vector<int> load_labels_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw data_error("cannot open '" + path + "' for reading");
  std::string line;
  if (!std::getline(in, line)) throw data_error("'" + path + "': empty file");
  strip_cr(line);
  if (split_line(line).size() != 2)
    throw data_error("'" + path + "': labels file must have two columns");
  std::vector<int> labels;
  std::size_t row = 1;
  while (std::getline(in, line)) {
    ++row;
    strip_cr(line);
    if (line.empty()) continue;
    std::vector<std::string> cells = split_line(line);
    if (cells.size() != 2)
      throw data_error("csv: row " + std::to_string(row) +
                       ": labels file must have two columns");
    int idx = parse_label(cells[0], row, 0, "index");
    if (idx != static_cast<int>(labels.size()))
      throw data_error("csv: row " + std::to_string(row) +
                       ": indices must be 0..n-1 in order");
    labels.push_back(parse_label(cells[1], row, 1, "label"));
  }
  if (labels.empty()) throw data_error("'" + path + "': no data rows");
  return labels;
}

void log_normalize(Matrix& x) {
  if ((x.array() < 0.0).any())
    throw data_error("log_normalize: negative entries present");
  x = (x.array() + 1.0).log().matrix();
}

namespace {

// Subspace iteration for the top m eigenpairs of a symmetric PSD matrix.
// Used when d is too large for a full dense eigendecomposition to be the
// obvious choice. Converges quickly here because covariance spectra of the
// data we care about decay fast.
void top_eigenpairs_subspace(const Eigen::MatrixXd& cov, int m,
                             Eigen::MatrixXd& vectors, Eigen::VectorXd& values) {
  const int d = static_cast<int>(cov.rows());
  // Deterministic start basis: columns of the identity plus a fixed
  // perturbation pattern so degenerate alignments cannot stall progress.
  Eigen::MatrixXd q = Eigen::MatrixXd::Zero(d, m);
  Rng rng(0x5eedbeefULL);
  for (int j = 0; j < m; ++j) {
    q(j % d, j) = 1.0;
    for (int i = 0; i < d; ++i) q(i, j) += 1e-3 * (rng.uniform() - 0.5);
  }

  const double tol = 1e-10;
  const int max_iter = 1000;
  Eigen::MatrixXd z;
  for (int iter = 0; iter < max_iter; ++iter) {
    z = cov * q;
    Eigen::HouseholderQR<Eigen::MatrixXd> qr(z);
    q = qr.householderQ() * Eigen::MatrixXd::Identity(d, m);
    // Rayleigh-Ritz on the current subspace.
    Eigen::MatrixXd small = q.transpose() * cov * q;
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(small);
    // Eigen returns ascending order; flip to descending.
    Eigen::VectorXd ev = es.eigenvalues().reverse();
    Eigen::MatrixXd rot = es.eigenvectors().rowwise().reverse();
    Eigen::MatrixXd v = q * rot;
    double worst = 0.0;
    for (int j = 0; j < m; ++j) {
      double r = (cov * v.col(j) - ev(j) * v.col(j)).norm();
      worst = std::max(worst, r / std::max(1.0, std::abs(ev(j))));
    }
    if (worst < tol || iter == max_iter - 1) {
      vectors = v;
      values = ev;
      return;
    }
    q = v;
  }
}

}  // namespace

Matrix pca_reduce(const Matrix& x, int m) {
  const int n = static_cast<int>(x.rows());
  const int d = static_cast<int>(x.cols());
  if (m < 1) throw config_error("pca_reduce: m must be at least 1");
  if (m > d)
    throw config_error("pca_reduce: m = " + std::to_string(m) +
                       " exceeds dimension " + std::to_string(d));
  if (n < 2) throw data_error("pca_reduce: need at least 2 points");

  Eigen::RowVectorXd mean = x.colwise().mean();
  Matrix centered = x.rowwise() - mean;
  Eigen::MatrixXd cov =
      (centered.transpose() * centered) / static_cast<double>(n - 1);

  Eigen::MatrixXd vectors;  // d x m, columns are components
  Eigen::VectorXd values;
  if (d <= 512) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(cov);
    vectors = es.eigenvectors().rowwise().reverse().leftCols(m);
    values = es.eigenvalues().reverse().head(m);
  } else {
    top_eigenpairs_subspace(cov, m, vectors, values);
  }

  // Sign convention: the entry of largest absolute value in each component
  // is non-negative (ties by lowest row index win).
  for (int j = 0; j < m; ++j) {
    int arg = 0;
    double best = -1.0;
    for (int i = 0; i < d; ++i) {
      double a = std::abs(vectors(i, j));
      if (a > best) {
        best = a;
        arg = i;
      }
    }
    if (vectors(arg, j) < 0.0) vectors.col(j) = -vectors.col(j);
  }

  return centered * vectors;
}

void add_gaussian_noise(Matrix& x, double sigma, Rng& rng) {
  if (sigma < 0.0) throw config_error("add_gaussian_noise: sigma must be >= 0");
  if (sigma == 0.0) return;  // bit-identical by contract
  for (Eigen::Index i = 0; i < x.rows(); ++i)
    for (Eigen::Index j = 0; j < x.cols(); ++j)
      x(i, j) += sigma * rng.normal();
}

MeanMaxDev mean_max_dev(const std::vector<double>& xs) {
  MeanMaxDev out;
  if (xs.empty()) return out;
  double sum = 0.0;
  for (double v : xs) sum += v;
  out.mean = sum / static_cast<double>(xs.size());
  for (double v : xs) out.max_dev = std::max(out.max_dev, std::fabs(v - out.mean));
  return out;
}

}  // namespace corespect
