#include <cmath>
#include <limits>
#include <string>

#include "corespect/corecluster.hpp"
#include "corespect/errors.hpp"
#include "corespect/parallel.hpp"

namespace corespect {

namespace {

struct Component {
  Eigen::LLT<Eigen::MatrixXd> chol;
  double log_norm = 0.0;  // log weight - 0.5 (d log 2pi + log det)
};

// log N(x | mu, Sigma) + log w per component, then a log-sum-exp across
// components gives the per-point likelihood and responsibilities.
void e_step(const Matrix& x, const Matrix& means,
            const std::vector<Component>& comps, Matrix& resp,
            double& mean_ll) {
  const int n = static_cast<int>(x.rows());
  const int k = static_cast<int>(means.rows());
  const std::size_t chunks = chunk_count(n);
  const std::size_t per = chunks ? (n + chunks - 1) / chunks : 0;
  std::vector<double> partial_ll(chunks, 0.0);

  parallel_for(n, [&](std::size_t b, std::size_t e) {
    double acc = 0.0;
    Eigen::VectorXd diff(x.cols()), solved(x.cols());
    std::vector<double> logp(k);
    for (std::size_t i = b; i < e; ++i) {
      double hi = -std::numeric_limits<double>::infinity();
      for (int c = 0; c < k; ++c) {
        diff = (x.row(i) - means.row(c)).transpose();
        solved = comps[c].chol.matrixL().solve(diff);
        logp[c] = comps[c].log_norm - 0.5 * solved.squaredNorm();
        hi = std::max(hi, logp[c]);
      }
      double sum = 0.0;
      for (int c = 0; c < k; ++c) sum += std::exp(logp[c] - hi);
      double lse = hi + std::log(sum);
      for (int c = 0; c < k; ++c) resp(i, c) = std::exp(logp[c] - lse);
      acc += lse;
    }
    partial_ll[b / per] = acc;
  });

  double total = 0.0;
  for (double v : partial_ll) total += v;
  mean_ll = total / static_cast<double>(n);
}

}  // namespace

GmmResult gmm_fit(const Matrix& x, const GmmParams& p, Rng& rng) {
  const int n = static_cast<int>(x.rows());
  const int d = static_cast<int>(x.cols());
  if (p.k < 1) throw config_error("gmm_fit: k must be at least 1");
  if (p.k > n)
    throw config_error("gmm_fit: k = " + std::to_string(p.k) +
                       " exceeds point count " + std::to_string(n));
  if (p.reg < 0.0) throw config_error("gmm_fit: reg must be >= 0");

  GmmResult g;
  g.means.resize(p.k, d);
  g.covariances.assign(p.k, Eigen::MatrixXd::Identity(d, d));
  g.weights.resize(p.k);
  g.responsibilities = Matrix::Zero(n, p.k);

  // Hard k-means assignments as the starting responsibilities. The init run
  // keeps the regular k-means restart budget; a single restart occasionally
  // hands EM a split it cannot recover from.
  KmeansParams kp;
  kp.k = p.k;
  Rng init_rng = rng.split("gmm-init");
  KmeansResult km = kmeans(x, kp, init_rng);
  for (int i = 0; i < n; ++i) g.responsibilities(i, km.labels[i]) = 1.0;

  std::vector<Component> comps(p.k);
  double prev_ll = -std::numeric_limits<double>::infinity();

  int iter = 0;
  for (; iter < p.max_iter; ++iter) {
    // M-step. Column sums and moment accumulations run over fixed chunks
    // combined in order (same determinism story as k-means).
    const std::size_t chunks = chunk_count(n);
    const std::size_t per = chunks ? (n + chunks - 1) / chunks : 0;
    struct Moments {
      Eigen::VectorXd nk;
      Matrix mean_sum;
      std::vector<Eigen::MatrixXd> second;
      bool used = false;
    };
    std::vector<Moments> parts(chunks);
    parallel_for(n, [&](std::size_t b, std::size_t e) {
      Moments& m = parts[b / per];
      m.nk = Eigen::VectorXd::Zero(p.k);
      m.mean_sum = Matrix::Zero(p.k, d);
      m.second.assign(p.k, Eigen::MatrixXd::Zero(d, d));
      m.used = true;
      for (std::size_t i = b; i < e; ++i) {
        for (int c = 0; c < p.k; ++c) {
          const double r = g.responsibilities(i, c);
          if (r == 0.0) continue;
          m.nk(c) += r;
          m.mean_sum.row(c) += r * x.row(i);
          m.second[c].noalias() +=
              r * (x.row(i).transpose() * x.row(i));
        }
      }
    });
    Eigen::VectorXd nk = Eigen::VectorXd::Zero(p.k);
    Matrix mean_sum = Matrix::Zero(p.k, d);
    std::vector<Eigen::MatrixXd> second(p.k, Eigen::MatrixXd::Zero(d, d));
    for (const auto& m : parts) {
      if (!m.used) continue;
      nk += m.nk;
      mean_sum += m.mean_sum;
      for (int c = 0; c < p.k; ++c) second[c] += m.second[c];
    }

    for (int c = 0; c < p.k; ++c) {
      double denom = std::max(nk(c), 1e-300);
      g.weights(c) = nk(c) / static_cast<double>(n);
      g.means.row(c) = mean_sum.row(c) / denom;
      Eigen::MatrixXd cov =
          second[c] / denom -
          g.means.row(c).transpose() * g.means.row(c);
      cov = 0.5 * (cov + cov.transpose());  // symmetrize rounding residue
      double ridge = p.reg;
      for (int attempt = 0; attempt < 4; ++attempt) {
        g.covariances[c] =
            cov + ridge * Eigen::MatrixXd::Identity(d, d);
        comps[c].chol.compute(g.covariances[c]);
        if (comps[c].chol.info() == Eigen::Success) break;
        ridge *= 100.0;
        g.degenerate = true;
      }
      if (comps[c].chol.info() != Eigen::Success)
        throw invariant_error("gmm_fit: covariance not positive definite "
                              "even after regularization");
      const Eigen::MatrixXd& llt_packed = comps[c].chol.matrixLLT();
      double log_det = 0.0;
      for (int i = 0; i < d; ++i)
        log_det += 2.0 * std::log(llt_packed(i, i));
      double w = std::max(g.weights(c), 1e-300);
      comps[c].log_norm =
          std::log(w) - 0.5 * (d * std::log(2.0 * M_PI) + log_det);
    }

    double ll = 0.0;
    e_step(x, g.means, comps, g.responsibilities, ll);
    g.ll_history.push_back(ll);
    if (iter > 0 && std::fabs(ll - prev_ll) < p.tol) {
      prev_ll = ll;
      ++iter;
      break;
    }
    prev_ll = ll;
  }

  g.iterations = iter;
  g.mean_log_likelihood = prev_ll;
  g.labels.resize(n);
  for (int i = 0; i < n; ++i) {
    int arg = 0;
    for (int c = 1; c < p.k; ++c)
      if (g.responsibilities(i, c) > g.responsibilities(i, arg)) arg = c;
    g.labels[i] = arg;
  }
  return g;
}

Matrix gmm_membership(const Matrix& x, const GmmResult& g) {
  const int n = static_cast<int>(x.rows());
  if (n != static_cast<int>(g.responsibilities.rows()))
    throw config_error("gmm_membership: model was fit on different data");
  (void)x;
  return -g.responsibilities;
}

}  // namespace corespect
