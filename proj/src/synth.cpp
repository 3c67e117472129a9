#include "corespect/synth.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "corespect/errors.hpp"

namespace corespect {

namespace {

constexpr double kPi = 3.14159265358979323846;
// Centers are spaced 2% wider than the separation bound strictly requires,
// so sampled cores always satisfy mu with room to spare.
constexpr double kSpacingMargin = 1.02;
constexpr int kRejectionCap = 100;  // oversample factor per point

void validate_common(const LcpdmParams& p, const char* fn) {
  auto fail = [&](const std::string& msg) { throw config_error(std::string(fn) + ": " + msg); };
  if (p.k < 2) fail("k must be at least 2");
  if (p.ell < 2) fail("ell must be at least 2");
  if (p.dim < 2) fail("dim must be at least 2");
  if (!(p.rho0 > 0.0)) fail("rho0 must be positive");
  if (!(p.width > 0.0)) fail("width must be positive");
  if (!(p.ratio > 1.0)) fail("ratio (density decay C) must exceed 1");
  if (!(p.mu > 0.0 && p.mu < 0.5)) fail("mu must lie in (0, 0.5)");
  if (!(p.align > 0.0 && p.align < 1.0)) fail("align must lie in (0, 1)");
  if (p.n_core < 1) fail("n_core must be at least 1");
  if (!p.core_sizes.empty()) {
    if (static_cast<int>(p.core_sizes.size()) != p.k)
      fail("core_sizes must have one entry per cluster");
    for (int s : p.core_sizes)
      if (s < 1) fail("core_sizes entries must be at least 1");
  }
}

int core_size_of(const LcpdmParams& p, int cluster) {
  return p.core_sizes.empty() ? p.n_core : p.core_sizes[cluster];
}

double center_spacing(const LcpdmParams& p) {
  // max intra-core <= 2 rho0 and min inter-core >= D - 2 rho0, so D =
  // 2 rho0 (1 + 1/mu) guarantees the measured ratio stays at or under mu.
  return 2.0 * p.rho0 * (1.0 + 1.0 / p.mu) * kSpacingMargin;
}

struct Pt {
  double x, y;
};

double sq(double v) { return v * v; }

double min_sq_dist(const Pt& p, const std::vector<Pt>& pts) {
  double best = std::numeric_limits<double>::infinity();
  for (const Pt& q : pts) best = std::min(best, sq(p.x - q.x) + sq(p.y - q.y));
  return best;
}

int count_for_layer(const LcpdmParams& p, int n_core_i, double area_j,
                    double area_core, int j) {
  double raw = n_core_i * area_j / (std::pow(p.ratio, j) * area_core);
  int n = static_cast<int>(std::llround(raw));
  return std::max(1, n);
}

// Shared sampling loop: regions are supplied as closures, alignment is
// enforced at draw time against the already-sampled inner layers.
struct BuildState {
  std::vector<std::vector<std::vector<Pt>>> pts;  // [cluster][layer]
  double measured_align = 0.0;
};

template <typename DrawFn>
void sample_layer(BuildState& st, const LcpdmParams& p, int cluster, int layer,
                  int count, Rng& rng, DrawFn draw) {
  auto& out = st.pts[cluster][layer];
  out.reserve(count);
  for (int m = 0; m < count; ++m) {
    bool ok = false;
    for (int attempt = 0; attempt < kRejectionCap; ++attempt) {
      Pt cand = draw(rng);
      if (layer == 0) {
        out.push_back(cand);
        ok = true;
        break;
      }
      double d_own = std::sqrt(min_sq_dist(cand, st.pts[cluster][layer - 1]));
      double d_other = std::numeric_limits<double>::infinity();
      for (int c = 0; c < p.k; ++c) {
        if (c == cluster) continue;
        d_other = std::min(
            d_other, std::sqrt(min_sq_dist(cand, st.pts[c][layer - 1])));
      }
      double ratio = d_own / d_other;
      if (ratio <= p.align) {
        st.measured_align = std::max(st.measured_align, ratio);
        out.push_back(cand);
        ok = true;
        break;
      }
    }
    if (!ok)
      throw data_error(
          "synth: alignment rejection cap exceeded at cluster " +
          std::to_string(cluster) + ", layer " + std::to_string(layer) +
          "; the configured geometry cannot satisfy align = " +
          std::to_string(p.align));
  }
}

SynthDataset assemble(const LcpdmParams& p, BuildState& st,
                      const std::vector<int>& counts_one_cluster,
                      const std::vector<Pt>& centers) {
  int total = 0;
  for (int c = 0; c < p.k; ++c)
    for (int j = 0; j < p.ell; ++j) total += static_cast<int>(st.pts[c][j].size());

  SynthDataset ds;
  ds.points = Matrix::Zero(total, p.dim);
  ds.labels.reserve(total);
  ds.true_layers.reserve(total);
  int row = 0;
  for (int c = 0; c < p.k; ++c) {
    for (int j = 0; j < p.ell; ++j) {
      for (const Pt& pt : st.pts[c][j]) {
        ds.points(row, 0) = pt.x;
        ds.points(row, 1) = pt.y;
        ds.labels.push_back(c);
        ds.true_layers.push_back(j);
        ++row;
      }
    }
  }
  ds.per_layer_counts = counts_one_cluster;
  ds.centers = Matrix::Zero(p.k, p.dim);
  for (int c = 0; c < p.k; ++c) {
    ds.centers(c, 0) = centers[c].x;
    ds.centers(c, 1) = centers[c].y;
  }
  ds.measured_align = st.measured_align;

  // Measured separation over the sampled cores.
  double max_intra2 = 0.0;
  double min_inter2 = std::numeric_limits<double>::infinity();
  for (int a = 0; a < p.k; ++a) {
    const auto& ca = st.pts[a][0];
    for (std::size_t i = 0; i < ca.size(); ++i)
      for (std::size_t l = i + 1; l < ca.size(); ++l)
        max_intra2 =
            std::max(max_intra2, sq(ca[i].x - ca[l].x) + sq(ca[i].y - ca[l].y));
    for (int b = a + 1; b < p.k; ++b) {
      for (const Pt& u : ca)
        min_inter2 = std::min(min_inter2, min_sq_dist(u, st.pts[b][0]));
    }
  }
  ds.measured_mu = std::sqrt(max_intra2) / std::sqrt(min_inter2);
  if (ds.measured_mu > p.mu)
    throw invariant_error("synth: measured separation " +
                          std::to_string(ds.measured_mu) +
                          " exceeds configured mu");
  return ds;
}

std::vector<Pt> cluster_centers(const LcpdmParams& p) {
  const double d_min = center_spacing(p);
  std::vector<Pt> centers(p.k);
  if (p.k == 2) {
    centers[0] = {-0.5 * d_min, 0.0};
    centers[1] = {+0.5 * d_min, 0.0};
  } else {
    // Regular k-gon with chord length d_min between adjacent centers.
    const double radius = d_min / (2.0 * std::sin(kPi / p.k));
    for (int c = 0; c < p.k; ++c) {
      double ang = 2.0 * kPi * c / p.k;
      centers[c] = {radius * std::cos(ang), radius * std::sin(ang)};
    }
  }
  return centers;
}

}  // namespace

Dataset SynthDataset::to_dataset() const {
  Dataset d;
  d.points = points;
  d.labels = labels;
  d.true_layers = true_layers;
  for (int c = 0; c < points.cols(); ++c)
    d.feature_names.push_back("x" + std::to_string(c));
  return d;
}

std::vector<int> lcpdm_layer_counts(const LcpdmParams& p) {
  validate_common(p, "lcpdm_layer_counts");
  const double area_core = kPi * sq(p.rho0);
  std::vector<int> counts(p.ell);
  counts[0] = p.n_core;
  for (int j = 1; j < p.ell; ++j) {
    double r_in = p.rho0 + (j - 1) * p.width;
    double r_out = p.rho0 + j * p.width;
    double area = kPi * (sq(r_out) - sq(r_in));
    counts[j] = count_for_layer(p, p.n_core, area, area_core, j);
  }
  return counts;
}

SynthDataset gen_separable(const LcpdmParams& p) {
  validate_common(p, "gen_separable");
  const double d_min = center_spacing(p);

  // Analytic feasibility: facing rims of adjacent layers across clusters must
  // stay far enough apart for alignment to be satisfiable with margin.
  for (int j = 1; j < p.ell; ++j) {
    double r_j = p.rho0 + j * p.width;
    double r_prev = p.rho0 + (j - 1) * p.width;
    double gap = d_min - r_j - r_prev;
    if (!(p.width <= 0.5 * p.align * gap))
      throw config_error(
          "gen_separable: layer " + std::to_string(j) +
          " is too close to the neighboring cluster for align = " +
          std::to_string(p.align) +
          "; reduce ell or width, or lower mu for wider spacing");
  }

  std::vector<Pt> centers = cluster_centers(p);
  const double area_core = kPi * sq(p.rho0);

  // Per-cluster counts (clusters may have different core sizes).
  std::vector<std::vector<int>> counts(p.k, std::vector<int>(p.ell));
  for (int c = 0; c < p.k; ++c) {
    counts[c][0] = core_size_of(p, c);
    for (int j = 1; j < p.ell; ++j) {
      double r_in = p.rho0 + (j - 1) * p.width;
      double r_out = p.rho0 + j * p.width;
      double area = kPi * (sq(r_out) - sq(r_in));
      counts[c][j] = count_for_layer(p, counts[c][0], area, area_core, j);
    }
  }

  Rng root(p.seed);
  BuildState st;
  st.pts.assign(p.k, std::vector<std::vector<Pt>>(p.ell));
  for (int j = 0; j < p.ell; ++j) {
    for (int c = 0; c < p.k; ++c) {
      Rng rng = root.split("synth-layer",
                           static_cast<std::uint64_t>(c) * p.ell + j);
      const Pt ctr = centers[c];
      int count = counts[c][j];
      if (j == 0) {
        sample_layer(st, p, c, j, count, rng, [&](Rng& r) {
          double rad = p.rho0 * std::sqrt(r.uniform());
          double ang = 2.0 * kPi * r.uniform();
          return Pt{ctr.x + rad * std::cos(ang), ctr.y + rad * std::sin(ang)};
        });
      } else {
        double r_in = p.rho0 + (j - 1) * p.width;
        double r_out = p.rho0 + j * p.width;
        sample_layer(st, p, c, j, count, rng, [&](Rng& r) {
          double rad = std::sqrt(sq(r_in) + r.uniform() * (sq(r_out) - sq(r_in)));
          double ang = 2.0 * kPi * r.uniform();
          return Pt{ctr.x + rad * std::cos(ang), ctr.y + rad * std::sin(ang)};
        });
      }
    }
  }
  return assemble(p, st, counts[0], centers);
}

SynthDataset gen_entangled(const LcpdmParams& p) {
  validate_common(p, "gen_entangled");
  if (p.k != 2) throw config_error("gen_entangled: requires exactly k = 2");
  if (p.tail_curl < 0.0 || p.tail_curl > 0.95)
    throw config_error("gen_entangled: tail_curl must lie in [0, 0.95]");
  if (p.tail_curl == 0.0) {
    // Degenerates to the concentric family by definition.
    return gen_separable(p);
  }
  if (p.ell < 2)
    throw config_error("gen_entangled: ell must be at least 2 for tails");

  const double a = 0.5 * center_spacing(p);  // guide circle radius
  const double phi_start = p.rho0 / a;       // tails begin at the core rim
  const double phi_max = p.tail_curl * kPi;
  if (!(phi_max > phi_start + 1e-6))
    throw config_error("gen_entangled: tail_curl too small for this rho0/mu "
                       "(tails would start beyond their end)");
  // The tail tip rides the guide circle, so its gap to the opposite core
  // center is the chord spanned by the leftover angle. Band material (half a
  // width past the tip) must stay out of the opposite core disk.
  const double end_clearance = 2.0 * a * std::sin(0.5 * (kPi - phi_max));
  if (!(end_clearance - 0.5 * p.width > 1.02 * p.rho0))
    throw config_error("gen_entangled: tail_curl too large; tails reach the "
                       "opposite cluster's core region");

  const double band_w = (phi_max - phi_start) / (p.ell - 1);
  const double area_core = kPi * sq(p.rho0);
  std::vector<std::vector<int>> counts(p.k, std::vector<int>(p.ell));
  for (int c = 0; c < p.k; ++c) {
    counts[c][0] = core_size_of(p, c);
    for (int j = 1; j < p.ell; ++j) {
      double area = band_w * a * p.width;  // arc length x band thickness
      counts[c][j] = count_for_layer(p, counts[c][0], area, area_core, j);
    }
  }

  // Arm 0 sweeps the upper half plane from (-a, 0); arm 1 is its point
  // reflection, sweeping the lower half from (+a, 0).
  auto arm_point = [&](int cluster, double phi, double off) {
    double ang = kPi - phi;
    double rad = a + off;
    Pt pt{rad * std::cos(ang), rad * std::sin(ang)};
    if (cluster == 1) {
      pt.x = -pt.x;
      pt.y = -pt.y;
    }
    return pt;
  };

  Rng root(p.seed);
  BuildState st;
  st.pts.assign(p.k, std::vector<std::vector<Pt>>(p.ell));
  for (int j = 0; j < p.ell; ++j) {
    for (int c = 0; c < p.k; ++c) {
      Rng rng = root.split("synth-layer",
                           static_cast<std::uint64_t>(c) * p.ell + j);
      if (j == 0) {
        const Pt ctr = arm_point(c, 0.0, 0.0);
        sample_layer(st, p, c, j, counts[c][j], rng, [&](Rng& r) {
          double rad = p.rho0 * std::sqrt(r.uniform());
          double ang = 2.0 * kPi * r.uniform();
          return Pt{ctr.x + rad * std::cos(ang), ctr.y + rad * std::sin(ang)};
        });
      } else {
        double lo = phi_start + (j - 1) * band_w;
        double hi = lo + band_w;
        // Arm density decays continuously: within each band phi follows a
        // truncated exponential whose rate makes consecutive band averages
        // differ by exactly the configured ratio. A piecewise-flat profile
        // would leave sparse plateaus whose estimated-density noise peaks
        // masquerade as cores.
        double beta = std::log(p.ratio) / band_w;
        double tail_mass = 1.0 - std::exp(-beta * (hi - lo));
        sample_layer(st, p, c, j, counts[c][j], rng, [&](Rng& r) {
          double phi = lo - std::log(1.0 - r.uniform() * tail_mass) / beta;
          double off = r.uniform(-0.5 * p.width, 0.5 * p.width);
          return arm_point(c, phi, off);
        });
      }
    }
  }
  return assemble(p, st, counts[0],
                  {arm_point(0, 0.0, 0.0), arm_point(1, 0.0, 0.0)});
}

}  // namespace corespect
