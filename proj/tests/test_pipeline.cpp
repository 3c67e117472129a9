#include <doctest.h>

#include <algorithm>
#include <cstdlib>
#include <string>
#include <vector>

#include "corespect/errors.hpp"
#include "corespect/metrics.hpp"
#include "corespect/pipeline.hpp"
#include "corespect/synth.hpp"

namespace cs = corespect;

namespace {

cs::SynthDataset small_separable(std::uint64_t seed) {
  cs::LcpdmParams p;
  p.k = 2;
  p.ell = 3;
  p.dim = 2;
  p.width = 0.5;
  p.ratio = 2.0;
  p.n_core = 200;
  p.seed = seed;
  return cs::gen_separable(p);
}

cs::CorespectParams small_params() {
  cs::CorespectParams p;
  p.k = 2;
  p.q = 20;
  p.r = 10;
  p.t = 10;
  p.ell = 10;
  p.seed = 1;
  return p;
}

struct EnvGuard {
  std::string name;
  std::string old_value;
  bool had = false;
  explicit EnvGuard(const char* n) : name(n) {
    const char* v = std::getenv(n);
    if (v) {
      had = true;
      old_value = v;
    }
  }
  ~EnvGuard() {
    if (had)
      setenv(name.c_str(), old_value.c_str(), 1);
    else
      unsetenv(name.c_str());
  }
};

}  // namespace

TEST_CASE("corespect: ell = 1 reduces to the plain algorithm bit for bit") {
  cs::SynthDataset ds = small_separable(3);
  cs::CorespectParams p = small_params();
  p.ell = 1;

  SUBCASE("kmeans") {
    cs::CorespectResult r = cs::corespect(ds.points, p);
    cs::KmeansResult plain = cs::plain_kmeans(ds.points, p.k, p.seed);
    CHECK(r.labels == plain.labels);
    CHECK(r.core_objective == plain.objective);
    CHECK(r.core_size == static_cast<int>(ds.points.rows()));
    CHECK(r.cdnn_edges == 0);
    CHECK(r.work_count == 0);
  }
  SUBCASE("gmm") {
    p.algo = cs::CoreAlgo::gmm;
    cs::CorespectResult r = cs::corespect(ds.points, p);
    cs::GmmResult plain = cs::plain_gmm(ds.points, p.k, p.seed);
    CHECK(r.labels == plain.labels);
    CHECK(r.gmm_degenerate == plain.degenerate);
  }
  SUBCASE("oneshot") {
    p.variant = cs::CoreVariant::oneshot;
    cs::CorespectResult r = cs::corespect(ds.points, p);
    cs::Rng rng = cs::Rng(p.seed).split("core");
    cs::KmeansResult plain =
        cs::kmeans_oneshot_restarts(ds.points, p.k, rng);
    CHECK(r.labels == plain.labels);
  }
}

TEST_CASE("corespect: t does not touch the core clustering") {
  cs::SynthDataset ds = small_separable(5);
  cs::CorespectParams p = small_params();
  cs::CorespectResult a = cs::corespect(ds.points, p);
  p.t = 3;
  cs::CorespectResult b = cs::corespect(ds.points, p);
  REQUIRE(a.layer_members[0] == b.layer_members[0]);
  for (int u : a.layer_members[0]) CHECK(a.labels[u] == b.labels[u]);
}

TEST_CASE("corespect: pi and layer overrides reproduce the original run") {
  cs::SynthDataset ds = small_separable(7);
  cs::CorespectParams p = small_params();
  cs::CorespectResult base = cs::corespect(ds.points, p);

  cs::CorespectParams with_pi = p;
  with_pi.pi_override = base.pi;
  cs::CorespectResult r1 = cs::corespect(ds.points, with_pi);
  CHECK(r1.labels == base.labels);
  CHECK(r1.score == base.score);
  CHECK(r1.layer == base.layer);

  cs::CorespectParams with_layers = p;
  with_layers.layer_override = base.layer;
  cs::CorespectResult r2 = cs::corespect(ds.points, with_layers);
  CHECK(r2.labels == base.labels);
  CHECK(r2.layer_members == base.layer_members);
  CHECK(r2.pi.empty());  // density stage skipped entirely
  CHECK(r2.score.empty());
}

TEST_CASE("corespect: work equals k edges and stays under the cap") {
  cs::SynthDataset ds = small_separable(9);
  cs::CorespectParams p = small_params();
  for (int ell : {2, 5, 10}) {
    p.ell = ell;
    cs::CorespectResult r = cs::corespect(ds.points, p);
    CHECK(r.work_count == static_cast<std::size_t>(p.k) * r.cdnn_edges);
    CHECK(r.work_count <=
          static_cast<std::size_t>(ds.points.rows()) * p.k * p.t);
    CHECK(r.core_size == static_cast<int>(r.layer_members[0].size()));
    for (int l : r.labels) {
      CHECK(l >= 0);
      CHECK(l < p.k);
    }
  }
}

TEST_CASE("corespect: reported core objective is the core subset objective") {
  cs::SynthDataset ds = small_separable(11);
  cs::CorespectParams p = small_params();
  p.algo = cs::CoreAlgo::gmm;
  cs::CorespectResult r = cs::corespect(ds.points, p);
  const auto& core = r.layer_members[0];
  cs::Matrix core_x(core.size(), ds.points.cols());
  std::vector<int> core_labels(core.size());
  for (std::size_t i = 0; i < core.size(); ++i) {
    core_x.row(i) = ds.points.row(core[i]);
    core_labels[i] = r.labels[core[i]];
  }
  CHECK(r.core_objective == cs::kmeans_objective(core_x, core_labels));
}

TEST_CASE("corespect: identical runs are identical, whatever the threads") {
  cs::SynthDataset ds = small_separable(13);
  cs::CorespectParams p = small_params();

  EnvGuard guard("CORESPECT_THREADS");
  setenv("CORESPECT_THREADS", "1", 1);
  cs::CorespectResult serial = cs::corespect(ds.points, p);
  setenv("CORESPECT_THREADS", "4", 1);
  cs::CorespectResult threaded = cs::corespect(ds.points, p);

  CHECK(serial.labels == threaded.labels);
  CHECK(serial.pi == threaded.pi);
  CHECK(serial.z == threaded.z);
  CHECK(serial.score == threaded.score);
  CHECK(serial.layer == threaded.layer);
  CHECK(serial.membership == threaded.membership);
  CHECK(serial.core_objective == threaded.core_objective);
}

TEST_CASE("corespect: zero-density points are reported, not fatal") {
  cs::SynthDataset ds = small_separable(17);
  cs::CorespectParams p = small_params();
  p.ell = 4;
  std::vector<double> pi(ds.points.rows(), 1.0);
  pi[0] = 0.0;
  pi[5] = 0.0;
  // vary the rest so the ranking is informative
  for (std::size_t i = 1; i < pi.size(); ++i)
    if (pi[i] > 0.0) pi[i] = 0.1 + 0.8 * static_cast<double>(i) / pi.size();
  p.pi_override = pi;
  cs::CorespectResult r = cs::corespect(ds.points, p);
  CHECK(r.zero_density == 2);
  CHECK(r.score[0] == 0.0);
  CHECK(r.score[5] == 0.0);
  // the dry points rank last
  CHECK(r.layer[0] == 3);
  CHECK(r.layer[5] == 3);
}

TEST_CASE("corespect: enhanced kmeans beats plain kmeans on entangled data") {
  cs::LcpdmParams sp;  // generator defaults: the entangled benchmark shape
  sp.seed = 1;
  cs::SynthDataset ds = cs::gen_entangled(sp);
  cs::CorespectParams p;  // pipeline defaults q=40, r=20, t=20, ell=10
  p.k = 2;
  p.seed = 1;
  cs::CorespectResult enhanced = cs::corespect(ds.points, p);
  cs::KmeansResult plain = cs::plain_kmeans(ds.points, p.k, p.seed);
  const double ari_enhanced = cs::ari(ds.labels, enhanced.labels);
  const double ari_plain = cs::ari(ds.labels, plain.labels);
  CHECK(ari_enhanced > ari_plain + 0.1);
  CHECK(ari_enhanced > 0.95);
}

TEST_CASE("corespect: validation") {
  cs::SynthDataset ds = small_separable(19);
  const int n = static_cast<int>(ds.points.rows());
  cs::CorespectParams p = small_params();

  p.k = 0;
  CHECK_THROWS_AS(cs::corespect(ds.points, p), cs::config_error);
  p = small_params();
  p.q = 0;
  CHECK_THROWS_AS(cs::corespect(ds.points, p), cs::config_error);
  p = small_params();
  p.r = 0;
  CHECK_THROWS_AS(cs::corespect(ds.points, p), cs::config_error);
  p = small_params();
  p.t = 0;
  CHECK_THROWS_AS(cs::corespect(ds.points, p), cs::config_error);
  p = small_params();
  p.ell = 0;
  CHECK_THROWS_AS(cs::corespect(ds.points, p), cs::config_error);
  p.ell = n + 1;
  CHECK_THROWS_AS(cs::corespect(ds.points, p), cs::config_error);

  p = small_params();
  p.ell = n;  // singleton core
  p.k = 2;    // cannot ask for two clusters from one point
  CHECK_THROWS_AS(cs::corespect(ds.points, p), cs::config_error);

  p = small_params();
  p.pi_override.assign(3, 1.0);
  CHECK_THROWS_AS(cs::corespect(ds.points, p), cs::config_error);

  p = small_params();
  p.layer_override.assign(n, 0);
  p.layer_override[0] = -1;
  CHECK_THROWS_AS(cs::corespect(ds.points, p), cs::config_error);
  p.layer_override.assign(n, 0);
  p.layer_override[0] = 2;  // layer 1 empty
  CHECK_THROWS_AS(cs::corespect(ds.points, p), cs::config_error);
  p.layer_override.assign(3, 0);
  CHECK_THROWS_AS(cs::corespect(ds.points, p), cs::config_error);

  cs::Matrix one(1, 2);
  one << 0.0, 0.0;
  p = small_params();
  CHECK_THROWS_AS(cs::corespect(one, p), cs::data_error);
}
