#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <map>
#include <utility>
#include <vector>

#include "corespect/corecluster.hpp"
#include "corespect/errors.hpp"
#include "corespect/metrics.hpp"
#include "corespect/pipeline.hpp"
#include "corespect/rng.hpp"
#include "corespect/synth.hpp"

namespace cs = corespect;

namespace {

// Pair-counting ARI straight from the definition. The two degenerate
// conventions (no pairs at all; max index equal to expected index) mirror
// what the library documents: both return 1.
double ari_pair_oracle(const std::vector<int>& a, const std::vector<int>& b) {
  const std::size_t n = a.size();
  double n11 = 0.0, ta = 0.0, tb = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      const bool sa = a[i] == a[j];
      const bool sb = b[i] == b[j];
      if (sa && sb) n11 += 1.0;
      if (sa) ta += 1.0;
      if (sb) tb += 1.0;
    }
  }
  const double pairs = 0.5 * static_cast<double>(n) *
                       static_cast<double>(n - 1);
  if (pairs == 0.0) return 1.0;
  const double expected = ta * tb / pairs;
  const double maxi = 0.5 * (ta + tb);
  if (maxi == expected) return 1.0;
  return (n11 - expected) / (maxi - expected);
}

// NMI by direct probability summation over a map-based contingency table.
double nmi_sum_oracle(const std::vector<int>& a, const std::vector<int>& b) {
  const double n = static_cast<double>(a.size());
  std::map<int, double> pa, pb;
  std::map<std::pair<int, int>, double> pab;
  for (std::size_t i = 0; i < a.size(); ++i) {
    pa[a[i]] += 1.0;
    pb[b[i]] += 1.0;
    pab[{a[i], b[i]}] += 1.0;
  }
  if (pa.size() == 1 && pb.size() == 1) return 1.0;
  double ha = 0.0, hb = 0.0, mi = 0.0;
  for (const auto& [k, v] : pa) ha -= v / n * std::log(v / n);
  for (const auto& [k, v] : pb) hb -= v / n * std::log(v / n);
  for (const auto& [kk, v] : pab) {
    const double pij = v / n;
    mi += pij * std::log(pij * n * n / (pa[kk.first] * pb[kk.second]));
  }
  if (mi <= 0.0) return 0.0;
  const double denom = 0.5 * (ha + hb);
  if (denom <= 0.0) return 0.0;
  return mi / denom;
}

// Accuracy by brute force over all permutations of cluster ids (k <= 4).
double accuracy_perm_oracle(const std::vector<int>& truth,
                            const std::vector<int>& pred) {
  int k = 0;
  for (int v : truth) k = std::max(k, v + 1);
  for (int v : pred) k = std::max(k, v + 1);
  std::vector<int> perm(k);
  for (int i = 0; i < k; ++i) perm[i] = i;
  double best = 0.0;
  do {
    double agree = 0.0;
    for (std::size_t i = 0; i < truth.size(); ++i)
      if (truth[i] == perm[pred[i]]) agree += 1.0;
    best = std::max(best, agree / static_cast<double>(truth.size()));
  } while (std::next_permutation(perm.begin(), perm.end()));
  return best;
}

// All set partitions of {0..n-1} as restricted growth strings.
std::vector<std::vector<int>> all_partitions(int n) {
  std::vector<std::vector<int>> out;
  std::vector<int> rgs(n, 0);
  while (true) {
    out.push_back(rgs);
    // next restricted growth string
    int i = n - 1;
    for (; i > 0; --i) {
      int cap = 0;
      for (int j = 0; j < i; ++j) cap = std::max(cap, rgs[j]);
      if (rgs[i] <= cap) break;
    }
    if (i == 0) break;
    rgs[i]++;
    for (int j = i + 1; j < n; ++j) rgs[j] = 0;
  }
  return out;
}

std::vector<int> random_labels(int n, int k, cs::Rng& rng) {
  std::vector<int> v(n);
  for (int i = 0; i < n; ++i)
    v[i] = static_cast<int>(rng.uniform_int(static_cast<std::uint64_t>(k)));
  return v;
}

double mean(const std::vector<double>& v) {
  double s = 0.0;
  for (double x : v) s += x;
  return s / static_cast<double>(v.size());
}

}  // namespace

TEST_CASE("ari identity and permutation invariance") {
  std::vector<int> a{0, 0, 1, 1, 2, 2};
  CHECK(cs::ari(a, a) == 1.0);
  std::vector<int> b{0, 0, 1, 1};
  std::vector<int> c{1, 1, 0, 0};
  CHECK(cs::ari(b, c) == 1.0);
}

TEST_CASE("ari crossing split matches the pair-count oracle") {
  std::vector<int> a{0, 0, 1, 1};
  std::vector<int> b{0, 1, 0, 1};
  CHECK(cs::ari(a, b) == doctest::Approx(ari_pair_oracle(a, b)).epsilon(1e-12));
}

TEST_CASE("ari equals the pair-count oracle on every partition pair, n <= 4") {
  for (int n = 1; n <= 4; ++n) {
    auto parts = all_partitions(n);
    for (const auto& a : parts)
      for (const auto& b : parts)
        CHECK(cs::ari(a, b) ==
              doctest::Approx(ari_pair_oracle(a, b)).epsilon(1e-12));
  }
}

TEST_CASE("ari symmetry and relabel invariance on random labelings") {
  cs::Rng rng(99);
  for (int trial = 0; trial < 50; ++trial) {
    auto a = random_labels(30, 4, rng);
    auto b = random_labels(30, 3, rng);
    CHECK(cs::ari(a, b) == doctest::Approx(cs::ari(b, a)).epsilon(1e-14));
    // relabel a by the permutation 0->2, 1->0, 2->3, 3->1
    std::vector<int> perm{2, 0, 3, 1};
    std::vector<int> a2(a.size());
    for (std::size_t i = 0; i < a.size(); ++i) a2[i] = perm[a[i]];
    CHECK(cs::ari(a2, b) == doctest::Approx(cs::ari(a, b)).epsilon(1e-14));
    CHECK(cs::ari(a, b) <= 1.0 + 1e-15);
  }
}

TEST_CASE("ari input validation") {
  std::vector<int> a{0, 1};
  std::vector<int> b{0, 1, 1};
  CHECK_THROWS_AS(cs::ari(a, b), cs::config_error);
  CHECK_THROWS_AS(cs::ari({}, {}), cs::config_error);
  CHECK_THROWS_AS(cs::ari({0, -1}, {0, 1}), cs::config_error);
}

TEST_CASE("nmi identical labelings with at least two clusters") {
  std::vector<int> a{0, 1, 2, 0, 1, 2};
  CHECK(cs::nmi(a, a) == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("nmi against a constant labeling is zero") {
  std::vector<int> a{0, 1, 0, 1, 2};
  std::vector<int> b{0, 0, 0, 0, 0};
  CHECK(cs::nmi(a, b) == 0.0);
}

TEST_CASE("nmi matches direct summation on random 12-point labelings") {
  cs::Rng rng(7);
  for (int trial = 0; trial < 100; ++trial) {
    auto a = random_labels(12, 3, rng);
    auto b = random_labels(12, 4, rng);
    CHECK(cs::nmi(a, b) ==
          doctest::Approx(nmi_sum_oracle(a, b)).epsilon(1e-12));
  }
}

TEST_CASE("nmi symmetry") {
  cs::Rng rng(13);
  for (int trial = 0; trial < 20; ++trial) {
    auto a = random_labels(25, 3, rng);
    auto b = random_labels(25, 5, rng);
    CHECK(cs::nmi(a, b) == doctest::Approx(cs::nmi(b, a)).epsilon(1e-14));
  }
}

TEST_CASE("best_match_accuracy identity and label swap") {
  std::vector<int> a{0, 1, 0, 1, 1};
  CHECK(cs::best_match_accuracy(a, a) == 1.0);
  std::vector<int> flipped(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) flipped[i] = 1 - a[i];
  CHECK(cs::best_match_accuracy(a, flipped) == 1.0);
}

TEST_CASE("best_match_accuracy matches permutation enumeration, k = 3") {
  cs::Rng rng(21);
  for (int trial = 0; trial < 200; ++trial) {
    auto truth = random_labels(9, 3, rng);
    auto pred = random_labels(9, 3, rng);
    CHECK(cs::best_match_accuracy(truth, pred) ==
          doctest::Approx(accuracy_perm_oracle(truth, pred)).epsilon(1e-12));
  }
}

TEST_CASE("best_match_accuracy handles unequal cluster counts, k <= 4") {
  cs::Rng rng(22);
  for (int trial = 0; trial < 200; ++trial) {
    auto truth = random_labels(11, 4, rng);
    auto pred = random_labels(11, 2, rng);
    CHECK(cs::best_match_accuracy(truth, pred) ==
          doctest::Approx(accuracy_perm_oracle(truth, pred)).epsilon(1e-12));
  }
}

TEST_CASE("best_match_accuracy of the trivial prediction is the majority "
          "fraction") {
  // Predicting a single cluster scores exactly the largest truth-cluster
  // share: the matching sends the lone predicted cluster to the majority
  // class. It also never beats that share, whatever the matching.
  cs::Rng rng(23);
  for (int trial = 0; trial < 50; ++trial) {
    auto truth = random_labels(40, 3, rng);
    std::vector<int> constant(40, 0);
    std::map<int, int> counts;
    for (int v : truth) counts[v]++;
    int top = 0;
    for (const auto& [k, c] : counts) top = std::max(top, c);
    const double baseline = static_cast<double>(top) / 40.0;
    CHECK(cs::best_match_accuracy(truth, constant) ==
          doctest::Approx(baseline).epsilon(1e-12));
  }
}

TEST_CASE("best_match_accuracy never loses to the identity assignment") {
  cs::Rng rng(24);
  for (int trial = 0; trial < 50; ++trial) {
    auto truth = random_labels(40, 3, rng);
    auto pred = random_labels(40, 3, rng);
    double same = 0.0;
    for (int i = 0; i < 40; ++i)
      if (truth[i] == pred[i]) same += 1.0;
    CHECK(cs::best_match_accuracy(truth, pred) >= same / 40.0 - 1e-12);
  }
}

TEST_CASE("subset objectives: equal labelings on the core give equal values") {
  cs::Rng rng(5);
  cs::Matrix x(8, 2);
  for (int i = 0; i < 8; ++i)
    for (int j = 0; j < 2; ++j) x(i, j) = rng.normal();
  std::vector<int> full{0, 1, 0, 1, 0, 1, 0, 1};
  std::vector<int> corel = full;  // same on everything
  corel[6] = 1;                   // differ outside the core only
  corel[7] = 0;
  std::vector<int> core{0, 1, 2, 3};
  auto rep = cs::subset_kmeans_objective_report(x, full, corel, core);
  CHECK(rep.core_by_core_labels ==
        doctest::Approx(rep.core_by_full_labels).epsilon(1e-15));
}

TEST_CASE("subset objectives: single cluster equals total scatter") {
  cs::Matrix x(5, 2);
  x << 0, 0, 2, 0, 0, 2, 4, 4, 1, 3;
  std::vector<int> ones(5, 0);
  std::vector<int> core{0, 1, 2, 3, 4};
  auto rep = cs::subset_kmeans_objective_report(x, ones, ones, core);
  // scatter around the mean, by hand
  double mx = (0 + 2 + 0 + 4 + 1) / 5.0, my = (0 + 0 + 2 + 4 + 3) / 5.0;
  double scatter = 0.0;
  for (int i = 0; i < 5; ++i)
    scatter += (x(i, 0) - mx) * (x(i, 0) - mx) +
               (x(i, 1) - my) * (x(i, 1) - my);
  CHECK(rep.full_by_full_labels == doctest::Approx(scatter).epsilon(1e-12));
  CHECK(rep.core_by_core_labels == doctest::Approx(scatter).epsilon(1e-12));
}

TEST_CASE("subset objectives: empty core rejected") {
  cs::Matrix x(3, 1);
  x << 0, 1, 2;
  std::vector<int> l{0, 0, 1};
  CHECK_THROWS_AS(cs::subset_kmeans_objective_report(x, l, l, {}),
                  cs::config_error);
}

TEST_CASE("subset objectives: core clustering wins on the core, entangled") {
  // On tangled tails the full-data run pays for its tail mistakes inside the
  // cores; the core-only run does not. Strict inversion in a clear majority
  // of seeds.
  cs::LcpdmParams p;
  p.tail_curl = 0.88;
  p.ratio = 1.35;
  int wins = 0;
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    p.seed = seed;
    cs::SynthDataset ds = cs::gen_entangled(p);
    cs::CorespectParams cp;
    cp.k = 2;
    cp.seed = seed;
    cs::CorespectResult res = cs::corespect(ds.points, cp);
    cs::KmeansResult plain = cs::plain_kmeans(ds.points, 2, seed);
    auto rep = cs::subset_kmeans_objective_report(
        ds.points, plain.labels, res.labels, res.layer_members[0]);
    if (rep.core_by_core_labels < rep.core_by_full_labels) ++wins;
  }
  CHECK(wins >= 6);
}

TEST_CASE("agreement: pool entirely same-label as the queries") {
  cs::Matrix x(6, 1);
  x << 0, 1, 2, 3, 4, 5;
  std::vector<int> labels{0, 0, 0, 0, 1, 1};
  std::vector<int> queries{0, 1};
  std::vector<int> pool{2, 3};
  auto agree = cs::nn_label_agreement(x, labels, queries, pool, 2,
                                      cs::AgreementMetric::euclidean);
  CHECK(mean(agree) == 1.0);
}

TEST_CASE("agreement: two-point pool, one per label, hand instance") {
  // Points on a line at 0, 1, 10, 11 with labels 0,0,1,1. Pool = {1, 2}.
  // Query 0 -> nearer pool point is 1 (same label). Query 1 is in the pool,
  // so only point 2 remains (other label). Query 2 symmetric. Query 3 ->
  // nearer is 2 (same label). Mean agreement = (1+0+0+1)/4 = 0.5.
  cs::Matrix x(4, 1);
  x << 0, 1, 10, 11;
  std::vector<int> labels{0, 0, 1, 1};
  std::vector<int> queries{0, 1, 2, 3};
  std::vector<int> pool{1, 2};
  auto agree = cs::nn_label_agreement(x, labels, queries, pool, 1,
                                      cs::AgreementMetric::euclidean);
  REQUIRE(agree.size() == 4);
  CHECK(agree[0] == 1.0);
  CHECK(agree[1] == 0.0);
  CHECK(agree[2] == 0.0);
  CHECK(agree[3] == 1.0);
  CHECK(mean(agree) == 0.5);
}

TEST_CASE("agreement: m larger than the pool clamps to what exists") {
  cs::Matrix x(4, 1);
  x << 0, 1, 2, 9;
  std::vector<int> labels{0, 0, 1, 1};
  std::vector<int> queries{0};
  std::vector<int> pool{1, 2};
  auto agree = cs::nn_label_agreement(x, labels, queries, pool, 10,
                                      cs::AgreementMetric::euclidean);
  CHECK(agree[0] == 0.5);  // 1 of 2 shares label
}

TEST_CASE("agreement: singleton pool that is the query itself is an error") {
  cs::Matrix x(2, 1);
  x << 0, 1;
  std::vector<int> labels{0, 1};
  CHECK_THROWS_AS(cs::nn_label_agreement(x, labels, {0}, {0}, 1,
                                         cs::AgreementMetric::euclidean),
                  cs::config_error);
}

TEST_CASE("agreement: cdnn_path on a hand graph with an unreachable member") {
  // Line 0 --- 1 --- 2, with 3 far away and never linked. Pool = {1, 3};
  // query 2 reaches 1 through its own edge, never 3. With m = 2 both pool
  // members are ranked (3 last at infinite distance), so agreement is the
  // fraction of {1, 3} sharing 2's label.
  cs::Matrix x(4, 2);
  x << 0, 0, 1, 0, 2, 0, 50, 0;
  std::vector<int> labels{0, 0, 0, 1};
  cs::CdnnGraph g;
  g.t = 1;
  g.nbr.assign(4, {});
  g.dist.assign(4, {});
  g.weight.assign(4, {});
  g.nbr[2] = {1};
  g.dist[2] = {1.0};
  g.weight[2] = {1.0};
  g.edge_count = 1;
  auto agree = cs::nn_label_agreement(x, labels, {2}, {1, 3}, 2,
                                      cs::AgreementMetric::cdnn_path,
                                      &g);
  CHECK(agree[0] == 0.5);
  // With m = 1 only the reachable member counts and it shares the label.
  auto top1 = cs::nn_label_agreement(x, labels, {2}, {1, 3}, 1,
                                     cs::AgreementMetric::cdnn_path, &g);
  CHECK(top1[0] == 1.0);
}

TEST_CASE("agreement: cdnn_path requires the graph") {
  cs::Matrix x(3, 1);
  x << 0, 1, 2;
  std::vector<int> labels{0, 1, 1};
  CHECK_THROWS_AS(cs::nn_label_agreement(x, labels, {0}, {1, 2}, 1,
                                         cs::AgreementMetric::cdnn_path),
                  cs::config_error);
}

TEST_CASE("agreement: path ranking can disagree with euclidean ranking") {
  // Query 3 sits between pool points 0 and 2 in space, but its only edge
  // goes to 2; the path to 0 detours through 2, so 2 ranks first under the
  // path metric while 0 ranks first under euclidean.
  cs::Matrix x(4, 2);
  x << 0, 0, 10, 0, 3, 0, 1.4, 0;
  std::vector<int> labels{0, 9, 1, 1};
  cs::CdnnGraph g;
  g.t = 1;
  g.nbr.assign(4, {});
  g.dist.assign(4, {});
  g.weight.assign(4, {});
  g.nbr[3] = {2};
  g.dist[3] = {1.6};
  g.weight[3] = {1.0};
  g.nbr[2] = {0};
  g.dist[2] = {3.0};
  g.weight[2] = {1.0};
  g.edge_count = 2;
  auto path = cs::nn_label_agreement(x, labels, {3}, {0, 2}, 1,
                                     cs::AgreementMetric::cdnn_path, &g);
  CHECK(path[0] == 1.0);  // label of 2 matches
  auto eucl = cs::nn_label_agreement(x, labels, {3}, {0, 2}, 1,
                                     cs::AgreementMetric::euclidean);
  CHECK(eucl[0] == 0.0);  // 0 is nearer in space
}

TEST_CASE("agreement: euclidean and cdnn_path agree on separable cores") {
  cs::LcpdmParams p;
  p.ell = 3;
  p.width = 0.5;
  p.ratio = 2.0;
  p.seed = 11;
  cs::SynthDataset ds = cs::gen_separable(p);
  cs::CorespectParams cp;
  cp.k = 2;
  cp.q = 20;
  cp.r = 10;
  cp.t = 10;
  cp.seed = 11;
  cs::CorespectResult res = cs::corespect(ds.points, cp);
  const std::vector<int>& core = res.layer_members[0];
  auto eucl = cs::nn_label_agreement(ds.points, ds.labels, core, core, 10,
                                     cs::AgreementMetric::euclidean);
  auto path = cs::nn_label_agreement(ds.points, ds.labels, core, core, 10,
                                     cs::AgreementMetric::cdnn_path,
                                     &res.graph);
  CHECK(std::fabs(mean(eucl) - mean(path)) <= 0.05);
}

TEST_CASE("agreement: convenience overload equals explicit all-vs-all") {
  cs::Rng rng(31);
  cs::Matrix x(20, 2);
  for (int i = 0; i < 20; ++i)
    for (int j = 0; j < 2; ++j) x(i, j) = rng.normal();
  std::vector<int> labels = random_labels(20, 2, rng);
  std::vector<int> everyone(20);
  for (int i = 0; i < 20; ++i) everyone[i] = i;
  auto direct = cs::nn_label_agreement(x, labels, everyone, everyone, 5,
                                       cs::AgreementMetric::euclidean);
  auto conv = cs::nn_label_agreement(x, labels, 5,
                                     cs::AgreementMetric::euclidean);
  REQUIRE(direct.size() == conv.size());
  for (std::size_t i = 0; i < direct.size(); ++i)
    CHECK(direct[i] == conv[i]);
}
