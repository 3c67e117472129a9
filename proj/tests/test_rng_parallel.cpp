#include <doctest.h>

#include <cmath>
#include <cstdlib>
#include <numeric>
#include <string>
#include <vector>

#include "corespect/errors.hpp"
#include "corespect/parallel.hpp"
#include "corespect/rng.hpp"

namespace cs = corespect;

TEST_CASE("splitmix64 matches the published reference sequence") {
  // First three outputs for state 0, straight from the reference
  // implementation's test vector.
  std::uint64_t state = 0;
  CHECK(cs::splitmix64_next(state) == 0xe220a8397b1dcdafULL);
  CHECK(cs::splitmix64_next(state) == 0x6e789e6aa1b965f4ULL);
  CHECK(cs::splitmix64_next(state) == 0x06c45d188009454fULL);
}

TEST_CASE("same seed, same byte stream") {
  cs::Rng a(42), b(42);
  for (int i = 0; i < 1000; ++i) CHECK(a.next() == b.next());
}

TEST_CASE("different seeds diverge immediately") {
  cs::Rng a(1), b(2);
  int same = 0;
  for (int i = 0; i < 64; ++i)
    if (a.next() == b.next()) ++same;
  CHECK(same == 0);
}

TEST_CASE("split depends only on the root seed, not on consumed state") {
  cs::Rng fresh(7);
  cs::Rng burned(7);
  for (int i = 0; i < 123; ++i) burned.next();
  cs::Rng sa = fresh.split("stage");
  cs::Rng sb = burned.split("stage");
  for (int i = 0; i < 100; ++i) CHECK(sa.next() == sb.next());
}

TEST_CASE("named splits are distinct streams") {
  cs::Rng root(7);
  cs::Rng a = root.split("core");
  cs::Rng b = root.split("noise");
  int same = 0;
  for (int i = 0; i < 64; ++i)
    if (a.next() == b.next()) ++same;
  CHECK(same == 0);
}

TEST_CASE("indexed splits are distinct per index and reproducible") {
  cs::Rng root(7);
  cs::Rng a0 = root.split("rep", 0);
  cs::Rng a1 = root.split("rep", 1);
  cs::Rng a0_again = root.split("rep", 0);
  CHECK(a0.next() != a1.next());
  cs::Rng a0_fresh = cs::Rng(7).split("rep", 0);
  for (int i = 0; i < 50; ++i) CHECK(a0_again.next() == a0_fresh.next());
}

TEST_CASE("root_seed round-trips") {
  cs::Rng r(123456789ULL);
  CHECK(r.root_seed() == 123456789ULL);
}

TEST_CASE("uniform stays in [0, 1) and fills the range") {
  cs::Rng r(3);
  double lo = 1.0, hi = 0.0;
  for (int i = 0; i < 100000; ++i) {
    double u = r.uniform();
    CHECK(u >= 0.0);
    CHECK(u < 1.0);
    lo = std::min(lo, u);
    hi = std::max(hi, u);
  }
  CHECK(lo < 0.001);
  CHECK(hi > 0.999);
}

TEST_CASE("uniform(lo, hi) respects its bounds") {
  cs::Rng r(4);
  for (int i = 0; i < 10000; ++i) {
    double u = r.uniform(-2.5, 3.5);
    CHECK(u >= -2.5);
    CHECK(u < 3.5);
  }
}

TEST_CASE("uniform_int is in range and unbiased across buckets") {
  cs::Rng r(5);
  const std::uint64_t n = 7;
  std::vector<int> counts(n, 0);
  const int draws = 70000;
  for (int i = 0; i < draws; ++i) {
    std::uint64_t v = r.uniform_int(n);
    REQUIRE(v < n);
    counts[v]++;
  }
  // Each bucket expects draws/n = 10000 with sd ~ sqrt(10000 * 6/7) ~ 93;
  // +-5 sd keeps the deterministic run far from the boundary.
  for (std::uint64_t b = 0; b < n; ++b)
    CHECK(std::abs(counts[b] - draws / static_cast<int>(n)) < 465);
  CHECK_THROWS_AS(r.uniform_int(0), cs::invariant_error);
}

TEST_CASE("normal moments over many draws") {
  cs::Rng r(6);
  const int n = 100000;
  double sum = 0.0, sq = 0.0;
  for (int i = 0; i < n; ++i) {
    double v = r.normal();
    sum += v;
    sq += v * v;
  }
  const double mean = sum / n;
  const double var = sq / n - mean * mean;
  CHECK(std::fabs(mean) < 0.02);
  CHECK(std::fabs(var - 1.0) < 0.03);
}

TEST_CASE("normal caching keeps the stream deterministic") {
  cs::Rng a(8), b(8);
  for (int i = 0; i < 101; ++i) CHECK(a.normal() == b.normal());
  // consuming one more from a desynchronizes as expected
  a.normal();
  CHECK(a.normal() != b.normal());
}

TEST_CASE("chunk boundaries are a pure function of n") {
  CHECK(cs::chunk_count(0) == 0);
  CHECK(cs::chunk_count(1) == 1);
  CHECK(cs::chunk_count(63) == 63);
  CHECK(cs::chunk_count(64) == 64);
  CHECK(cs::chunk_count(100000) == 64);
}

TEST_CASE("parallel_for covers every index exactly once") {
  const std::size_t n = 1000;
  std::vector<int> hits(n, 0);
  cs::parallel_for(n, [&](std::size_t b, std::size_t e) {
    for (std::size_t i = b; i < e; ++i) hits[i]++;
  });
  for (std::size_t i = 0; i < n; ++i) CHECK(hits[i] == 1);
}

TEST_CASE("parallel_for propagates exceptions") {
  CHECK_THROWS_AS(
      cs::parallel_for(100,
                       [&](std::size_t b, std::size_t) {
                         if (b == 0) throw cs::invariant_error("boom");
                       }),
      cs::invariant_error);
}

TEST_CASE("map_reduce combines partials in ascending chunk order") {
  // A non-commutative combine (string concatenation) exposes any reordering:
  // the result must equal the sequential left-to-right concatenation.
  const std::size_t n = 500;
  auto map = [](std::size_t b, std::size_t e) {
    return std::to_string(b) + ":" + std::to_string(e) + ";";
  };
  std::string par = cs::parallel_map_reduce<std::string>(
      n, "", map, [](std::string a, std::string b) { return a + b; });
  std::string seq;
  const std::size_t chunks = cs::chunk_count(n);
  const std::size_t per = (n + chunks - 1) / chunks;
  for (std::size_t c = 0; c < chunks; ++c) {
    std::size_t b = c * per, e = std::min(n, b + per);
    if (b < e) seq += map(b, e);
  }
  CHECK(par == seq);
}

TEST_CASE("map_reduce sums match closed forms") {
  const std::size_t n = 12345;
  auto total = cs::parallel_map_reduce<std::uint64_t>(
      n, 0,
      [](std::size_t b, std::size_t e) {
        std::uint64_t s = 0;
        for (std::size_t i = b; i < e; ++i) s += i;
        return s;
      },
      [](std::uint64_t a, std::uint64_t b) { return a + b; });
  CHECK(total == static_cast<std::uint64_t>(n) * (n - 1) / 2);
}

TEST_CASE("thread cap env var wins, including oversubscription") {
  // max_threads re-reads the environment on every call, so in-process
  // changes take effect immediately.
  const char* old = std::getenv("CORESPECT_THREADS");
  std::string saved = old ? old : "";

  setenv("CORESPECT_THREADS", "3", 1);
  CHECK(cs::max_threads() == 3);
  setenv("CORESPECT_THREADS", "8", 1);
  CHECK(cs::max_threads() == 8);
  setenv("CORESPECT_THREADS", "0", 1);  // invalid -> hardware fallback
  CHECK(cs::max_threads() >= 1);

  if (old)
    setenv("CORESPECT_THREADS", saved.c_str(), 1);
  else
    unsetenv("CORESPECT_THREADS");
}

TEST_CASE("parallel_for results identical for 1 vs 8 threads") {
  const char* old = std::getenv("CORESPECT_THREADS");
  std::string saved = old ? old : "";

  auto run = [&]() {
    std::vector<double> out(5000);
    cs::parallel_for(out.size(), [&](std::size_t b, std::size_t e) {
      for (std::size_t i = b; i < e; ++i)
        out[i] = std::sin(static_cast<double>(i)) * 1e-3;
    });
    return out;
  };
  setenv("CORESPECT_THREADS", "1", 1);
  auto a = run();
  setenv("CORESPECT_THREADS", "8", 1);
  auto b = run();
  CHECK(a == b);

  if (old)
    setenv("CORESPECT_THREADS", saved.c_str(), 1);
  else
    unsetenv("CORESPECT_THREADS");
}
