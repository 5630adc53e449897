#include "doctest.h"

#include <boost/math/distributions/chi_squared.hpp>
#include <cmath>
#include <map>
#include <sstream>

#include "mnw/gen.hpp"
#include "mnw/graph.hpp"
#include "mnw/rng.hpp"

using namespace mnw;

namespace {

ModelParams make(int d, std::int64_t n, double sigma = 1.0, double zeta = 0.0,
                 std::uint64_t seed = 0) {
  ModelParams p;
  p.d = d;
  p.n = n;
  p.sigma = sigma;
  p.zeta = zeta;
  p.seed = seed;
  return p;
}

std::int64_t pairs_by_scan(const ModelParams& p) {
  std::int64_t count = 0;
  for (Vertex u = 0; u < p.vertex_count(); ++u)
    for (Vertex v : annulus(p, u))
      if (u < v) count++;
  return count;
}

// chi-square goodness of fit against Binomial(trials, p); tail bins pooled
// so every expected count is at least 5
double chi_square_stat(const std::map<std::int64_t, std::int64_t>& observed,
                       std::int64_t samples, std::int64_t trials, double p, int& dof) {
  std::vector<double> pmf(static_cast<std::size_t>(trials) + 1);
  pmf[0] = std::pow(1.0 - p, static_cast<double>(trials));
  for (std::int64_t k = 0; k + 1 <= trials; ++k)
    pmf[k + 1] = pmf[k] * static_cast<double>(trials - k) / static_cast<double>(k + 1) * p /
                 (1.0 - p);

  std::vector<double> expected;
  std::vector<std::int64_t> observed_binned;
  double tail_expected = static_cast<double>(samples);
  std::int64_t tail_observed = samples;
  for (std::int64_t k = 0; k <= trials; ++k) {
    double e = static_cast<double>(samples) * pmf[static_cast<std::size_t>(k)];
    if (tail_expected - e < 5.0 || e < 5.0) break;  // pool the rest
    auto it = observed.find(k);
    std::int64_t o = it == observed.end() ? 0 : it->second;
    expected.push_back(e);
    observed_binned.push_back(o);
    tail_expected -= e;
    tail_observed -= o;
  }
  expected.push_back(tail_expected);
  observed_binned.push_back(tail_observed);
  double stat = 0;
  for (std::size_t i = 0; i < expected.size(); ++i) {
    double diff = static_cast<double>(observed_binned[i]) - expected[i];
    stat += diff * diff / expected[i];
  }
  dof = static_cast<int>(expected.size()) - 1;
  return stat;
}

}  // namespace

TEST_CASE("eligible pair count matches exhaustive pair enumeration") {
  auto p1 = make(1, 100);
  CHECK(eligible_pair_count(p1) == 3100);
  CHECK(eligible_pair_count(p1) == pairs_by_scan(p1));

  auto p2 = make(2, 10);
  CHECK(eligible_pair_count(p2) == 4000);
  CHECK(eligible_pair_count(p2) == pairs_by_scan(p2));

  auto empty = make(1, 3, 0, 0);
  empty.alpha = 0.4;
  empty.beta = 0.45;
  CHECK(eligible_pair_count(empty) == 0);
}

TEST_CASE("sigma zero gives the pure torus") {
  auto e = generate(make(1, 100, 0.0));
  CHECK(e.long_edges.empty());
  CHECK(e.torus_edge_count() == 100);
}

TEST_CASE("generation is deterministic in the seed and thread count") {
  auto p = make(1, 256, 1.0, 1.0, 1234);
  auto a = generate(p, 1);
  auto b = generate(p, 1);
  auto c = generate(p, 4);
  CHECK(a.long_edges == b.long_edges);
  CHECK(a.long_edges == c.long_edges);
  p.seed = 1235;
  CHECK(generate(p, 1).long_edges != a.long_edges);
}

TEST_CASE("generated edges are distinct, ordered, and inside the window") {
  auto p = make(2, 16, 2.0, 1.0, 77);
  auto e = generate(p);
  REQUIRE(!e.long_edges.empty());
  for (std::size_t i = 0; i < e.long_edges.size(); ++i) {
    auto [u, v] = e.long_edges[i];
    CHECK(u < v);
    auto dist = torus_distance(p, u, v);
    CHECK(dist >= p.window_lo());
    CHECK(dist <= p.window_hi());
    if (i > 0) CHECK(e.long_edges[i - 1] < e.long_edges[i]);
  }
}

TEST_CASE("edge count concentrates on pair count times probability") {
  auto p = make(1, 100);  // p_n = 0.01, 3100 pairs, mean 31
  const int samples = 10000;
  double total = 0;
  for (int s = 0; s < samples; ++s) {
    p.seed = 5000 + static_cast<std::uint64_t>(s);
    total += static_cast<double>(generate(p).long_edges.size());
  }
  double mean = total / samples;
  double expect = 31.0;
  double se = std::sqrt(expect * 0.99 / samples);
  CHECK(std::abs(mean - expect) <= 3 * se);
}

TEST_CASE("saturated probability emits the complete eligible set") {
  auto p = make(1, 20, 20.0, 0.0, 9);  // p_n = 1
  p.alpha = 0.2;
  p.beta = 0.4;
  REQUIRE(p.edge_probability() == doctest::Approx(1.0));
  auto e = generate(p);
  CHECK(static_cast<std::int64_t>(e.long_edges.size()) == eligible_pair_count(p));
}

TEST_CASE("long vertex degree follows the binomial law") {
  // independent replicates: one graph per seed, vertex 0 observed
  auto p = make(1, 64, 1.0, 1.0);
  const std::int64_t trials = annulus_size(p);  // 38
  const double prob = p.edge_probability();
  const int samples = 10000;
  std::map<std::int64_t, std::int64_t> observed;
  double mean = 0;
  for (int s = 0; s < samples; ++s) {
    p.seed = 40000 + static_cast<std::uint64_t>(s);
    std::int64_t deg = 0;
    for (auto [u, v] : generate(p).long_edges) deg += (u == 0) + (v == 0);
    observed[deg]++;
    mean += static_cast<double>(deg);
  }
  mean /= samples;

  int dof = 0;
  double stat = chi_square_stat(observed, samples, trials, prob, dof);
  boost::math::chi_squared chi(dof);
  CHECK(stat <= boost::math::quantile(chi, 0.999));

  double expect = static_cast<double>(trials) * prob;
  double se = std::sqrt(expect * (1 - prob) / samples);
  CHECK(std::abs(mean - expect) <= 3 * se);
}

TEST_CASE("fast sampler agrees with the per-pair reference in distribution") {
  auto p = make(1, 16);  // p_n = 1/16, 80 eligible pairs
  const int samples = 20000;
  std::map<std::int64_t, double> count_fast, count_ref;
  const EdgePair tracked{0, 3};
  double incl_fast = 0, incl_ref = 0;
  for (int s = 0; s < samples; ++s) {
    p.seed = 90000 + static_cast<std::uint64_t>(s);
    auto fast = generate(p).long_edges;
    auto ref = generate_reference(p).long_edges;
    count_fast[static_cast<std::int64_t>(fast.size())] += 1;
    count_ref[static_cast<std::int64_t>(ref.size())] += 1;
    incl_fast += std::binary_search(fast.begin(), fast.end(), tracked);
    incl_ref += std::binary_search(ref.begin(), ref.end(), tracked);
  }
  // total variation between the two empirical edge-count histograms
  double tv = 0;
  for (const auto& [k, c] : count_fast) tv += std::abs(c - count_ref[k]);
  for (const auto& [k, c] : count_ref)
    if (!count_fast.count(k)) tv += c;
  tv /= 2.0 * samples;
  CHECK(tv < 0.05);

  // single-pair inclusion marginal: both match p_n within 3 standard errors
  double p_n = p.edge_probability();
  double se = std::sqrt(p_n * (1 - p_n) / samples);
  CHECK(std::abs(incl_fast / samples - p_n) <= 3 * se);
  CHECK(std::abs(incl_ref / samples - p_n) <= 3 * se);
}

TEST_CASE("ring baseline: no stubs means the bare ring") {
  auto base = generate_original_nw(1000, 0.0, 7);
  CHECK(base.raw_stub_count == 0);
  CHECK(base.shortcuts.empty());
  auto g = build(base);
  CHECK(g.vertex_count == 1000);
  CHECK(g.edge_count() == 1000);
}

TEST_CASE("ring baseline: stub total matches the Poisson mean") {
  const int reps = 200;
  double total = 0;
  for (int s = 0; s < reps; ++s)
    total += static_cast<double>(generate_original_nw(1000, 0.5, 100 + s).raw_stub_count);
  double mean = total / reps;
  double se = std::sqrt(500.0 / reps);
  CHECK(std::abs(mean - 500.0) <= 3 * se);
}

TEST_CASE("ring baseline is deterministic and collapses to a simple graph") {
  auto a = generate_original_nw(50, 1.5, 3);
  auto b = generate_original_nw(50, 1.5, 3);
  CHECK(a.shortcuts == b.shortcuts);
  CHECK(a.raw_stub_count == b.raw_stub_count);
  for (std::size_t i = 0; i < a.shortcuts.size(); ++i) {
    auto [u, v] = a.shortcuts[i];
    CHECK(u < v);
    CHECK(v - u != 1);
    CHECK(v - u != 49);  // wrap-around ring edge
    if (i > 0) CHECK(a.shortcuts[i - 1] < a.shortcuts[i]);
  }
  CHECK_NOTHROW(build(a));
}

TEST_CASE("mnw v1 files round-trip exactly") {
  auto p = make(2, 12, 1.5, 1.0, 99);
  auto e = generate(p);
  std::stringstream ss;
  write_mnw(ss, e);
  auto back = read_mnw(ss);
  CHECK(back.params.d == p.d);
  CHECK(back.params.n == p.n);
  CHECK(back.params.alpha == p.alpha);
  CHECK(back.params.beta == p.beta);
  CHECK(back.params.sigma == p.sigma);
  CHECK(back.params.zeta == p.zeta);
  CHECK(back.params.seed == p.seed);
  CHECK(back.long_edges == e.long_edges);
}

TEST_CASE("mnw reader rejects malformed files") {
  auto reject = [](const std::string& text) {
    std::stringstream ss(text);
    CHECK_THROWS_AS(read_mnw(ss), std::invalid_argument);
  };
  reject("xyz v1 1 10 0.1 0.4 1 0 7\n");
  reject("mnw v2 1 10 0.1 0.4 1 0 7\n");
  reject("mnw v1 1 10 0.4 0.1 1 0 7\n");        // alpha >= beta
  reject("mnw v1 1 10 0.1 0.4 1 0 7\n3 2\n");   // u >= v
  reject("mnw v1 1 10 0.1 0.4 1 0 7\n0 5\n");   // distance 5 > floor(0.4*10)
  reject("mnw v1 1 10 0.1 0.4 1 0 7\n0 2\n0 2\n");  // duplicate
}
