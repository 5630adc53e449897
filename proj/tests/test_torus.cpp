#include "doctest.h"

#include <algorithm>
#include <cmath>
#include <set>

#include "mnw/rng.hpp"
#include "mnw/torus.hpp"

using namespace mnw;

namespace {

ModelParams make(int d, std::int64_t n, double alpha = 0.1, double beta = 0.4) {
  ModelParams p;
  p.d = d;
  p.n = n;
  p.alpha = alpha;
  p.beta = beta;
  return p;
}

// exhaustive annulus by scanning every vertex
std::vector<Vertex> annulus_by_scan(const ModelParams& p, Vertex u) {
  std::vector<Vertex> out;
  for (Vertex v = 0; v < p.vertex_count(); ++v) {
    if (v == u) continue;
    auto dist = torus_distance(p, u, v);
    if (dist >= p.window_lo() && dist <= p.window_hi()) out.push_back(v);
  }
  return out;
}

}  // namespace

TEST_CASE("torus distance wraps per coordinate and takes the max") {
  auto p1 = make(1, 10);
  CHECK(torus_distance(p1, 2, 9) == 3);  // min(7, 3)
  CHECK(torus_distance(p1, 4, 4) == 0);

  auto p2 = make(2, 8);
  Coords a, b;
  a.x = {0, 0};
  b.x = {4, 5};
  CHECK(torus_distance(p2, encode_vertex(p2, a), encode_vertex(p2, b)) == 4);

  CHECK_THROWS_AS(torus_distance(p1, 0, 10), std::out_of_range);
  CHECK_THROWS_AS(torus_distance(p1, -1, 3), std::out_of_range);
}

TEST_CASE("torus distance is symmetric, bounded, zero only on the diagonal") {
  for (auto p : {make(1, 17), make(2, 9), make(3, 5)}) {
    SplitRng rng(99, p.d);
    for (int trial = 0; trial < 200; ++trial) {
      auto u = static_cast<Vertex>(rng.next_below(p.vertex_count()));
      auto v = static_cast<Vertex>(rng.next_below(p.vertex_count()));
      auto duv = torus_distance(p, u, v);
      CHECK(duv == torus_distance(p, v, u));
      CHECK(duv <= p.n / 2);
      CHECK((duv == 0) == (u == v));
    }
  }
}

TEST_CASE("vertex encoding is a row-major bijection") {
  for (auto p : {make(1, 11), make(2, 7), make(3, 5)}) {
    for (Vertex v = 0; v < p.vertex_count(); ++v)
      CHECK(encode_vertex(p, decode_vertex(p, v)) == v);
  }
}

TEST_CASE("annulus matches exhaustive enumeration and is sorted") {
  auto p = make(1, 100);
  auto ring = annulus(p, 17);
  CHECK(ring.size() == 62);
  CHECK(ring == annulus_by_scan(p, 17));
  CHECK(std::is_sorted(ring.begin(), ring.end()));
  CHECK(std::find(ring.begin(), ring.end(), 17) == ring.end());

  auto p2 = make(2, 10);
  CHECK(annulus(p2, 33).size() == 80);
  CHECK(annulus(p2, 33) == annulus_by_scan(p2, 33));
}

TEST_CASE("empty distance window gives an empty annulus") {
  auto p = make(1, 3, 0.4, 0.45);  // ceil(1.2)=2 > floor(1.35)=1
  CHECK(p.window_lo() > p.window_hi());
  CHECK(annulus(p, 0).empty());
  CHECK(annulus_size(p) == 0);
}

TEST_CASE("annulus size closed form equals the enumeration for every shape") {
  struct Shape {
    int d;
    std::int64_t n;
  };
  for (auto [d, n] : {Shape{1, 10}, Shape{1, 100}, Shape{1, 256}, Shape{2, 10}, Shape{2, 16},
                      Shape{3, 8}, Shape{3, 16}}) {
    auto p = make(d, n);
    SplitRng rng(5, static_cast<std::uint64_t>(d) * 1000 + n);
    for (int probe = 0; probe < 4; ++probe) {
      auto u = static_cast<Vertex>(rng.next_below(p.vertex_count()));
      CHECK(static_cast<std::int64_t>(annulus(p, u).size()) == annulus_size(p));
    }
  }
}

TEST_CASE("annulus fraction converges to the shell volume") {
  for (std::int64_t n : {100, 1000, 10000}) {
    auto p = make(1, n);
    double measured = static_cast<double>(annulus_size(p)) / static_cast<double>(n);
    CHECK(std::abs(measured - p.annulus_fraction()) <= 4.0 / static_cast<double>(n));
  }
}

TEST_CASE("annulus membership is symmetric") {
  auto p = make(2, 9);
  SplitRng rng(41, 0);
  for (int trial = 0; trial < 30; ++trial) {
    auto u = static_cast<Vertex>(rng.next_below(p.vertex_count()));
    auto v = static_cast<Vertex>(rng.next_below(p.vertex_count()));
    auto au = annulus(p, u);
    auto av = annulus(p, v);
    bool v_in_u = std::binary_search(au.begin(), au.end(), v);
    bool u_in_v = std::binary_search(av.begin(), av.end(), u);
    CHECK(v_in_u == u_in_v);
  }
}

TEST_CASE("annulus offset unranking enumerates the shell exactly once") {
  for (auto p : {make(1, 20), make(2, 11, 0.15, 0.35), make(3, 7)}) {
    std::int64_t size = annulus_size(p);
    Vertex u = p.vertex_count() / 3;
    std::set<Vertex> seen;
    for (std::int64_t j = 0; j < size; ++j) {
      Vertex v = apply_offset(p, u, annulus_offset_at(p, j));
      auto dist = torus_distance(p, u, v);
      CHECK(dist >= p.window_lo());
      CHECK(dist <= p.window_hi());
      seen.insert(v);
    }
    CHECK(static_cast<std::int64_t>(seen.size()) == size);
    auto sorted = annulus(p, u);
    CHECK(std::equal(sorted.begin(), sorted.end(), seen.begin(), seen.end()));
    CHECK_THROWS_AS(annulus_offset_at(p, size), std::out_of_range);
  }
}

TEST_CASE("parameter validation enforces the model invariants") {
  CHECK_THROWS_AS(make(1, 2).validate(), std::invalid_argument);
  CHECK_THROWS_AS(make(1, 10, 0.4, 0.3).validate(), std::invalid_argument);
  CHECK_THROWS_AS(make(1, 10, 0.0, 0.4).validate(), std::invalid_argument);
  CHECK_THROWS_AS(make(1, 10, 0.1, 0.5).validate(), std::invalid_argument);
  CHECK_THROWS_AS(make(0, 10).validate(), std::invalid_argument);

  auto negative_sigma = make(1, 10);
  negative_sigma.sigma = -1;
  CHECK_THROWS_AS(negative_sigma.validate(), std::invalid_argument);

  // p_n > 1 is rejected, not clamped
  auto too_dense = make(1, 10);
  too_dense.sigma = 40.0;
  CHECK_THROWS_AS(too_dense.validate(), std::invalid_argument);

  auto pure = make(1, 10);
  pure.sigma = 0.0;
  CHECK_NOTHROW(pure.validate());
  CHECK(pure.edge_probability() == 0.0);

  auto p = make(1, 100);
  CHECK(p.annulus_fraction() == doctest::Approx(0.6).epsilon(1e-12));
  CHECK(p.gamma_gt_half());
  CHECK_FALSE(make(1, 100, 0.2, 0.4).gamma_gt_half());  // Gamma = 0.4
}

TEST_CASE("integer window endpoints follow the real interval") {
  auto p = make(1, 100);
  CHECK(p.window_lo() == 10);
  CHECK(p.window_hi() == 40);
  auto p2 = make(2, 10);
  CHECK(p2.window_lo() == 1);
  CHECK(p2.window_hi() == 4);
}
