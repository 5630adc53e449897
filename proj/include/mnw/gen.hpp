// Sampling of the long-edge graph on the torus: the fast binomial-count
// sampler, a per-pair Bernoulli reference sampler for small instances, the
// original one-dimensional ring baseline, and the versioned edge-list format.
#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

#include "mnw/torus.hpp"

namespace mnw {

using EdgePair = std::pair<Vertex, Vertex>;  // u < v

// Long edges only; the 2d-regular torus edges are implied by the params
// and regenerated when the adjacency is built.
struct EdgeList {
  ModelParams params;
  std::vector<EdgePair> long_edges;  // sorted ascending (u, then v), distinct

  std::int64_t torus_edge_count() const { return params.d * params.vertex_count(); }
};

// number of unordered vertex pairs in the eligible distance window
std::int64_t eligible_pair_count(const ModelParams& params);

// Exact i.i.d. Bernoulli(p_n) sample over the eligible pairs: draws
// K ~ Binomial(N, p_n) and then K distinct pairs uniformly. Deterministic
// in the seed and invariant under the worker thread count.
EdgeList generate(const ModelParams& params, int threads = 1);

// direct per-pair Bernoulli sampler; the distributional oracle for generate()
EdgeList generate_reference(const ModelParams& params);

// Original ring small world: every vertex draws Poisson(p) shortcut stubs
// whose far endpoints are uniform. Loops, repeated pairs, and pairs already
// joined by a ring edge collapse away; the raw stub count is kept for
// degree statistics.
struct NwBaseline {
  std::int64_t n = 3;
  double p = 0.0;
  std::uint64_t seed = 0;
  std::int64_t raw_stub_count = 0;
  std::vector<EdgePair> shortcuts;  // sorted, distinct, no ring duplicates
};

NwBaseline generate_original_nw(std::int64_t n, double p, std::uint64_t seed);

// `mnw v1` text format: header then one `u v` line per long edge
void write_mnw(std::ostream& os, const EdgeList& edges);
EdgeList read_mnw(std::istream& is);
void save_mnw(const std::string& path, const EdgeList& edges);
EdgeList load_mnw(const std::string& path);

}  // namespace mnw
