// Materialized adjacency and subset statistics: degrees, cuts, volumes,
// BFS distances and the exact diameter.
#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <vector>

#include "mnw/gen.hpp"
#include "mnw/torus.hpp"

namespace mnw {

// Simple undirected graph in compressed neighbor-list form. For torus-based
// builds the first base_degree entries of every vertex are the (sorted)
// torus neighbors and the rest are the (sorted) long-edge neighbors; ad hoc
// graphs set base_degree = 0 and flag every edge as long.
struct Graph {
  std::int64_t vertex_count = 0;
  int base_degree = 0;
  std::vector<std::int64_t> offsets;  // vertex_count + 1
  std::vector<Vertex> adjacency;
  std::optional<ModelParams> params;  // provenance for torus builds

  std::int64_t degree(Vertex u) const { return offsets[u + 1] - offsets[u]; }
  std::int64_t long_degree(Vertex u) const { return degree(u) - base_degree; }
  std::int64_t edge_count() const { return static_cast<std::int64_t>(adjacency.size()) / 2; }
};

// Torus plus long edges. A long edge that duplicates a torus edge (possible
// only when the window reaches distance 1) collapses into it so the graph
// stays simple.
Graph build(const EdgeList& edges);
Graph build(const NwBaseline& baseline);
Graph build_pure_torus(int d, std::int64_t n);

// arbitrary simple graph; all edges flagged long, used by small oracles
Graph graph_from_edges(std::int64_t vertex_count, std::span<const EdgePair> edges);

std::int64_t max_degree(const Graph& g);

struct CutStats {
  std::int64_t subset_size = 0;
  std::int64_t volume = 0;      // sum of degrees over S
  std::int64_t cut_edges = 0;   // edges between S and its complement
  std::int64_t long_cut = 0;    // long edges among those
  double stationary_mass = 0;   // volume / (2|E|)
};

CutStats cut_stats(const Graph& g, std::span<const Vertex> subset);

// hop distances from source; -1 marks unreachable vertices
std::vector<std::int32_t> bfs_distances(const Graph& g, Vertex source);

struct DiameterResult {
  std::int64_t value = 0;
  bool exact = false;  // false: certified lower bound from sampled sources
  std::int64_t bfs_runs = 0;
};

// Exact diameter: all-sources BFS up to `all_sources_cap` vertices,
// otherwise a double sweep plus iFUB refinement from a midpoint root.
DiameterResult diameter_exact(const Graph& g, int threads = 1,
                              std::int64_t all_sources_cap = 4096);

// max eccentricity over k distinct random sources; a lower bound
DiameterResult diameter_sampled(const Graph& g, int samples, std::uint64_t seed,
                                int threads = 1);

// `distance,count` rows for one BFS tree
void write_distance_histogram_csv(std::ostream& os, std::span<const std::int32_t> distances);

}  // namespace mnw
