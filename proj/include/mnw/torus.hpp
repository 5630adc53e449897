// Geometry of the d-dimensional lattice torus: vertex indexing, the wrapped
// l-infinity metric, and the annulus of long-edge-eligible partners.
#pragma once

#include <array>
#include <cstdint>
#include <vector>

namespace mnw {

using Vertex = std::int64_t;

inline constexpr int kMaxDim = 8;

// Parameters of the long-edge model on the torus. Long edges join vertex
// pairs at wrapped l-infinity distance in [ceil(alpha*n), floor(beta*n)],
// each present independently with probability sigma * n^-d * ln^zeta(n).
struct ModelParams {
  int d = 1;
  std::int64_t n = 3;
  double alpha = 0.1;
  double beta = 0.4;
  double sigma = 1.0;
  double zeta = 0.0;
  std::uint64_t seed = 0;

  std::int64_t vertex_count() const;
  double edge_probability() const;  // p_n
  double annulus_fraction() const;  // Gamma = (2*beta)^d - (2*alpha)^d
  bool gamma_gt_half() const { return annulus_fraction() > 0.5; }

  // integer distance window [lo, hi]; empty when lo > hi
  std::int64_t window_lo() const;
  std::int64_t window_hi() const;

  // throws std::invalid_argument on violated invariants (including p_n > 1)
  void validate() const;
};

struct Coords {
  std::array<std::int64_t, kMaxDim> x{};
};

Vertex encode_vertex(const ModelParams& params, const Coords& c);
Coords decode_vertex(const ModelParams& params, Vertex v);

// wrapped l-infinity distance; symmetric, in [0, n/2]
std::int64_t torus_distance(const ModelParams& params, Vertex u, Vertex v);

// all partners of u in the eligible window, ascending vertex index
std::vector<Vertex> annulus(const ModelParams& params, Vertex u);

// closed-form |annulus(u)|, identical for every u by vertex transitivity
std::int64_t annulus_size(const ModelParams& params);

// j-th offset (0 <= j < annulus_size) of the annulus shell in a fixed
// lexicographic order over coordinate offsets; O(d) unranking
Coords annulus_offset_at(const ModelParams& params, std::int64_t j);

// vertex reached from u by a coordinate offset, wrapped per coordinate
Vertex apply_offset(const ModelParams& params, Vertex u, const Coords& offset);

}  // namespace mnw
