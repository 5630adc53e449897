#include "mnw/graph.hpp"

#include <algorithm>
#include <atomic>
#include <bit>
#include <map>
#include <ostream>
#include <stdexcept>
#include <unordered_set>

#include "mnw/parallel.hpp"
#include "mnw/rng.hpp"

namespace mnw {

namespace {

// sorted torus neighbors of u (2d of them; distinct whenever n >= 3)
void torus_neighbors(const ModelParams& p, Vertex u, std::vector<Vertex>& out) {
  out.clear();
  Coords c = decode_vertex(p, u);
  for (int s = 0; s < p.d; ++s) {
    Coords t = c;
    t.x[s] = c.x[s] + 1 == p.n ? 0 : c.x[s] + 1;
    out.push_back(encode_vertex(p, t));
    t.x[s] = c.x[s] == 0 ? p.n - 1 : c.x[s] - 1;
    out.push_back(encode_vertex(p, t));
  }
  std::sort(out.begin(), out.end());
}

Graph build_torus_with(const ModelParams& p, std::span<const EdgePair> extra) {
  Graph g;
  g.vertex_count = p.vertex_count();
  g.base_degree = 2 * p.d;
  g.params = p;

  // long edges grouped per endpoint; duplicates of torus edges dropped
  std::vector<std::pair<Vertex, Vertex>> directed;
  directed.reserve(extra.size() * 2);
  const bool overlap_possible = p.window_lo() <= 1;
  std::vector<Vertex> nbr;
  for (const auto& [u, v] : extra) {
    if (u < 0 || v < 0 || u >= g.vertex_count || v >= g.vertex_count || u == v)
      throw std::invalid_argument("mnw: malformed edge list");
    if (overlap_possible) {
      torus_neighbors(p, u, nbr);
      if (std::binary_search(nbr.begin(), nbr.end(), v)) continue;
    }
    directed.emplace_back(u, v);
    directed.emplace_back(v, u);
  }
  std::sort(directed.begin(), directed.end());
  if (std::adjacent_find(directed.begin(), directed.end()) != directed.end())
    throw std::invalid_argument("mnw: duplicate pair in edge list");

  g.offsets.assign(g.vertex_count + 1, 0);
  for (const auto& [u, v] : directed) g.offsets[u + 1]++;
  for (Vertex u = 0; u < g.vertex_count; ++u) g.offsets[u + 1] += g.offsets[u] + g.base_degree;

  g.adjacency.assign(static_cast<std::size_t>(g.offsets[g.vertex_count]), 0);
  std::size_t cursor = 0;
  std::int64_t fill = 0;
  for (Vertex u = 0; u < g.vertex_count; ++u) {
    torus_neighbors(p, u, nbr);
    for (Vertex v : nbr) g.adjacency[fill++] = v;
    while (cursor < directed.size() && directed[cursor].first == u)
      g.adjacency[fill++] = directed[cursor++].second;  // already sorted by v
  }
  return g;
}

}  // namespace

Graph build(const EdgeList& edges) {
  edges.params.validate();
  return build_torus_with(edges.params, edges.long_edges);
}

Graph build(const NwBaseline& baseline) {
  ModelParams ring;
  ring.d = 1;
  ring.n = baseline.n;
  // geometric window fields are unused for the baseline; keep them valid
  ring.alpha = 0.1;
  ring.beta = 0.4;
  ring.sigma = 0.0;
  ring.seed = baseline.seed;
  Graph g = build_torus_with(ring, baseline.shortcuts);
  g.params.reset();  // shortcuts are not window-constrained
  return g;
}

Graph build_pure_torus(int d, std::int64_t n) {
  ModelParams p;
  p.d = d;
  p.n = n;
  p.sigma = 0.0;
  p.validate();
  return build_torus_with(p, {});
}

Graph graph_from_edges(std::int64_t vertex_count, std::span<const EdgePair> edges) {
  Graph g;
  g.vertex_count = vertex_count;
  g.base_degree = 0;
  std::vector<std::pair<Vertex, Vertex>> directed;
  directed.reserve(edges.size() * 2);
  for (const auto& [u, v] : edges) {
    if (u < 0 || v < 0 || u >= vertex_count || v >= vertex_count || u == v)
      throw std::invalid_argument("mnw: malformed edge list");
    directed.emplace_back(u, v);
    directed.emplace_back(v, u);
  }
  std::sort(directed.begin(), directed.end());
  if (std::adjacent_find(directed.begin(), directed.end()) != directed.end())
    throw std::invalid_argument("mnw: duplicate pair in edge list");
  g.offsets.assign(vertex_count + 1, 0);
  for (const auto& [u, v] : directed) g.offsets[u + 1]++;
  for (Vertex u = 0; u < vertex_count; ++u) g.offsets[u + 1] += g.offsets[u];
  g.adjacency.resize(directed.size());
  for (std::size_t i = 0; i < directed.size(); ++i) g.adjacency[i] = directed[i].second;
  return g;
}

std::int64_t max_degree(const Graph& g) {
  std::int64_t best = 0;
  for (Vertex u = 0; u < g.vertex_count; ++u) best = std::max(best, g.degree(u));
  return best;
}

CutStats cut_stats(const Graph& g, std::span<const Vertex> subset) {
  if (subset.empty() || static_cast<std::int64_t>(subset.size()) >= g.vertex_count)
    throw std::invalid_argument("mnw: cut statistics need a nonempty proper subset");
  std::vector<std::uint8_t> in_set(static_cast<std::size_t>(g.vertex_count), 0);
  for (Vertex u : subset) {
    if (u < 0 || u >= g.vertex_count) throw std::out_of_range("mnw: subset vertex out of range");
    if (in_set[u]) throw std::invalid_argument("mnw: repeated vertex in subset");
    in_set[u] = 1;
  }
  CutStats s;
  s.subset_size = static_cast<std::int64_t>(subset.size());
  for (Vertex u : subset) {
    s.volume += g.degree(u);
    for (std::int64_t i = g.offsets[u]; i < g.offsets[u + 1]; ++i) {
      if (in_set[g.adjacency[i]]) continue;
      s.cut_edges++;
      if (i - g.offsets[u] >= g.base_degree) s.long_cut++;
    }
  }
  s.stationary_mass = static_cast<double>(s.volume) / static_cast<double>(g.adjacency.size());
  return s;
}

namespace {

// BFS into caller-provided buffers; returns the eccentricity and the
// smallest farthest vertex
std::pair<std::int32_t, Vertex> bfs_into(const Graph& g, Vertex source,
                                         std::vector<std::int32_t>& dist,
                                         std::vector<Vertex>& queue) {
  dist.assign(static_cast<std::size_t>(g.vertex_count), -1);
  queue.clear();
  queue.push_back(source);
  dist[source] = 0;
  std::size_t head = 0;
  std::int32_t ecc = 0;
  Vertex far = source;
  while (head < queue.size()) {
    Vertex u = queue[head++];
    std::int32_t du = dist[u];
    if (du > ecc) {
      ecc = du;
      far = u;
    } else if (du == ecc && u < far) {
      far = u;
    }
    for (std::int64_t i = g.offsets[u]; i < g.offsets[u + 1]; ++i) {
      Vertex v = g.adjacency[i];
      if (dist[v] < 0) {
        dist[v] = du + 1;
        queue.push_back(v);
      }
    }
  }
  return {ecc, far};
}

void require_connected(const Graph& g, const std::vector<Vertex>& reached) {
  if (static_cast<std::int64_t>(reached.size()) != g.vertex_count)
    throw std::invalid_argument("mnw: graph is not connected");
}

// Exact eccentricities by synchronized bitset expansion: row v after round t
// holds the ball of radius t around v. Used for small-diameter dense graphs,
// where iFUB would have to sweep an entire fat level to certify.
std::int64_t diameter_by_bitsets(const Graph& g, int threads) {
  const std::int64_t v = g.vertex_count;
  const std::size_t words = static_cast<std::size_t>((v + 63) / 64);
  std::vector<std::uint64_t> cur(words * static_cast<std::size_t>(v), 0);
  std::vector<std::uint64_t> next(words * static_cast<std::size_t>(v), 0);
  std::vector<std::uint8_t> full(static_cast<std::size_t>(v), 0);
  for (Vertex u = 0; u < v; ++u)
    cur[static_cast<std::size_t>(u) * words + static_cast<std::size_t>(u >> 6)] |=
        std::uint64_t(1) << (u & 63);

  std::int64_t diameter = 0;
  std::int64_t remaining = v;
  for (std::int64_t round = 1; remaining > 0; ++round) {
    if (round > v) throw std::invalid_argument("mnw: graph is not connected");
    std::atomic<std::int64_t> completed{0};
    parallel_for(v, threads, [&](std::int64_t row) {
      const std::uint64_t* self = &cur[static_cast<std::size_t>(row) * words];
      std::uint64_t* out = &next[static_cast<std::size_t>(row) * words];
      std::copy(self, self + words, out);  // full rows stay all-ones in both buffers
      if (full[row]) return;
      for (std::int64_t i = g.offsets[row]; i < g.offsets[row + 1]; ++i) {
        const std::uint64_t* nbr = &cur[static_cast<std::size_t>(g.adjacency[i]) * words];
        for (std::size_t w = 0; w < words; ++w) out[w] |= nbr[w];
      }
      std::int64_t count = 0;
      for (std::size_t w = 0; w < words; ++w) count += std::popcount(out[w]);
      if (count == v) {
        full[row] = 1;
        completed.fetch_add(1);
      }
    });
    remaining -= completed.load();
    if (completed.load() > 0) diameter = round;  // the last rows to fill set the diameter
    cur.swap(next);
  }
  return diameter;
}

// eccentricities of a batch of sources, deterministic across thread counts
std::int64_t batch_ecc_max(const Graph& g, std::span<const Vertex> sources, int threads,
                           std::int64_t& bfs_runs) {
  std::vector<std::int32_t> eccs(sources.size());
  int workers = static_cast<int>(std::min<std::int64_t>(
      resolve_threads(threads), static_cast<std::int64_t>(sources.size())));
  std::vector<std::vector<std::int32_t>> dist(workers);
  std::vector<std::vector<Vertex>> queue(workers);

  // static partition so each worker reuses its own buffers
  parallel_for(workers, workers, [&](std::int64_t w) {
    for (std::size_t i = static_cast<std::size_t>(w); i < sources.size();
         i += static_cast<std::size_t>(workers)) {
      eccs[i] = bfs_into(g, sources[i], dist[w], queue[w]).first;
      require_connected(g, queue[w]);
    }
  });
  bfs_runs += static_cast<std::int64_t>(sources.size());
  std::int64_t best = 0;
  for (std::int32_t e : eccs) best = std::max<std::int64_t>(best, e);
  return best;
}

}  // namespace

std::vector<std::int32_t> bfs_distances(const Graph& g, Vertex source) {
  if (source < 0 || source >= g.vertex_count)
    throw std::out_of_range("mnw: BFS source out of range");
  std::vector<std::int32_t> dist;
  std::vector<Vertex> queue;
  bfs_into(g, source, dist, queue);
  return dist;
}

DiameterResult diameter_exact(const Graph& g, int threads, std::int64_t all_sources_cap) {
  DiameterResult r;
  r.exact = true;
  if (g.vertex_count <= 1) return r;

  if (g.vertex_count <= all_sources_cap) {
    std::vector<Vertex> all(static_cast<std::size_t>(g.vertex_count));
    for (Vertex u = 0; u < g.vertex_count; ++u) all[u] = u;
    r.value = batch_ecc_max(g, all, threads, r.bfs_runs);
    return r;
  }

  std::vector<std::int32_t> dist;
  std::vector<Vertex> queue;

  // double sweep from a max-degree vertex
  Vertex start = 0;
  for (Vertex u = 1; u < g.vertex_count; ++u)
    if (g.degree(u) > g.degree(start)) start = u;
  auto [ecc0, a] = bfs_into(g, start, dist, queue);
  require_connected(g, queue);

  // second sweep keeps parents so the midpoint of a longest path is known
  std::vector<Vertex> parent(static_cast<std::size_t>(g.vertex_count), -1);
  dist.assign(static_cast<std::size_t>(g.vertex_count), -1);
  queue.clear();
  queue.push_back(a);
  dist[a] = 0;
  std::size_t head = 0;
  std::int32_t ecc_a = 0;
  Vertex b = a;
  while (head < queue.size()) {
    Vertex u = queue[head++];
    if (dist[u] > ecc_a) {
      ecc_a = dist[u];
      b = u;
    } else if (dist[u] == ecc_a && u < b) {
      b = u;
    }
    for (std::int64_t i = g.offsets[u]; i < g.offsets[u + 1]; ++i) {
      Vertex v = g.adjacency[i];
      if (dist[v] < 0) {
        dist[v] = dist[u] + 1;
        parent[v] = u;
        queue.push_back(v);
      }
    }
  }
  r.bfs_runs = 2;
  std::int64_t lower = std::max<std::int64_t>(ecc0, ecc_a);

  // dense shortcut-rich graphs: tiny diameter, fat BFS levels; certify by
  // bitset expansion instead of iFUB
  constexpr std::int64_t kBitsetVertexCap = 16384;  // two buffers, 64 MiB
  if (g.vertex_count <= kBitsetVertexCap && lower <= 16) {
    r.value = diameter_by_bitsets(g, threads);
    return r;
  }

  Vertex root = b;
  for (std::int32_t step = 0; step < ecc_a / 2; ++step) root = parent[root];

  // iFUB: levels from the midpoint root, processed deepest first; once
  // lower >= 2*(i-1), pairs confined to levels < i cannot beat it
  std::int32_t height = bfs_into(g, root, dist, queue).first;
  r.bfs_runs += 1;
  lower = std::max<std::int64_t>(lower, height);
  std::vector<std::vector<Vertex>> levels(static_cast<std::size_t>(height) + 1);
  for (Vertex u = 0; u < g.vertex_count; ++u)
    levels[static_cast<std::size_t>(dist[u])].push_back(u);

  for (std::int64_t i = height; i >= 1; --i) {
    if (lower >= 2 * i) break;
    const auto& batch = levels[static_cast<std::size_t>(i)];
    if (batch.empty()) continue;
    lower = std::max(lower, batch_ecc_max(g, batch, threads, r.bfs_runs));
    if (lower >= 2 * (i - 1)) break;
  }
  r.value = lower;
  return r;
}

DiameterResult diameter_sampled(const Graph& g, int samples, std::uint64_t seed, int threads) {
  DiameterResult r;
  r.exact = false;
  if (g.vertex_count <= 1) return r;
  std::int64_t want = std::min<std::int64_t>(samples, g.vertex_count);
  std::unordered_set<Vertex> picked;
  SplitRng rng(seed, 0xeccULL);
  while (static_cast<std::int64_t>(picked.size()) < want)
    picked.insert(static_cast<Vertex>(rng.next_below(static_cast<std::uint64_t>(g.vertex_count))));
  std::vector<Vertex> sources(picked.begin(), picked.end());
  std::sort(sources.begin(), sources.end());
  r.value = batch_ecc_max(g, sources, threads, r.bfs_runs);
  return r;
}

void write_distance_histogram_csv(std::ostream& os, std::span<const std::int32_t> distances) {
  std::map<std::int32_t, std::int64_t> counts;
  for (std::int32_t d : distances) counts[d]++;
  os << "distance,count\n";
  for (const auto& [d, c] : counts) os << d << ',' << c << '\n';
}

}  // namespace mnw
