#include "mnw/gen.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <unordered_set>

#include "mnw/parallel.hpp"
#include "mnw/rng.hpp"

namespace mnw {

namespace {

constexpr std::uint64_t kPairStreamBase = 0x70616972ULL;  // candidate pair draws
constexpr std::uint64_t kCountStream = 0x636e7400ULL;     // the global K draw

std::uint64_t pair_key(std::int64_t vcount, Vertex a, Vertex b) {
  if (a > b) std::swap(a, b);
  return static_cast<std::uint64_t>(a) * static_cast<std::uint64_t>(vcount) +
         static_cast<std::uint64_t>(b);
}

// one uniform eligible pair; a pure function of (seed, round, index)
std::uint64_t draw_pair_key(const ModelParams& params, std::int64_t vcount,
                            std::int64_t shell, std::uint64_t round, std::int64_t index) {
  SplitRng rng(params.seed, kPairStreamBase + (round << 44) + static_cast<std::uint64_t>(index));
  Vertex u = static_cast<Vertex>(rng.next_below(static_cast<std::uint64_t>(vcount)));
  std::int64_t j = static_cast<std::int64_t>(rng.next_below(static_cast<std::uint64_t>(shell)));
  Vertex v = apply_offset(params, u, annulus_offset_at(params, j));
  return pair_key(vcount, u, v);
}

std::vector<EdgePair> keys_to_edges(std::int64_t vcount, const std::unordered_set<std::uint64_t>& keys) {
  std::vector<EdgePair> edges;
  edges.reserve(keys.size());
  for (std::uint64_t k : keys)
    edges.emplace_back(static_cast<Vertex>(k / static_cast<std::uint64_t>(vcount)),
                       static_cast<Vertex>(k % static_cast<std::uint64_t>(vcount)));
  std::sort(edges.begin(), edges.end());
  return edges;
}

}  // namespace

std::int64_t eligible_pair_count(const ModelParams& params) {
  params.validate();
  // every unordered pair is seen from both endpoints; the product is even
  // because the shell size is even
  return params.vertex_count() * annulus_size(params) / 2;
}

EdgeList generate(const ModelParams& params, int threads) {
  params.validate();
  EdgeList out{params, {}};
  const std::int64_t vcount = params.vertex_count();
  const std::int64_t shell = annulus_size(params);
  const std::int64_t total_pairs = vcount * shell / 2;
  const double p = params.edge_probability();
  if (total_pairs == 0 || p <= 0.0) return out;

  SplitRng counter(params.seed, kCountStream);
  const std::int64_t want = counter.binomial(total_pairs, p);
  if (want == total_pairs) {
    // p_n = 1 style stress case: emit the whole eligible set directly
    out.long_edges.reserve(static_cast<std::size_t>(total_pairs));
    for (Vertex u = 0; u < vcount; ++u)
      for (Vertex v : annulus(params, u))
        if (u < v) out.long_edges.emplace_back(u, v);
    std::sort(out.long_edges.begin(), out.long_edges.end());
    return out;
  }

  // Accumulate the first `want` distinct pairs of an i.i.d. uniform
  // candidate sequence; by exchangeability that set is uniform over all
  // `want`-subsets, which matches per-pair Bernoulli conditioned on K.
  // Candidate values depend only on (seed, round, index), so the merge is
  // identical for every thread count.
  std::unordered_set<std::uint64_t> chosen;
  chosen.reserve(static_cast<std::size_t>(want) * 2 + 8);
  std::vector<std::uint64_t> batch;
  std::uint64_t round = 0;
  while (static_cast<std::int64_t>(chosen.size()) < want) {
    std::int64_t need = want - static_cast<std::int64_t>(chosen.size());
    batch.assign(static_cast<std::size_t>(need), 0);
    parallel_for(need, threads, [&](std::int64_t i) {
      batch[static_cast<std::size_t>(i)] = draw_pair_key(params, vcount, shell, round, i);
    });
    for (std::uint64_t key : batch) chosen.insert(key);
    ++round;
    if (round > (1u << 20))
      throw std::runtime_error("mnw: edge sampler failed to converge");
  }
  out.long_edges = keys_to_edges(vcount, chosen);
  return out;
}

EdgeList generate_reference(const ModelParams& params) {
  params.validate();
  const std::int64_t vcount = params.vertex_count();
  if (vcount > 4096)
    throw std::invalid_argument("mnw: reference sampler is restricted to small graphs");
  EdgeList out{params, {}};
  const double p = params.edge_probability();
  if (p <= 0.0) return out;
  SplitRng rng(params.seed, 0x726566ULL);
  for (Vertex u = 0; u < vcount; ++u)
    for (Vertex v : annulus(params, u)) {
      if (v <= u) continue;  // one Bernoulli per unordered pair
      if (rng.next_unit() < p) out.long_edges.emplace_back(u, v);
    }
  return out;  // already ascending by construction
}

NwBaseline generate_original_nw(std::int64_t n, double p, std::uint64_t seed) {
  if (n < 3) throw std::invalid_argument("mnw: ring size must be at least 3");
  if (!(p >= 0.0)) throw std::invalid_argument("mnw: stub mean must be nonnegative");
  NwBaseline out{n, p, seed, 0, {}};
  std::unordered_set<std::uint64_t> chosen;
  for (Vertex x = 0; x < n; ++x) {
    SplitRng rng(seed, static_cast<std::uint64_t>(x) + 1);
    std::int64_t stubs = rng.poisson(p);
    out.raw_stub_count += stubs;
    for (std::int64_t s = 0; s < stubs; ++s) {
      Vertex y = static_cast<Vertex>(rng.next_below(static_cast<std::uint64_t>(n)));
      if (y == x) continue;  // loop
      std::int64_t gap = x > y ? x - y : y - x;
      if (gap == 1 || gap == n - 1) continue;  // already a ring edge
      chosen.insert(pair_key(n, x, y));
    }
  }
  out.shortcuts = keys_to_edges(n, chosen);
  return out;
}

namespace {

std::string format_double(double v) {
  char buf[40];
  auto res = std::to_chars(buf, buf + sizeof buf, v);  // shortest round-trip
  return std::string(buf, res.ptr);
}

double parse_double(const std::string& tok) {
  double v = 0;
  auto res = std::from_chars(tok.data(), tok.data() + tok.size(), v);
  if (res.ec != std::errc() || res.ptr != tok.data() + tok.size())
    throw std::invalid_argument("mnw: bad numeric field '" + tok + "'");
  return v;
}

}  // namespace

void write_mnw(std::ostream& os, const EdgeList& edges) {
  const ModelParams& p = edges.params;
  os << "mnw v1 " << p.d << ' ' << p.n << ' ' << format_double(p.alpha) << ' '
     << format_double(p.beta) << ' ' << format_double(p.sigma) << ' '
     << format_double(p.zeta) << ' ' << p.seed << '\n';
  for (const auto& [u, v] : edges.long_edges) os << u << ' ' << v << '\n';
}

EdgeList read_mnw(std::istream& is) {
  std::string magic, version;
  ModelParams p;
  if (!(is >> magic >> version)) throw std::invalid_argument("mnw: missing file header");
  if (magic != "mnw" || version != "v1")
    throw std::invalid_argument("mnw: unsupported graph format '" + magic + " " + version + "'");
  std::string alpha_tok, beta_tok, sigma_tok, zeta_tok;
  if (!(is >> p.d >> p.n >> alpha_tok >> beta_tok >> sigma_tok >> zeta_tok >> p.seed))
    throw std::invalid_argument("mnw: truncated file header");
  p.alpha = parse_double(alpha_tok);
  p.beta = parse_double(beta_tok);
  p.sigma = parse_double(sigma_tok);
  p.zeta = parse_double(zeta_tok);
  p.validate();

  EdgeList out{p, {}};
  const std::int64_t vcount = p.vertex_count();
  const std::int64_t lo = p.window_lo(), hi = p.window_hi();
  std::unordered_set<std::uint64_t> seen;
  Vertex u, v;
  while (is >> u >> v) {
    if (u < 0 || v < 0 || u >= vcount || v >= vcount || u >= v)
      throw std::invalid_argument("mnw: bad edge line (need 0 <= u < v < n^d)");
    std::int64_t dist = torus_distance(p, u, v);
    if (dist < lo || dist > hi)
      throw std::invalid_argument("mnw: edge outside the eligible distance window");
    if (!seen.insert(pair_key(vcount, u, v)).second)
      throw std::invalid_argument("mnw: duplicate edge in file");
    out.long_edges.emplace_back(u, v);
  }
  std::sort(out.long_edges.begin(), out.long_edges.end());
  return out;
}

void save_mnw(const std::string& path, const EdgeList& edges) {
  std::ofstream os(path);
  if (!os) throw std::runtime_error("mnw: cannot open '" + path + "' for writing");
  write_mnw(os, edges);
  if (!os.flush()) throw std::runtime_error("mnw: write to '" + path + "' failed");
}

EdgeList load_mnw(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw std::runtime_error("mnw: cannot open '" + path + "'");
  return read_mnw(is);
}

}  // namespace mnw
