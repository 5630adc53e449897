#include "mnw/torus.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

namespace mnw {

namespace {

// vertex counts are capped so that an unordered pair packs into a u64 key
constexpr std::int64_t kMaxVertices = std::int64_t(1) << 31;

std::int64_t checked_pow(std::int64_t base, int exp) {
  std::int64_t r = 1;
  for (int i = 0; i < exp; ++i) {
    if (r > kMaxVertices / base) return -1;
    r *= base;
  }
  return r;
}

std::int64_t ipow(std::int64_t base, int exp) {
  std::int64_t r = 1;
  for (int i = 0; i < exp; ++i) r *= base;
  return r;
}

}  // namespace

std::int64_t ModelParams::vertex_count() const {
  std::int64_t v = checked_pow(n, d);
  if (v < 0) throw std::invalid_argument("mnw: n^d exceeds the supported vertex cap");
  return v;
}

double ModelParams::edge_probability() const {
  return sigma * std::pow(static_cast<double>(n), -d) *
         std::pow(std::log(static_cast<double>(n)), zeta);
}

double ModelParams::annulus_fraction() const {
  return std::pow(2.0 * beta, d) - std::pow(2.0 * alpha, d);
}

// The window is the set of integers in the real interval [alpha*n, beta*n].
// The 1e-9 nudge keeps endpoints that are exact integers in decimal from
// falling out through binary rounding of alpha*n.
std::int64_t ModelParams::window_lo() const {
  auto lo = static_cast<std::int64_t>(std::ceil(alpha * static_cast<double>(n) - 1e-9));
  return lo < 1 ? 1 : lo;
}

std::int64_t ModelParams::window_hi() const {
  auto hi = static_cast<std::int64_t>(std::floor(beta * static_cast<double>(n) + 1e-9));
  std::int64_t cap = (n - 1) / 2;  // beta < 1/2 keeps the shell wrap-free
  return hi > cap ? cap : hi;
}

void ModelParams::validate() const {
  if (d < 1 || d > kMaxDim) throw std::invalid_argument("mnw: d must be in [1, 8]");
  if (n < 3) throw std::invalid_argument("mnw: n must be at least 3");
  if (!(alpha > 0.0 && alpha < beta && beta < 0.5))
    throw std::invalid_argument("mnw: need 0 < alpha < beta < 1/2");
  if (!(sigma >= 0.0)) throw std::invalid_argument("mnw: sigma must be nonnegative");
  vertex_count();  // throws on overflow
  double p = edge_probability();
  if (!(p >= 0.0 && p <= 1.0))
    throw std::invalid_argument("mnw: p_n = " + std::to_string(p) +
                                " is outside [0, 1]; refusing to clamp");
}

Vertex encode_vertex(const ModelParams& params, const Coords& c) {
  Vertex v = 0;
  for (int s = 0; s < params.d; ++s) {
    if (c.x[s] < 0 || c.x[s] >= params.n) throw std::out_of_range("mnw: coordinate out of range");
    v = v * params.n + c.x[s];
  }
  return v;
}

Coords decode_vertex(const ModelParams& params, Vertex v) {
  if (v < 0 || v >= params.vertex_count()) throw std::out_of_range("mnw: vertex index out of range");
  Coords c;
  for (int s = params.d - 1; s >= 0; --s) {
    c.x[s] = v % params.n;
    v /= params.n;
  }
  return c;
}

std::int64_t torus_distance(const ModelParams& params, Vertex u, Vertex v) {
  Coords a = decode_vertex(params, u);
  Coords b = decode_vertex(params, v);
  std::int64_t best = 0;
  for (int s = 0; s < params.d; ++s) {
    std::int64_t diff = a.x[s] - b.x[s];
    if (diff < 0) diff = -diff;
    std::int64_t wrapped = params.n - diff;
    std::int64_t ds = diff < wrapped ? diff : wrapped;
    if (ds > best) best = ds;
  }
  return best;
}

namespace {

// enumerate offsets in [-hi, hi]^d with max-norm >= lo; the inner cube is
// skipped at the last digit so the walk is O(result size)
void emit_shell(const ModelParams& params, std::int64_t lo, std::int64_t hi, int depth,
                bool satisfied, Coords& offset, Vertex u, std::vector<Vertex>& out) {
  if (depth == params.d) {
    out.push_back(apply_offset(params, u, offset));
    return;
  }
  bool last = depth == params.d - 1;
  for (std::int64_t v = -hi; v <= hi; ++v) {
    if (last && !satisfied && v > -lo && v < lo) {
      v = lo - 1;  // jump over the hole
      continue;
    }
    offset.x[depth] = v;
    emit_shell(params, lo, hi, depth + 1, satisfied || v <= -lo || v >= lo, offset, u, out);
  }
}

}  // namespace

std::vector<Vertex> annulus(const ModelParams& params, Vertex u) {
  decode_vertex(params, u);  // range check
  std::int64_t lo = params.window_lo(), hi = params.window_hi();
  std::vector<Vertex> out;
  if (lo > hi) return out;
  out.reserve(static_cast<std::size_t>(annulus_size(params)));
  Coords offset;
  emit_shell(params, lo, hi, 0, false, offset, u, out);
  std::sort(out.begin(), out.end());
  return out;
}

std::int64_t annulus_size(const ModelParams& params) {
  std::int64_t lo = params.window_lo(), hi = params.window_hi();
  if (lo > hi) return 0;
  return ipow(2 * hi + 1, params.d) - ipow(2 * lo - 1, params.d);
}

Coords annulus_offset_at(const ModelParams& params, std::int64_t j) {
  std::int64_t lo = params.window_lo(), hi = params.window_hi();
  if (lo > hi || j < 0 || j >= annulus_size(params))
    throw std::out_of_range("mnw: annulus offset rank out of range");
  int d = params.d;
  std::int64_t full = 2 * hi + 1;    // values per free digit
  std::int64_t inner = 2 * lo - 1;   // values per digit inside the hole
  std::int64_t wing = hi - lo + 1;   // values per outer wing
  Coords offset;
  bool satisfied = false;
  for (int s = 0; s < d; ++s) {
    int rest = d - s - 1;
    if (satisfied) {
      std::int64_t block = ipow(full, rest);
      offset.x[s] = -hi + j / block;
      j %= block;
      continue;
    }
    std::int64_t free_block = ipow(full, rest);
    std::int64_t constrained_block = free_block - ipow(inner, rest);
    // ascending digit order: low wing, hole, high wing
    if (j < wing * free_block) {
      offset.x[s] = -hi + j / free_block;
      j %= free_block;
      satisfied = true;
    } else if (j < wing * free_block + inner * constrained_block) {
      std::int64_t k = j - wing * free_block;
      offset.x[s] = -(lo - 1) + k / constrained_block;
      j = k % constrained_block;
    } else {
      std::int64_t k = j - wing * free_block - inner * constrained_block;
      offset.x[s] = lo + k / free_block;
      j = k % free_block;
      satisfied = true;
    }
  }
  return offset;
}

Vertex apply_offset(const ModelParams& params, Vertex u, const Coords& offset) {
  Coords c = decode_vertex(params, u);
  for (int s = 0; s < params.d; ++s) {
    std::int64_t x = c.x[s] + offset.x[s];
    x %= params.n;
    if (x < 0) x += params.n;
    c.x[s] = x;
  }
  return encode_vertex(params, c);
}

}  // namespace mnw
