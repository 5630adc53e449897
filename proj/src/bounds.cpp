#include "mnw/bounds.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "mnw/parallel.hpp"
#include "mnw/walk.hpp"

namespace mnw {

double rate_I(double z, double p) {
  if (!(z > 0.0 && z < 1.0) || !(p > 0.0 && p < 1.0))
    throw std::invalid_argument("mnw: rate function needs z, p in (0,1)");
  double q = 1.0 - p;
  return z * std::log(z * q / ((1.0 - z) * p)) - std::log(q / (1.0 - z));
}

double gamma_rate(double z) {
  if (!(z > 0.0)) throw std::invalid_argument("mnw: gamma rate needs z > 0");
  return z * std::log(z) - z + 1.0;
}

namespace {

constexpr std::int64_t kTailCap = 100000;

double log_tail_sum(std::int64_t n, double p, std::int64_t from, std::int64_t to) {
  // log of sum_{k=from..to} C(n,k) p^k q^(n-k)
  const double lp = std::log(p), lq = std::log1p(-p);
  const double lgn = std::lgamma(static_cast<double>(n) + 1.0);
  std::vector<double> terms;
  terms.reserve(static_cast<std::size_t>(to - from + 1));
  double peak = -std::numeric_limits<double>::infinity();
  for (std::int64_t k = from; k <= to; ++k) {
    double t = lgn - std::lgamma(static_cast<double>(k) + 1.0) -
               std::lgamma(static_cast<double>(n - k) + 1.0) +
               static_cast<double>(k) * lp + static_cast<double>(n - k) * lq;
    terms.push_back(t);
    peak = std::max(peak, t);
  }
  double acc = 0;
  for (double t : terms) acc += std::exp(t - peak);
  return peak + std::log(acc);
}

}  // namespace

double log_binomial_tail(std::int64_t n, double p, double z, TailSide side) {
  if (n < 1 || n > kTailCap)
    throw std::invalid_argument("mnw: exact tail summation supports 1 <= n <= 1e5");
  if (!(p > 0.0 && p < 1.0)) throw std::invalid_argument("mnw: tail needs p in (0,1)");
  if (!(z >= 0.0)) throw std::invalid_argument("mnw: tail threshold must be nonnegative");
  const double threshold = z * static_cast<double>(n);
  if (side == TailSide::upper) {
    auto k0 = static_cast<std::int64_t>(std::ceil(threshold - 1e-9));
    if (k0 > n) return -std::numeric_limits<double>::infinity();
    if (k0 <= 0) return 0.0;  // log 1
    return log_tail_sum(n, p, k0, n);
  }
  auto k1 = static_cast<std::int64_t>(std::floor(threshold + 1e-9));
  if (k1 < 0) return -std::numeric_limits<double>::infinity();
  if (k1 >= n) return 0.0;
  return log_tail_sum(n, p, 0, k1);
}

double binomial_tail(std::int64_t n, double p, double z, TailSide side) {
  return std::exp(log_binomial_tail(n, p, z, side));
}

namespace {

// relative slack absorbing the ~1e-14 rounding of the log-space sums, so a
// reported violation is a real one
constexpr double kLogSlack = 1e-11;

void record(LdReport& report, const std::string& family, std::int64_t n, double p, double z,
            double log_exact, double log_bound, bool asserted, std::int64_t& violation_counter) {
  if (log_exact <= log_bound + kLogSlack) return;
  ++violation_counter;
  report.violations.push_back({family, n, p, z, log_exact, log_bound, asserted});
}

}  // namespace

LdReport check_ld_bounds(const LdGrid& grid) {
  LdReport report;

  // exact tails against exp(-I(z) n), both sides, every valid grid point
  for (std::int64_t n : grid.trial_counts)
    for (double p : grid.probs)
      for (int j = 1; j <= grid.z_points; ++j) {
        double frac = static_cast<double>(j) / (grid.z_points + 1);
        double zu = p + (1.0 - p) * frac;
        report.checked_rate++;
        record(report, "rate-upper", n, p, zu, log_binomial_tail(n, p, zu, TailSide::upper),
               -rate_I(zu, p) * static_cast<double>(n), true, report.violations_rate);
        double zl = p * frac;
        report.checked_rate++;
        record(report, "rate-lower", n, p, zl, log_binomial_tail(n, p, zl, TailSide::lower),
               -rate_I(zl, p) * static_cast<double>(n), true, report.violations_rate);
      }

  // small-p forms with thresholds z*p*n
  for (std::int64_t n : grid.small_trial_counts)
    for (double p : grid.small_probs) {
      const double pn = p * static_cast<double>(n);
      const bool assert_lower = p >= 1e-3 && p <= 1e-2;
      for (double z : grid.z_below_mean) {
        report.checked_small_lower++;
        record(report, "small-p-lower", n, p, z,
               log_binomial_tail(n, p, z * p, TailSide::lower), -0.5 * gamma_rate(z) * pn,
               assert_lower,
               assert_lower ? report.violations_small_lower : report.violations_small_upper);
      }
      for (double z : grid.z_above_mean) {
        double log_exact = log_binomial_tail(n, p, z * p, TailSide::upper);
        report.checked_small_upper++;
        record(report, "small-p-upper", n, p, z, log_exact, -gamma_rate(z) * pn, false,
               report.violations_small_upper);
        // the plain exponential bound carries only where gamma(z) >= z
        report.checked_linear++;
        bool asserted = gamma_rate(z) >= z;
        record(report, "linear", n, p, z, log_exact, -z * pn, asserted,
               asserted ? report.violations_linear_asserted : report.violations_linear_reported);
      }
    }
  return report;
}

namespace {

struct CutState {
  std::uint32_t mask = 0;
  std::int64_t size = 0, volume = 0, cut = 0;
};

CutState state_for_mask(const Graph& g, const std::vector<std::uint32_t>& adj_mask,
                        std::uint32_t mask) {
  CutState s;
  s.mask = mask;
  std::int64_t internal_directed = 0;
  for (Vertex u = 0; u < g.vertex_count; ++u) {
    if (!(mask >> u & 1u)) continue;
    s.size++;
    s.volume += g.degree(u);
    internal_directed += std::popcount(adj_mask[u] & mask);
  }
  s.cut = s.volume - internal_directed;
  return s;
}

void flip_vertex(const Graph& g, const std::vector<std::uint32_t>& adj_mask, CutState& s, int b) {
  std::uint32_t bit = 1u << b;
  std::int64_t deg = g.degree(b);
  if (s.mask & bit) {
    s.mask ^= bit;
    std::int64_t inside = std::popcount(adj_mask[b] & s.mask);
    s.cut -= deg - 2 * inside;
    s.volume -= deg;
    s.size--;
  } else {
    std::int64_t inside = std::popcount(adj_mask[b] & s.mask);
    s.cut += deg - 2 * inside;
    s.volume += deg;
    s.size++;
    s.mask ^= bit;
  }
}

struct ExactMin {
  std::int64_t cut = 0, denom = 0;    // best ratio cut/denom
  std::uint32_t counter = 0;          // Gray counter for the minimizer
  bool found = false;

  // exact rational comparison; ties keep the earliest counter
  void offer(std::int64_t cut_candidate, std::int64_t denom_candidate, std::uint32_t c) {
    if (denom_candidate <= 0) return;
    if (!found || cut_candidate * denom < cut * denom_candidate ||
        (cut_candidate * denom == cut * denom_candidate && c < counter)) {
      cut = cut_candidate;
      denom = denom_candidate;
      counter = c;
      found = true;
    }
  }
};

IsoperimetryResult exact_cut_minimum(const Graph& g, bool conductance, int threads) {
  const std::int64_t v = g.vertex_count;
  if (v < 2) throw std::invalid_argument("mnw: subset enumeration needs >= 2 vertices");
  if (v > 24)
    throw std::invalid_argument("mnw: exact subset enumeration is capped at 24 vertices");
  std::vector<std::uint32_t> adj_mask(static_cast<std::size_t>(v), 0);
  for (Vertex u = 0; u < v; ++u)
    for (std::int64_t i = g.offsets[u]; i < g.offsets[u + 1]; ++i)
      adj_mask[u] |= 1u << g.adjacency[i];

  const std::int64_t total_degree = static_cast<std::int64_t>(g.adjacency.size());
  // Gray counters 1 .. 2^v - 1 cover every nonzero mask; the full set is
  // skipped by the size check
  const std::int64_t span = (std::int64_t(1) << v) - 1;
  int workers = resolve_threads(threads);
  workers = static_cast<int>(std::min<std::int64_t>(workers, span));
  std::vector<ExactMin> mins(workers);

  parallel_for(workers, workers, [&](std::int64_t w) {
    std::uint32_t lo = 1 + static_cast<std::uint32_t>(span * w / workers);
    std::uint32_t hi = 1 + static_cast<std::uint32_t>(span * (w + 1) / workers);
    CutState s = state_for_mask(g, adj_mask, lo ^ (lo >> 1));
    ExactMin& best = mins[w];
    for (std::uint32_t c = lo;; ++c) {
      if (s.size > 0 && s.size < v) {
        if (conductance) {
          if (2 * s.volume <= total_degree) best.offer(s.cut, s.volume, c);
        } else {
          if (2 * s.size <= v) best.offer(s.cut, s.size, c);
        }
      }
      if (c + 1 >= hi) break;
      flip_vertex(g, adj_mask, s, std::countr_zero(c + 1));
    }
  });

  ExactMin best;
  for (const auto& m : mins)
    if (m.found) best.offer(m.cut, m.denom, m.counter);
  if (!best.found) throw std::runtime_error("mnw: no feasible subset found");

  IsoperimetryResult out;
  out.method = "brute";
  out.kind = BoundKind::exact;
  out.cut = best.cut;
  out.denom = best.denom;
  out.value = (conductance ? 0.5 : 1.0) * static_cast<double>(best.cut) /
              static_cast<double>(best.denom);
  std::uint32_t mask = best.counter ^ (best.counter >> 1);
  for (Vertex u = 0; u < v; ++u)
    if (mask >> u & 1u) out.minimizer.push_back(u);
  return out;
}

}  // namespace

IsoperimetryResult conductance_exact(const Graph& g, int threads) {
  return exact_cut_minimum(g, true, threads);
}

IsoperimetryResult isoperimetric_exact(const Graph& g, int threads) {
  return exact_cut_minimum(g, false, threads);
}

ConductanceBracket conductance_sweep(const Graph& g, double tol) {
  ConductanceBracket out;
  std::vector<double> vec;
  out.gap = spectral_gap(g, tol, 1'000'000, &vec);
  out.lower = out.gap / 2.0;

  std::vector<Vertex> order(static_cast<std::size_t>(g.vertex_count));
  for (Vertex u = 0; u < g.vertex_count; ++u) order[u] = u;
  std::sort(order.begin(), order.end(), [&](Vertex a, Vertex b) {
    if (vec[a] != vec[b]) return vec[a] > vec[b];
    return a < b;
  });

  const std::int64_t total_degree = static_cast<std::int64_t>(g.adjacency.size());
  std::vector<std::uint8_t> in_set(static_cast<std::size_t>(g.vertex_count), 0);
  std::int64_t volume = 0, cut = 0;
  double best = std::numeric_limits<double>::infinity();
  std::size_t best_prefix = 0;
  for (std::size_t k = 0; k + 1 < order.size(); ++k) {
    Vertex u = order[k];
    std::int64_t inside = 0;
    for (std::int64_t i = g.offsets[u]; i < g.offsets[u + 1]; ++i)
      inside += in_set[g.adjacency[i]];
    cut += g.degree(u) - 2 * inside;
    volume += g.degree(u);
    in_set[u] = 1;
    std::int64_t feas = std::min(volume, total_degree - volume);
    double candidate = 0.5 * static_cast<double>(cut) / static_cast<double>(feas);
    if (candidate < best) {
      best = candidate;
      best_prefix = k + 1;
    }
  }
  out.upper = best;
  out.best_sweep_set.assign(order.begin(), order.begin() + best_prefix);
  std::sort(out.best_sweep_set.begin(), out.best_sweep_set.end());
  return out;
}

DiameterBoundReport diameter_bound_check(const Graph& g, std::optional<IsoperimetryResult> iota,
                                         int threads) {
  DiameterBoundReport r;
  if (!iota) iota = isoperimetric_exact(g, threads);
  r.iota = iota->value;
  r.iota_exact = iota->kind == BoundKind::exact;
  r.certified = iota->kind != BoundKind::upper_bound;
  r.diameter = diameter_exact(g, threads).value;
  r.max_deg = max_degree(g);
  r.bound = 4.0 * static_cast<double>(r.max_deg) / r.iota *
            std::log(static_cast<double>(g.vertex_count));
  r.holds = static_cast<double>(r.diameter) <= r.bound * (1.0 + 1e-12);
  return r;
}

EmptyBoxScan empty_box_scan(const EdgeList& edges, double r) {
  const ModelParams& p = edges.params;
  p.validate();
  if (!(r > 0.0)) throw std::invalid_argument("mnw: box exponent must be positive");
  EmptyBoxScan out;
  double side_real = 2.0 * std::pow(std::log(static_cast<double>(p.n)), r);
  out.side = static_cast<std::int64_t>(std::ceil(side_real - 1e-9));
  if (out.side >= p.n)
    throw std::invalid_argument("mnw: box side reaches the torus size; pick a smaller exponent");
  const std::int64_t s = out.side;
  const std::int64_t vcount = p.vertex_count();

  std::vector<std::uint8_t> crossed(static_cast<std::size_t>(vcount), 0);
  auto contains = [&](const Coords& origin, const Coords& point) {
    for (int k = 0; k < p.d; ++k) {
      std::int64_t rel = point.x[k] - origin.x[k];
      if (rel < 0) rel += p.n;
      if (rel >= s) return false;
    }
    return true;
  };
  // mark every origin whose box contains `inside` but not `outside`
  auto mark = [&](const Coords& inside, const Coords& outside) {
    Coords origin;
    std::array<std::int64_t, kMaxDim> step{};
    for (int k = 0; k < p.d; ++k) step[k] = 0;
    for (;;) {
      for (int k = 0; k < p.d; ++k) {
        std::int64_t o = inside.x[k] - step[k];
        if (o < 0) o += p.n;
        origin.x[k] = o;
      }
      if (!contains(origin, outside)) crossed[encode_vertex(p, origin)] = 1;
      int k = 0;
      while (k < p.d && ++step[k] == s) step[k++] = 0;
      if (k == p.d) break;
    }
  };

  for (const auto& [u, v] : edges.long_edges) {
    Coords cu = decode_vertex(p, u), cv = decode_vertex(p, v);
    mark(cu, cv);
    mark(cv, cu);
  }
  for (Vertex o = 0; o < vcount; ++o)
    if (!crossed[o]) out.origins.push_back(o);
  return out;
}

}  // namespace mnw
