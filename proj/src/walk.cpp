#include "mnw/walk.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <mutex>
#include <stdexcept>
#include <string>
#include <unordered_set>

#include "mnw/parallel.hpp"
#include "mnw/rng.hpp"

namespace mnw {

namespace {
constexpr double kMixingThreshold = 0.36787944117144233;  // 1/e
constexpr std::int64_t kRenormInterval = 1024;
}  // namespace

double StationaryDistribution::min() const {
  double m = std::numeric_limits<double>::infinity();
  for (double v : pi) m = std::min(m, v);
  return m;
}

StationaryDistribution stationary(const Graph& g) {
  StationaryDistribution s;
  s.total_degree = static_cast<double>(g.adjacency.size());
  if (s.total_degree == 0) throw std::invalid_argument("mnw: graph has no edges");
  s.pi.resize(static_cast<std::size_t>(g.vertex_count));
  for (Vertex u = 0; u < g.vertex_count; ++u)
    s.pi[u] = static_cast<double>(g.degree(u)) / s.total_degree;
  return s;
}

LazyWalk::LazyWalk(const Graph& g) : g_(&g) {
  inv_two_degree_.resize(static_cast<std::size_t>(g.vertex_count));
  for (Vertex u = 0; u < g.vertex_count; ++u) {
    if (g.degree(u) == 0) throw std::invalid_argument("mnw: isolated vertex in walk graph");
    inv_two_degree_[u] = 1.0 / (2.0 * static_cast<double>(g.degree(u)));
  }
}

void LazyWalk::step_distribution(const std::vector<double>& in, std::vector<double>& out) const {
  const Graph& g = *g_;
  if (static_cast<std::int64_t>(in.size()) != g.vertex_count)
    throw std::invalid_argument("mnw: distribution size does not match the graph");
  out.resize(in.size());
  for (Vertex v = 0; v < g.vertex_count; ++v) {
    double acc = 0.5 * in[v];
    for (std::int64_t i = g.offsets[v]; i < g.offsets[v + 1]; ++i) {
      Vertex u = g.adjacency[i];
      acc += in[u] * inv_two_degree_[u];
    }
    out[v] = acc;
  }
}

void LazyWalk::step_function(const std::vector<double>& in, std::vector<double>& out) const {
  const Graph& g = *g_;
  if (static_cast<std::int64_t>(in.size()) != g.vertex_count)
    throw std::invalid_argument("mnw: vector size does not match the graph");
  out.resize(in.size());
  for (Vertex u = 0; u < g.vertex_count; ++u) {
    double acc = 0;
    for (std::int64_t i = g.offsets[u]; i < g.offsets[u + 1]; ++i) acc += in[g.adjacency[i]];
    out[u] = 0.5 * in[u] + acc * inv_two_degree_[u];
  }
}

std::vector<double> point_mass(std::int64_t size, Vertex at) {
  if (at < 0 || at >= size) throw std::out_of_range("mnw: point mass vertex out of range");
  std::vector<double> mu(static_cast<std::size_t>(size), 0.0);
  mu[at] = 1.0;
  return mu;
}

std::vector<double> kernel_step(const Graph& g, const std::vector<double>& mu) {
  LazyWalk walk(g);
  std::vector<double> out;
  walk.step_distribution(mu, out);
  return out;
}

double tv_distance(const std::vector<double>& mu, const std::vector<double>& nu) {
  if (mu.size() != nu.size()) throw std::invalid_argument("mnw: TV distance dimension mismatch");
  double acc = 0;
  for (std::size_t i = 0; i < mu.size(); ++i) acc += std::abs(mu[i] - nu[i]);
  return 0.5 * acc;
}

namespace {

// advances `mu` by `steps` kernel applications, renormalizing periodically
// and recording the largest mass drift seen
void advance(const LazyWalk& walk, std::vector<double>& mu, std::vector<double>& scratch,
             std::int64_t steps, std::int64_t& since_renorm, double& max_drift) {
  for (std::int64_t s = 0; s < steps; ++s) {
    walk.step_distribution(mu, scratch);
    mu.swap(scratch);
    if (++since_renorm >= kRenormInterval) {
      double mass = 0;
      for (double v : mu) mass += v;
      max_drift = std::max(max_drift, std::abs(mass - 1.0));
      for (double& v : mu) v /= mass;
      since_renorm = 0;
    }
  }
}

struct StartSearch {
  std::int64_t t = 0;
  double tv_at = 0;
  double tv_prev = 1;
  double drift = 0;
};

StartSearch search_from(const LazyWalk& walk, const std::vector<double>& pi, Vertex start,
                        std::int64_t step_cap) {
  const std::int64_t size = walk.graph().vertex_count;
  StartSearch res;
  std::vector<double> mu = point_mass(size, start);
  std::vector<double> scratch(mu.size());
  std::int64_t since_renorm = 0;

  double tv0 = tv_distance(mu, pi);
  if (tv0 < kMixingThreshold) {
    res.t = 0;
    res.tv_at = tv0;
    res.tv_prev = std::numeric_limits<double>::quiet_NaN();
    return res;
  }

  // doubling phase: lo always fails the threshold, hi is the first probe
  // that meets it
  std::vector<double> checkpoint = mu;  // distribution at time lo
  std::int64_t lo = 0, hi = -1;
  double tv_lo = tv0, tv_hi = 0;
  for (std::int64_t target = 1;; target *= 2) {
    if (target > step_cap)
      throw std::runtime_error("mnw: mixing search exceeded the step cap of " +
                               std::to_string(step_cap));
    advance(walk, mu, scratch, target - lo, since_renorm, res.drift);
    double tv = tv_distance(mu, pi);
    if (tv < kMixingThreshold) {
      hi = target;
      tv_hi = tv;
      break;
    }
    lo = target;
    tv_lo = tv;
    checkpoint = mu;
  }

  // binary search on (lo, hi], re-evolving from the checkpoint at lo
  while (hi - lo > 1) {
    std::int64_t mid = lo + (hi - lo) / 2;
    mu = checkpoint;
    advance(walk, mu, scratch, mid - lo, since_renorm, res.drift);
    double tv = tv_distance(mu, pi);
    if (tv < kMixingThreshold) {
      hi = mid;
      tv_hi = tv;
    } else {
      lo = mid;
      tv_lo = tv;
      checkpoint = mu;
    }
  }
  res.t = hi;
  res.tv_at = tv_hi;
  res.tv_prev = tv_lo;
  return res;
}

}  // namespace

std::vector<double> tv_curve(const Graph& g, Vertex start, std::int64_t t_max) {
  LazyWalk walk(g);
  StationaryDistribution s = stationary(g);
  std::vector<double> mu = point_mass(g.vertex_count, start);
  std::vector<double> scratch(mu.size());
  std::vector<double> curve;
  curve.reserve(static_cast<std::size_t>(t_max) + 1);
  curve.push_back(tv_distance(mu, s.pi));
  std::int64_t since_renorm = 0;
  double drift = 0;
  for (std::int64_t t = 1; t <= t_max; ++t) {
    advance(walk, mu, scratch, 1, since_renorm, drift);
    curve.push_back(tv_distance(mu, s.pi));
  }
  return curve;
}

MixingResult mixing_time(const Graph& g, const MixOptions& options) {
  LazyWalk walk(g);
  StationaryDistribution s = stationary(g);

  std::vector<Vertex> starts;
  if (options.all_starts) {
    if (g.vertex_count > options.all_cap)
      throw std::invalid_argument(
          "mnw: all-starts mixing evaluation is capped at " + std::to_string(options.all_cap) +
          " vertices; use sampled starts");
    starts.resize(static_cast<std::size_t>(g.vertex_count));
    for (Vertex u = 0; u < g.vertex_count; ++u) starts[u] = u;
  } else {
    std::unordered_set<Vertex> picked;
    // adversarial start: the far endpoint of a double sweep
    std::vector<std::int32_t> d0 = bfs_distances(g, 0);
    Vertex a = 0;
    for (Vertex u = 0; u < g.vertex_count; ++u)
      if (d0[u] > d0[a]) a = u;
    std::vector<std::int32_t> d1 = bfs_distances(g, a);
    Vertex far = a;
    for (Vertex u = 0; u < g.vertex_count; ++u)
      if (d1[u] > d1[far]) far = u;
    picked.insert(far);
    SplitRng rng(options.sample_seed, 0x6d6978ULL);
    std::int64_t want = std::min<std::int64_t>(
        g.vertex_count, static_cast<std::int64_t>(options.sample_count) + 1);
    while (static_cast<std::int64_t>(picked.size()) < want)
      picked.insert(static_cast<Vertex>(rng.next_below(static_cast<std::uint64_t>(g.vertex_count))));
    starts.assign(picked.begin(), picked.end());
    std::sort(starts.begin(), starts.end());
  }

  std::vector<StartSearch> results(starts.size());
  std::exception_ptr failure;
  std::mutex failure_mutex;
  parallel_for(static_cast<std::int64_t>(starts.size()), options.threads, [&](std::int64_t i) {
    try {
      results[i] = search_from(walk, s.pi, starts[i], options.step_cap);
    } catch (...) {
      std::lock_guard<std::mutex> lock(failure_mutex);
      if (!failure) failure = std::current_exception();
    }
  });
  if (failure) std::rethrow_exception(failure);

  MixingResult out;
  out.exact = options.all_starts;
  out.starts_evaluated = static_cast<std::int64_t>(starts.size());
  std::size_t best = 0;
  for (std::size_t i = 1; i < results.size(); ++i)
    if (results[i].t > results[best].t) best = i;
  out.t_mix = results[best].t;
  out.worst_start = starts[best];
  out.tv_at_t_mix = results[best].tv_at;
  out.tv_at_prev = results[best].tv_prev;
  for (const auto& r : results) out.max_renorm_drift = std::max(out.max_renorm_drift, r.drift);
  return out;
}

double spectral_gap(const Graph& g, double tol, std::int64_t iteration_cap,
                    std::vector<double>* eigenvector) {
  if (g.vertex_count < 2) throw std::invalid_argument("mnw: spectral gap needs >= 2 vertices");
  LazyWalk walk(g);
  StationaryDistribution s = stationary(g);
  const auto& pi = s.pi;
  const std::size_t size = pi.size();

  auto pi_dot = [&](const std::vector<double>& a, const std::vector<double>& b) {
    double acc = 0;
    for (std::size_t i = 0; i < size; ++i) acc += pi[i] * a[i] * b[i];
    return acc;
  };
  auto deflate = [&](std::vector<double>& x) {
    double mean = 0;
    for (std::size_t i = 0; i < size; ++i) mean += pi[i] * x[i];
    for (double& v : x) v -= mean;
  };

  std::vector<double> x(size);
  SplitRng rng(0x57ec7ea1ULL, 0);  // fixed start vector keeps runs reproducible
  for (std::size_t i = 0; i < size; ++i) x[i] = rng.next_unit() - 0.5;
  deflate(x);
  double nrm = std::sqrt(pi_dot(x, x));
  if (nrm == 0) throw std::runtime_error("mnw: degenerate start vector");
  for (double& v : x) v /= nrm;

  std::vector<double> y(size);
  double rho_prev = -1;
  int stable = 0;
  for (std::int64_t iter = 0; iter < iteration_cap; ++iter) {
    walk.step_function(x, y);
    double rho = pi_dot(x, y);
    deflate(y);
    double ny = std::sqrt(pi_dot(y, y));
    if (ny < 1e-150) {
      // the deflated operator annihilates everything: lambda_1 = 0
      if (eigenvector) *eigenvector = x;
      return 1.0;
    }
    for (std::size_t i = 0; i < size; ++i) x[i] = y[i] / ny;
    double gap_scale = std::max(1.0 - rho, 1e-15);
    if (std::abs(rho - rho_prev) <= tol * gap_scale) {
      if (++stable >= 8) {
        if (eigenvector) *eigenvector = x;
        return std::clamp(1.0 - rho, 0.0, 1.0);
      }
    } else {
      stable = 0;
    }
    rho_prev = rho;
  }
  throw std::runtime_error("mnw: spectral power iteration hit the iteration cap");
}

TmixBound upper_bound_tmix(const Graph& g, double tol) {
  TmixBound b;
  b.gap = spectral_gap(g, tol);
  b.pi_min = stationary(g).min();
  b.bound = (1.0 - std::log(b.pi_min)) / b.gap;
  return b;
}

}  // namespace mnw
