// Lazy random walk on a graph: kernel evolution, total-variation distance,
// measured mixing time, and the spectral gap by deflated power iteration.
#pragma once

#include <cstdint>
#include <vector>

#include "mnw/graph.hpp"

namespace mnw {

struct StationaryDistribution {
  std::vector<double> pi;  // degree(u) / D
  double total_degree = 0;

  double min() const;
};

StationaryDistribution stationary(const Graph& g);

// holds with probability 1/2, else moves to a uniform neighbor
class LazyWalk {
 public:
  explicit LazyWalk(const Graph& g);

  // distribution step: out(v) = in(v)/2 + sum_{u~v} in(u) / (2 deg u)
  void step_distribution(const std::vector<double>& in, std::vector<double>& out) const;
  // function step: out(u) = in(u)/2 + (sum_{v~u} in(v)) / (2 deg u)
  void step_function(const std::vector<double>& in, std::vector<double>& out) const;

  const Graph& graph() const { return *g_; }

 private:
  const Graph* g_;
  std::vector<double> inv_two_degree_;
};

std::vector<double> point_mass(std::int64_t size, Vertex at);
std::vector<double> kernel_step(const Graph& g, const std::vector<double>& mu);
double tv_distance(const std::vector<double>& mu, const std::vector<double>& nu);

// TV to stationarity after each step t = 0..t_max from one start; the
// linear-scan companion of the mixing-time search
std::vector<double> tv_curve(const Graph& g, Vertex start, std::int64_t t_max);

struct MixingResult {
  std::int64_t t_mix = 0;
  bool exact = false;  // true iff every start was evaluated
  Vertex worst_start = 0;
  double tv_at_t_mix = 0;
  double tv_at_prev = 1;  // TV one step earlier for the worst start
  std::int64_t starts_evaluated = 0;
  double max_renorm_drift = 0;
};

struct MixOptions {
  bool all_starts = true;
  int sample_count = 32;        // used when all_starts is false
  std::uint64_t sample_seed = 0;
  std::int64_t all_cap = 4096;  // refuse all-starts evaluation above this
  std::int64_t step_cap = std::int64_t(1) << 22;
  int threads = 1;
};

// First t with worst-start TV below 1/e. Exact over all starts, or a
// certified lower bound over sampled starts plus a far-eccentricity start.
// Per start: double t until TV < 1/e, then binary search from checkpoints
// (TV to stationarity is non-increasing in t).
MixingResult mixing_time(const Graph& g, const MixOptions& options);

// spectral gap 1 - lambda_1 of the lazy kernel via power iteration in the
// pi-weighted inner product, deflating the stationary component every step
double spectral_gap(const Graph& g, double tol = 1e-9,
                    std::int64_t iteration_cap = 1'000'000,
                    std::vector<double>* eigenvector = nullptr);

struct TmixBound {
  double bound = 0;  // ln(e / pi_min) / (1 - lambda_1)
  double pi_min = 0;
  double gap = 0;
};

TmixBound upper_bound_tmix(const Graph& g, double tol = 1e-9);

}  // namespace mnw
