// Inequality toolkit: binomial large-deviation rate functions and exact
// tails, exact conductance / edge-isoperimetry by subset enumeration, a
// spectral sweep-cut bracket, the degree-isoperimetry diameter bound, and
// the empty-box probe for long-edge-free regions.
#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "mnw/gen.hpp"
#include "mnw/graph.hpp"

namespace mnw {

// rate function I(z) = z ln(zq/((1-z)p)) - ln(q/(1-z)); equals the
// Bernoulli relative entropy between z and p
double rate_I(double z, double p);

// small-p rate gamma(z) = z ln z - z + 1; zero exactly at z = 1
double gamma_rate(double z);

enum class TailSide { upper, lower };

// exact P(Z >= z n) (upper) or P(Z <= z n) (lower) for Z ~ Binomial(n, p),
// by stable log-space summation; n is capped at 1e5
double binomial_tail(std::int64_t n, double p, double z, TailSide side);
double log_binomial_tail(std::int64_t n, double p, double z, TailSide side);

struct LdGrid {
  // rate-function family: exact tails vs exp(-I(z) n) on both sides
  std::vector<std::int64_t> trial_counts = {10, 100, 1000, 10000};
  std::vector<double> probs = {0.5, 0.1, 0.01};
  int z_points = 21;  // per side, strictly inside (p,1) resp. (0,p)

  // small-p family: thresholds z*p*n against the gamma-rate bounds and the
  // plain exp(-z p n) bound
  std::vector<std::int64_t> small_trial_counts = {1000, 10000, 100000};
  std::vector<double> small_probs = {0.001, 0.01};
  std::vector<double> z_above_mean = {1.5, 2, 3, 4, 5, 6, 7, 8, 10, 16};
  std::vector<double> z_below_mean = {0.1, 0.25, 0.5, 0.75, 0.9};
};

struct LdViolation {
  std::string family;
  std::int64_t n = 0;
  double p = 0, z = 0;
  double log_exact = 0, log_bound = 0;
  bool asserted = false;
};

struct LdReport {
  std::int64_t checked_rate = 0, violations_rate = 0;            // asserted
  std::int64_t checked_small_lower = 0, violations_small_lower = 0;  // asserted on p in [1e-3, 1e-2]
  std::int64_t checked_small_upper = 0, violations_small_upper = 0;  // reported only
  std::int64_t checked_linear = 0;
  std::int64_t violations_linear_asserted = 0;  // asserted where gamma(z) >= z
  std::int64_t violations_linear_reported = 0;
  std::vector<LdViolation> violations;

  bool asserted_clean() const {
    return violations_rate == 0 && violations_small_lower == 0 &&
           violations_linear_asserted == 0;
  }
};

LdReport check_ld_bounds(const LdGrid& grid);

enum class BoundKind { exact, upper_bound, lower_bound };

struct IsoperimetryResult {
  double value = 0;
  std::vector<Vertex> minimizer;  // empty unless exact
  std::string method;             // "brute" or "sweep"
  BoundKind kind = BoundKind::exact;
  std::int64_t cut = 0, denom = 0;  // value = cut/denom (halved for conductance)
};

// exact h = (1/2) min over pi(S) <= 1/2 of cut(S)/vol(S); subset
// enumeration with Gray-code incremental updates, capped at 24 vertices
IsoperimetryResult conductance_exact(const Graph& g, int threads = 1);

// exact iota = min over |S| <= |V|/2 of cut(S)/|S|
IsoperimetryResult isoperimetric_exact(const Graph& g, int threads = 1);

struct ConductanceBracket {
  double lower = 0;  // gap/2, from the Cheeger inequality
  double upper = 1;  // best sweep cut of the second eigenvector ordering
  std::vector<Vertex> best_sweep_set;
  double gap = 0;
};

ConductanceBracket conductance_sweep(const Graph& g, double tol = 1e-9);

struct DiameterBoundReport {
  std::int64_t diameter = 0;
  std::int64_t max_deg = 0;
  double iota = 0;
  bool iota_exact = false;
  double bound = 0;  // 4 * max_deg / iota * ln |V|
  bool holds = false;
  bool certified = false;  // exact iota or a true lower bound on it
};

// checks diam <= 4 Delta / iota * ln|V|; uses exact iota when none is given
DiameterBoundReport diameter_bound_check(const Graph& g,
                                         std::optional<IsoperimetryResult> iota = std::nullopt,
                                         int threads = 1);

struct EmptyBoxScan {
  std::int64_t side = 0;                // ceil(2 ln^r n)
  std::vector<Vertex> origins;          // boxes with no crossing long edge
};

// every torus-anchored axis-aligned box of side ceil(2 ln^r n) such that no
// long edge has exactly one endpoint inside
EmptyBoxScan empty_box_scan(const EdgeList& edges, double r);

}  // namespace mnw
