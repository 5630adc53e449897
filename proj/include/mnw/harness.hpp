// Experiment runner: parameter sweeps over the model grid with deterministic
// per-replicate seeds, resumable CSV records, polylog exponent fits, and the
// empty-box frequency study.
#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "mnw/torus.hpp"

namespace mnw {

enum class Measure { diameter, mixing, gap, max_degree, boxes };

std::string measure_name(Measure m);
Measure measure_from_name(const std::string& name);

struct ResourceCaps {
  std::int64_t max_vertices = std::int64_t(1) << 26;          // hard cell cap
  std::int64_t diameter_exact_max = std::int64_t(1) << 24;    // above: sampled mode
  int diameter_sample_count = 32;
  std::int64_t mixing_all_max = 4096;                         // above: sampled starts
  int mixing_sample_count = 32;
  std::int64_t mixing_step_cap = std::int64_t(1) << 22;
  std::int64_t gap_max = std::int64_t(1) << 20;               // above: skipped
  double gap_tol = 1e-9;
};

struct ExperimentConfig {
  std::vector<int> d = {1};
  std::vector<std::int64_t> n;
  std::vector<double> alpha = {0.1};
  std::vector<double> beta = {0.4};
  std::vector<double> sigma = {1.0};
  std::vector<double> zeta = {0.0};
  int replicates = 1;
  std::uint64_t base_seed = 0;
  std::vector<Measure> measurements = {Measure::diameter};
  double box_r = 0.5;
  ResourceCaps caps;
  bool strict = false;

  // grid cells in deterministic nesting order (d, n, alpha, beta, sigma, zeta)
  std::vector<ModelParams> cells() const;
  void validate() const;  // every cell must pass ModelParams validation
};

ExperimentConfig parse_experiment_config(const std::string& json_text);
ExperimentConfig load_experiment_config(const std::string& path);

struct ScalingRecord {
  ModelParams params;  // seed already replicate-derived
  int replicate = 0;
  Measure measure = Measure::diameter;
  double value = 0;
  bool exact = false;
  bool skipped = false;
  std::string skip_reason;
  double wall_ms = 0;
};

// replicate seed: base xor hash(cell, replicate)
std::uint64_t cell_seed(std::uint64_t base, const ModelParams& cell, int replicate);

// Runs every (cell, replicate) not already present in the CSV at `csv_path`
// (resumable; rows are appended in deterministic order). Returns the full
// record set for the config. Empty path disables persistence.
std::vector<ScalingRecord> run_scan(const ExperimentConfig& config, const std::string& csv_path,
                                    int threads = 1);

std::vector<ScalingRecord> read_records_csv(const std::string& path);

struct FitResult {
  double slope = 0;
  double intercept = 0;
  double ci_lower = 0;  // bootstrap 2.5%
  double ci_upper = 0;  // bootstrap 97.5%
  int n_values = 0;
  std::int64_t records_used = 0;
};

// least-squares slope of ln(median response) against ln ln n, with a
// seeded bootstrap over replicates (1000 resamples)
FitResult fit_polylog_exponent(std::span<const ScalingRecord> records, Measure response,
                               std::uint64_t bootstrap_seed = 1234, int bootstrap_rounds = 1000);

// fraction of `trials` derived seeds whose edge sample leaves at least one
// empty box of exponent r
double empty_box_frequency(const ModelParams& cell, double r, int trials, int threads = 1);

}  // namespace mnw
