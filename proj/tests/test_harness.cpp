#include "doctest.h"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>
#include <unistd.h>

#include "mnw/harness.hpp"

using namespace mnw;

namespace {

struct TempDir {
  std::filesystem::path path;
  TempDir() {
    path = std::filesystem::temp_directory_path() /
           ("mnw_harness_" + std::to_string(::getpid()));
    std::filesystem::create_directories(path);
  }
  ~TempDir() { std::filesystem::remove_all(path); }
  std::string file(const std::string& name) const { return (path / name).string(); }
};

ExperimentConfig small_config() {
  ExperimentConfig c;
  c.n = {16, 24, 32, 48};
  c.sigma = {0.0};
  c.replicates = 5;
  c.base_seed = 7;
  c.measurements = {Measure::diameter, Measure::max_degree};
  return c;
}

// records with a planted response value = ln^k(n)
std::vector<ScalingRecord> planted(double exponent) {
  std::vector<ScalingRecord> out;
  for (std::int64_t n : {64, 128, 256, 512, 1024, 2048}) {
    for (int rep = 0; rep < 5; ++rep) {
      ScalingRecord r;
      r.params.n = n;
      r.replicate = rep;
      r.measure = Measure::diameter;
      r.value = std::pow(std::log(static_cast<double>(n)), exponent);
      r.exact = true;
      out.push_back(r);
    }
  }
  return out;
}

std::string strip_wall_ms(const std::string& path) {
  std::ifstream is(path);
  std::ostringstream os;
  std::string line;
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    auto cut = line.rfind(',');
    os << (line[0] == '#' || line.rfind("d,", 0) == 0 ? line : line.substr(0, cut)) << '\n';
  }
  return os.str();
}

}  // namespace

TEST_CASE("config cells expand in deterministic nesting order") {
  ExperimentConfig c;
  c.n = {8, 16};
  c.sigma = {0.5, 1.0};
  auto cells = c.cells();
  REQUIRE(cells.size() == 4);
  CHECK(cells[0].n == 8);
  CHECK(cells[0].sigma == 0.5);
  CHECK(cells[1].n == 8);
  CHECK(cells[1].sigma == 1.0);
  CHECK(cells[3].n == 16);
  CHECK(cells[3].sigma == 1.0);
}

TEST_CASE("config validation rejects an invalid cell anywhere in the grid") {
  ExperimentConfig c;
  c.n = {16};
  c.alpha = {0.1, 0.45};
  c.beta = {0.4};  // alpha = 0.45 >= beta
  CHECK_THROWS_AS(c.validate(), std::invalid_argument);
  ExperimentConfig d;
  d.n = {16};
  d.replicates = 0;
  CHECK_THROWS_AS(d.validate(), std::invalid_argument);
}

TEST_CASE("config parses from JSON with defaults") {
  auto c = parse_experiment_config(R"({
    "n": [32, 64], "sigma": [0.5], "zeta": [1.0], "replicates": 3,
    "base_seed": 99, "measurements": ["diameter", "tmix"],
    "caps": {"mixing_all_max": 128}
  })");
  CHECK(c.n.size() == 2);
  CHECK(c.replicates == 3);
  CHECK(c.base_seed == 99);
  REQUIRE(c.measurements.size() == 2);
  CHECK(c.measurements[1] == Measure::mixing);
  CHECK(c.caps.mixing_all_max == 128);
  CHECK(c.d == std::vector<int>{1});
  CHECK_THROWS_AS(parse_experiment_config(R"({"n": []})"), std::invalid_argument);
  CHECK_THROWS_AS(parse_experiment_config(R"({"n": [2]})"), std::invalid_argument);
}

TEST_CASE("replicate seeds differ across cells and replicates") {
  ExperimentConfig c = small_config();
  auto cells = c.cells();
  std::set<std::uint64_t> seeds;
  for (const auto& cell : cells)
    for (int rep = 0; rep < c.replicates; ++rep)
      seeds.insert(cell_seed(c.base_seed, cell, rep));
  CHECK(seeds.size() == cells.size() * static_cast<std::size_t>(c.replicates));
}

TEST_CASE("an empty grid scans to an empty record set") {
  ExperimentConfig c;
  c.n = {};
  CHECK(run_scan(c, "", 1).empty());
}

TEST_CASE("pure-torus cells measure the closed-form diameter") {
  TempDir tmp;
  auto records = run_scan(small_config(), tmp.file("records.csv"), 2);
  REQUIRE(records.size() == 4 * 5 * 2);
  for (const auto& r : records) {
    if (r.measure == Measure::diameter) {
      CHECK(r.value == static_cast<double>(r.params.n / 2));
      CHECK(r.exact);
    }
    if (r.measure == Measure::max_degree) CHECK(r.value == 2.0);
    CHECK_FALSE(r.skipped);
  }
}

TEST_CASE("scans rerun byte-identically apart from wall clock") {
  TempDir tmp;
  auto cfg = small_config();
  run_scan(cfg, tmp.file("a.csv"), 1);
  run_scan(cfg, tmp.file("b.csv"), 2);
  CHECK(strip_wall_ms(tmp.file("a.csv")) == strip_wall_ms(tmp.file("b.csv")));
  CHECK(strip_wall_ms(tmp.file("a.csv")).find("# mnw-scan v1") == 0);
}

TEST_CASE("scans resume from an existing records file") {
  TempDir tmp;
  auto path = tmp.file("resume.csv");
  auto partial = small_config();
  partial.n = {16, 24};
  auto first = run_scan(partial, path, 1);
  auto full = small_config();
  auto second = run_scan(full, path, 1);
  CHECK(second.size() == 4 * 5 * 2);
  // earlier rows were reused verbatim, including their wall-clock fields
  auto reread = read_records_csv(path);
  CHECK(reread.size() == second.size());
  std::size_t matched = 0;
  for (const auto& a : first)
    for (const auto& b : second)
      if (a.params.n == b.params.n && a.replicate == b.replicate && a.measure == b.measure &&
          a.params.seed == b.params.seed && a.wall_ms == b.wall_ms)
        matched++;
  CHECK(matched == first.size());
}

TEST_CASE("records CSV round-trips through the reader") {
  TempDir tmp;
  auto path = tmp.file("rt.csv");
  auto records = run_scan(small_config(), path, 1);
  auto back = read_records_csv(path);
  REQUIRE(back.size() == records.size());
  for (std::size_t i = 0; i < records.size(); ++i) {
    CHECK(back[i].params.n == records[i].params.n);
    CHECK(back[i].params.seed == records[i].params.seed);
    CHECK(back[i].measure == records[i].measure);
    CHECK(back[i].value == records[i].value);
    CHECK(back[i].exact == records[i].exact);
  }
}

TEST_CASE("sampled-mode records are never marked exact") {
  TempDir tmp;
  ExperimentConfig c;
  c.n = {64};
  c.sigma = {1.0};
  c.zeta = {1.0};
  c.replicates = 2;
  c.measurements = {Measure::diameter, Measure::mixing};
  c.caps.diameter_exact_max = 32;  // forces sampled diameter
  c.caps.mixing_all_max = 32;      // forces sampled starts
  auto records = run_scan(c, "", 1);
  REQUIRE(records.size() == 4);
  for (const auto& r : records) {
    CHECK_FALSE(r.exact);
    CHECK_FALSE(r.skipped);
  }
}

TEST_CASE("cells beyond a hard cap are skipped with a reason") {
  ExperimentConfig c;
  c.n = {64};
  c.replicates = 1;
  c.measurements = {Measure::gap, Measure::diameter};
  c.caps.gap_max = 32;
  auto records = run_scan(c, "", 1);
  REQUIRE(records.size() == 2);
  CHECK(records[0].measure == Measure::gap);
  CHECK(records[0].skipped);
  CHECK(records[0].skip_reason == "gap-cap");
  CHECK_FALSE(records[1].skipped);
}

TEST_CASE("fit recovers planted polylog exponents") {
  for (double exponent : {0.0, 1.0, 2.0, 3.0}) {
    auto fit = fit_polylog_exponent(planted(exponent), Measure::diameter);
    CHECK(std::abs(fit.slope - exponent) <= 0.02);
    CHECK(std::abs(fit.ci_lower - exponent) <= 0.02);
    CHECK(std::abs(fit.ci_upper - exponent) <= 0.02);
  }
}

TEST_CASE("fit rejects thin or inconsistent data") {
  auto records = planted(1.0);
  records.resize(3 * 5);  // only 3 distinct n
  CHECK_THROWS_AS(fit_polylog_exponent(records, Measure::diameter), std::invalid_argument);

  auto mixed = planted(1.0);
  mixed[0].params.sigma = 0.5;  // a second cell sneaks in
  CHECK_THROWS_AS(fit_polylog_exponent(mixed, Measure::diameter), std::invalid_argument);

  CHECK_THROWS_AS(fit_polylog_exponent(planted(1.0), Measure::mixing), std::invalid_argument);
}

TEST_CASE("fit is deterministic in the bootstrap seed") {
  auto records = planted(2.0);
  // jitter the replicates so the bootstrap has something to resample
  for (std::size_t i = 0; i < records.size(); ++i)
    records[i].value *= 1.0 + 0.01 * static_cast<double>(i % 5);
  auto a = fit_polylog_exponent(records, Measure::diameter, 42);
  auto b = fit_polylog_exponent(records, Measure::diameter, 42);
  CHECK(a.slope == b.slope);
  CHECK(a.ci_lower == b.ci_lower);
  CHECK(a.ci_upper == b.ci_upper);
  CHECK(a.ci_lower <= a.slope);
  CHECK(a.ci_upper >= a.slope);
}

TEST_CASE("empty-box frequency hits the two extremes") {
  ModelParams quiet;
  quiet.n = 256;
  quiet.sigma = 0.0;
  CHECK(empty_box_frequency(quiet, 0.5, 10) == 1.0);

  ModelParams loud;  // p_n = 1: every eligible pair is an edge
  loud.n = 64;
  loud.sigma = 64.0;
  CHECK(empty_box_frequency(loud, 0.5, 10, 2) == 0.0);
}
