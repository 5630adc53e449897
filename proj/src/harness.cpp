#include "mnw/harness.hpp"

#include <algorithm>
#include <atomic>
#include <bit>
#include <charconv>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <map>
#include <mutex>
#include <set>
#include <sstream>
#include <stdexcept>
#include <type_traits>

#include <json.hpp>

#include "mnw/bounds.hpp"
#include "mnw/gen.hpp"
#include "mnw/graph.hpp"
#include "mnw/parallel.hpp"
#include "mnw/rng.hpp"
#include "mnw/walk.hpp"

namespace mnw {

namespace {
constexpr const char* kCsvHeader = "# mnw-scan v1";
constexpr const char* kCsvColumns =
    "d,n,alpha,beta,sigma,zeta,replicate,seed,measure,value,exact,skipped,reason,wall_ms";

std::string format_double(double v) {
  char buf[40];
  auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

double parse_double(const std::string& tok) {
  double v = 0;
  auto res = std::from_chars(tok.data(), tok.data() + tok.size(), v);
  if (res.ec != std::errc() || res.ptr != tok.data() + tok.size())
    throw std::invalid_argument("mnw: bad numeric CSV field '" + tok + "'");
  return v;
}
}  // namespace

std::string measure_name(Measure m) {
  switch (m) {
    case Measure::diameter: return "diameter";
    case Measure::mixing: return "tmix";
    case Measure::gap: return "gap";
    case Measure::max_degree: return "max_degree";
    case Measure::boxes: return "boxes";
  }
  throw std::logic_error("mnw: unknown measure");
}

Measure measure_from_name(const std::string& name) {
  if (name == "diameter") return Measure::diameter;
  if (name == "tmix" || name == "mixing") return Measure::mixing;
  if (name == "gap") return Measure::gap;
  if (name == "max_degree") return Measure::max_degree;
  if (name == "boxes") return Measure::boxes;
  throw std::invalid_argument("mnw: unknown measurement '" + name + "'");
}

std::vector<ModelParams> ExperimentConfig::cells() const {
  std::vector<ModelParams> out;
  for (int dv : d)
    for (std::int64_t nv : n)
      for (double av : alpha)
        for (double bv : beta)
          for (double sv : sigma)
            for (double zv : zeta) {
              ModelParams p;
              p.d = dv;
              p.n = nv;
              p.alpha = av;
              p.beta = bv;
              p.sigma = sv;
              p.zeta = zv;
              out.push_back(p);
            }
  return out;
}

void ExperimentConfig::validate() const {
  if (replicates < 1) throw std::invalid_argument("mnw: replicates must be >= 1");
  if (measurements.empty()) throw std::invalid_argument("mnw: no measurements requested");
  for (const ModelParams& cell : cells()) cell.validate();
}

ExperimentConfig parse_experiment_config(const std::string& json_text) {
  nlohmann::json j = nlohmann::json::parse(json_text);
  ExperimentConfig c;
  auto fill = [&j](const char* key, auto& target) {
    if (j.contains(key)) target = j.at(key).get<std::decay_t<decltype(target)>>();
  };
  fill("d", c.d);
  fill("n", c.n);
  fill("alpha", c.alpha);
  fill("beta", c.beta);
  fill("sigma", c.sigma);
  fill("zeta", c.zeta);
  fill("replicates", c.replicates);
  fill("base_seed", c.base_seed);
  fill("box_r", c.box_r);
  fill("strict", c.strict);
  if (j.contains("measurements")) {
    c.measurements.clear();
    for (const auto& m : j.at("measurements"))
      c.measurements.push_back(measure_from_name(m.get<std::string>()));
  }
  if (j.contains("caps")) {
    const auto& k = j.at("caps");
    auto cap = [&k](const char* key, auto& target) {
      if (k.contains(key)) target = k.at(key).get<std::decay_t<decltype(target)>>();
    };
    cap("max_vertices", c.caps.max_vertices);
    cap("diameter_exact_max", c.caps.diameter_exact_max);
    cap("diameter_sample_count", c.caps.diameter_sample_count);
    cap("mixing_all_max", c.caps.mixing_all_max);
    cap("mixing_sample_count", c.caps.mixing_sample_count);
    cap("mixing_step_cap", c.caps.mixing_step_cap);
    cap("gap_max", c.caps.gap_max);
    cap("gap_tol", c.caps.gap_tol);
  }
  if (c.n.empty()) throw std::invalid_argument("mnw: config needs at least one n");
  c.validate();
  return c;
}

ExperimentConfig load_experiment_config(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw std::runtime_error("mnw: cannot open config '" + path + "'");
  std::stringstream ss;
  ss << is.rdbuf();
  return parse_experiment_config(ss.str());
}

std::uint64_t cell_seed(std::uint64_t base, const ModelParams& cell, int replicate) {
  std::uint64_t h = mix64(static_cast<std::uint64_t>(cell.d));
  h = mix64(h ^ static_cast<std::uint64_t>(cell.n));
  h = mix64(h ^ std::bit_cast<std::uint64_t>(cell.alpha));
  h = mix64(h ^ std::bit_cast<std::uint64_t>(cell.beta));
  h = mix64(h ^ std::bit_cast<std::uint64_t>(cell.sigma));
  h = mix64(h ^ std::bit_cast<std::uint64_t>(cell.zeta));
  h = mix64(h ^ static_cast<std::uint64_t>(replicate));
  return base ^ h;
}

namespace {

std::string record_key(const ScalingRecord& r) {
  std::ostringstream os;
  os << r.params.d << '|' << r.params.n << '|' << format_double(r.params.alpha) << '|'
     << format_double(r.params.beta) << '|' << format_double(r.params.sigma) << '|'
     << format_double(r.params.zeta) << '|' << r.replicate << '|' << measure_name(r.measure);
  return os.str();
}

std::string record_row(const ScalingRecord& r) {
  std::ostringstream os;
  os << r.params.d << ',' << r.params.n << ',' << format_double(r.params.alpha) << ','
     << format_double(r.params.beta) << ',' << format_double(r.params.sigma) << ','
     << format_double(r.params.zeta) << ',' << r.replicate << ',' << r.params.seed << ','
     << measure_name(r.measure) << ',' << format_double(r.value) << ',' << (r.exact ? 1 : 0)
     << ',' << (r.skipped ? 1 : 0) << ',' << r.skip_reason << ',' << format_double(r.wall_ms);
  return os.str();
}

std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> out;
  std::string cur;
  for (char ch : line) {
    if (ch == ',') {
      out.push_back(cur);
      cur.clear();
    } else {
      cur.push_back(ch);
    }
  }
  out.push_back(cur);
  return out;
}

// one (cell, replicate) task: generate once, run every measurement
std::vector<ScalingRecord> run_task(const ExperimentConfig& config, const ModelParams& cell,
                                    int replicate) {
  ModelParams params = cell;
  params.seed = cell_seed(config.base_seed, cell, replicate);
  const std::int64_t vcount = params.vertex_count();
  const ResourceCaps& caps = config.caps;

  std::vector<ScalingRecord> rows;
  auto emit = [&](Measure m, double value, bool exact, bool skipped, const std::string& reason,
                  double ms) {
    rows.push_back({params, replicate, m, value, exact, skipped, reason, ms});
  };

  if (vcount > caps.max_vertices) {
    for (Measure m : config.measurements) emit(m, 0, false, true, "vertex-cap", 0);
    return rows;
  }

  using clock = std::chrono::steady_clock;
  auto started = clock::now();
  EdgeList edges = generate(params, 1);
  bool need_graph = false;
  for (Measure m : config.measurements) need_graph |= m != Measure::boxes;
  Graph graph;
  if (need_graph) graph = build(edges);
  double build_ms = std::chrono::duration<double, std::milli>(clock::now() - started).count();

  for (Measure m : config.measurements) {
    auto t0 = clock::now();
    auto elapsed = [&] {
      return build_ms + std::chrono::duration<double, std::milli>(clock::now() - t0).count();
    };
    switch (m) {
      case Measure::diameter: {
        if (vcount <= caps.diameter_exact_max) {
          DiameterResult r = diameter_exact(graph, 1);
          emit(m, static_cast<double>(r.value), true, false, "", elapsed());
        } else {
          DiameterResult r =
              diameter_sampled(graph, caps.diameter_sample_count, params.seed, 1);
          emit(m, static_cast<double>(r.value), false, false, "", elapsed());
        }
        break;
      }
      case Measure::mixing: {
        MixOptions opt;
        opt.all_starts = vcount <= caps.mixing_all_max;
        opt.sample_count = caps.mixing_sample_count;
        opt.sample_seed = params.seed;
        opt.all_cap = caps.mixing_all_max;
        opt.step_cap = caps.mixing_step_cap;
        MixingResult r = mixing_time(graph, opt);
        emit(m, static_cast<double>(r.t_mix), r.exact, false, "", elapsed());
        break;
      }
      case Measure::gap: {
        if (vcount > caps.gap_max) {
          emit(m, 0, false, true, "gap-cap", elapsed());
        } else {
          emit(m, spectral_gap(graph, caps.gap_tol), true, false, "", elapsed());
        }
        break;
      }
      case Measure::max_degree:
        emit(m, static_cast<double>(max_degree(graph)), true, false, "", elapsed());
        break;
      case Measure::boxes: {
        double side = 2.0 * std::pow(std::log(static_cast<double>(params.n)), config.box_r);
        if (side >= static_cast<double>(params.n)) {
          emit(m, 0, false, true, "box-side", elapsed());
        } else {
          EmptyBoxScan scan = empty_box_scan(edges, config.box_r);
          emit(m, static_cast<double>(scan.origins.size()), true, false, "", elapsed());
        }
        break;
      }
    }
  }
  return rows;
}

}  // namespace

std::vector<ScalingRecord> read_records_csv(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw std::runtime_error("mnw: cannot open records file '" + path + "'");
  std::vector<ScalingRecord> out;
  std::string line;
  bool header_seen = false;
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    if (line[0] == '#') {
      if (!header_seen && line.rfind(kCsvHeader, 0) != 0)
        throw std::invalid_argument("mnw: unrecognized records header '" + line + "'");
      header_seen = true;
      continue;
    }
    if (line.rfind("d,", 0) == 0) continue;  // column row
    auto f = split_csv(line);
    if (f.size() != 14) continue;  // tolerate a truncated trailing row
    ScalingRecord r;
    r.params.d = static_cast<int>(std::stol(f[0]));
    r.params.n = std::stoll(f[1]);
    r.params.alpha = parse_double(f[2]);
    r.params.beta = parse_double(f[3]);
    r.params.sigma = parse_double(f[4]);
    r.params.zeta = parse_double(f[5]);
    r.replicate = static_cast<int>(std::stol(f[6]));
    r.params.seed = std::stoull(f[7]);
    r.measure = measure_from_name(f[8]);
    r.value = parse_double(f[9]);
    r.exact = f[10] == "1";
    r.skipped = f[11] == "1";
    r.skip_reason = f[12];
    r.wall_ms = parse_double(f[13]);
    out.push_back(r);
  }
  return out;
}

std::vector<ScalingRecord> run_scan(const ExperimentConfig& config, const std::string& csv_path,
                                    int threads) {
  config.validate();
  const bool persist = !csv_path.empty();

  std::vector<ScalingRecord> existing;
  std::set<std::string> done;
  if (persist && std::filesystem::exists(csv_path)) {
    existing = read_records_csv(csv_path);
    for (const auto& r : existing) done.insert(record_key(r));
  }

  struct Task {
    ModelParams cell;
    int replicate;
  };
  std::vector<Task> tasks;
  for (const ModelParams& cell : config.cells())
    for (int rep = 0; rep < config.replicates; ++rep) {
      ScalingRecord probe;
      probe.params = cell;
      probe.replicate = rep;
      probe.measure = config.measurements.front();
      if (done.count(record_key(probe))) continue;  // cell/replicate already complete
      tasks.push_back({cell, rep});
    }

  std::ofstream os;
  if (persist) {
    bool fresh = !std::filesystem::exists(csv_path) || std::filesystem::file_size(csv_path) == 0;
    os.open(csv_path, std::ios::app);
    if (!os) throw std::runtime_error("mnw: cannot open '" + csv_path + "' for append");
    if (fresh) os << kCsvHeader << "\n" << kCsvColumns << "\n" << std::flush;
  }

  // tasks run in parallel; rows are appended strictly in task order
  std::vector<std::vector<ScalingRecord>> results(tasks.size());
  std::vector<std::uint8_t> ready(tasks.size(), 0);
  std::size_t next_to_write = 0;
  std::mutex io_mutex;
  std::vector<ScalingRecord> fresh_records;
  std::exception_ptr failure;

  parallel_for(static_cast<std::int64_t>(tasks.size()), threads, [&](std::int64_t i) {
    std::vector<ScalingRecord> rows;
    try {
      rows = run_task(config, tasks[i].cell, tasks[i].replicate);
    } catch (...) {
      std::lock_guard<std::mutex> lock(io_mutex);
      if (!failure) failure = std::current_exception();
      ready[i] = 1;
      return;
    }
    std::lock_guard<std::mutex> lock(io_mutex);
    results[i] = std::move(rows);
    ready[i] = 1;
    while (next_to_write < tasks.size() && ready[next_to_write]) {
      for (const auto& r : results[next_to_write]) {
        fresh_records.push_back(r);
        if (persist) os << record_row(r) << '\n';
      }
      if (persist) os.flush();
      results[next_to_write].clear();
      ++next_to_write;
    }
  });
  if (failure) std::rethrow_exception(failure);

  // full deterministic record set for this config
  std::vector<ScalingRecord> all;
  std::map<std::string, ScalingRecord> by_key;
  for (const auto& r : existing) by_key[record_key(r)] = r;
  for (const auto& r : fresh_records) by_key[record_key(r)] = r;
  for (const ModelParams& cell : config.cells())
    for (int rep = 0; rep < config.replicates; ++rep)
      for (Measure m : config.measurements) {
        ScalingRecord probe;
        probe.params = cell;
        probe.replicate = rep;
        probe.measure = m;
        auto it = by_key.find(record_key(probe));
        if (it != by_key.end()) all.push_back(it->second);
      }
  return all;
}

namespace {

double median_of(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  std::size_t m = v.size() / 2;
  return v.size() % 2 ? v[m] : 0.5 * (v[m - 1] + v[m]);
}

double ls_slope(const std::vector<double>& x, const std::vector<double>& y, double* intercept) {
  double mx = 0, my = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= static_cast<double>(x.size());
  my /= static_cast<double>(x.size());
  double num = 0, den = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    num += (x[i] - mx) * (y[i] - my);
    den += (x[i] - mx) * (x[i] - mx);
  }
  double slope = num / den;
  if (intercept) *intercept = my - slope * mx;
  return slope;
}

}  // namespace

FitResult fit_polylog_exponent(std::span<const ScalingRecord> records, Measure response,
                               std::uint64_t bootstrap_seed, int bootstrap_rounds) {
  std::map<std::int64_t, std::vector<double>> groups;
  bool first = true;
  ModelParams ref;
  for (const auto& r : records) {
    if (r.measure != response || r.skipped) continue;
    if (first) {
      ref = r.params;
      first = false;
    } else if (r.params.d != ref.d || r.params.alpha != ref.alpha || r.params.beta != ref.beta ||
               r.params.sigma != ref.sigma || r.params.zeta != ref.zeta) {
      throw std::invalid_argument("mnw: fit needs records from a single non-n parameter cell");
    }
    if (!(r.value > 0)) throw std::invalid_argument("mnw: fit needs positive response values");
    groups[r.params.n].push_back(r.value);
  }
  if (groups.size() < 4)
    throw std::invalid_argument("mnw: fit needs at least 4 distinct n values");
  for (const auto& [n, vals] : groups)
    if (vals.size() < 5)
      throw std::invalid_argument("mnw: fit needs at least 5 replicates per n");

  FitResult out;
  out.n_values = static_cast<int>(groups.size());
  std::vector<double> x, y;
  for (const auto& [n, vals] : groups) {
    x.push_back(std::log(std::log(static_cast<double>(n))));
    y.push_back(std::log(median_of(vals)));
    out.records_used += static_cast<std::int64_t>(vals.size());
  }
  out.slope = ls_slope(x, y, &out.intercept);

  std::vector<double> slopes(static_cast<std::size_t>(bootstrap_rounds));
  SplitRng rng(bootstrap_seed, 0xb007ULL);
  for (int b = 0; b < bootstrap_rounds; ++b) {
    std::vector<double> yb;
    yb.reserve(y.size());
    for (const auto& [n, vals] : groups) {
      std::vector<double> sample(vals.size());
      for (auto& s : sample)
        s = vals[rng.next_below(vals.size())];
      yb.push_back(std::log(median_of(sample)));
    }
    slopes[static_cast<std::size_t>(b)] = ls_slope(x, yb, nullptr);
  }
  std::sort(slopes.begin(), slopes.end());
  auto quantile = [&](double q) {
    double pos = q * static_cast<double>(slopes.size() - 1);
    auto lo = static_cast<std::size_t>(pos);
    auto hi = std::min(lo + 1, slopes.size() - 1);
    double frac = pos - static_cast<double>(lo);
    return slopes[lo] * (1 - frac) + slopes[hi] * frac;
  };
  out.ci_lower = quantile(0.025);
  out.ci_upper = quantile(0.975);
  return out;
}

double empty_box_frequency(const ModelParams& cell, double r, int trials, int threads) {
  if (trials < 1) throw std::invalid_argument("mnw: trials must be >= 1");
  cell.validate();
  std::vector<std::uint8_t> hits(static_cast<std::size_t>(trials), 0);
  std::exception_ptr failure;
  std::mutex failure_mutex;
  parallel_for(trials, threads, [&](std::int64_t t) {
    try {
      ModelParams p = cell;
      p.seed = mix64(cell.seed ^ mix64(static_cast<std::uint64_t>(t) + 1));
      EdgeList edges = generate(p, 1);
      hits[static_cast<std::size_t>(t)] = empty_box_scan(edges, r).origins.empty() ? 0 : 1;
    } catch (...) {
      std::lock_guard<std::mutex> lock(failure_mutex);
      if (!failure) failure = std::current_exception();
    }
  });
  if (failure) std::rethrow_exception(failure);
  std::int64_t count = 0;
  for (auto h : hits) count += h;
  return static_cast<double>(count) / static_cast<double>(trials);
}

}  // namespace mnw
