// Command-line front end: graph generation, diameter / mixing / spectral
// measurements, bound checks, box scans, parameter sweeps and exponent fits.
#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "mnw/bounds.hpp"
#include "mnw/gen.hpp"
#include "mnw/graph.hpp"
#include "mnw/harness.hpp"
#include "mnw/walk.hpp"

namespace {

using nlohmann::json;

constexpr int kExitOk = 0;
constexpr int kExitFailure = 1;
constexpr int kExitValidation = 2;
constexpr int kExitStrictSkip = 3;

void write_json(const std::string& path, const json& j) {
  if (path.empty()) return;
  std::ofstream os(path);
  if (!os) throw std::runtime_error("mnw: cannot open '" + path + "' for writing");
  os << j.dump(2) << '\n';
}

json mixing_json(const mnw::MixingResult& r) {
  return json{{"t_mix", r.t_mix},
              {"exact", r.exact},
              {"lower_bound_only", !r.exact},
              {"worst_start", r.worst_start},
              {"tv_at_t_mix", r.tv_at_t_mix},
              {"tv_at_prev", r.tv_at_prev},
              {"starts_evaluated", r.starts_evaluated},
              {"max_renorm_drift", r.max_renorm_drift}};
}

json fit_json(const mnw::FitResult& f) {
  return json{{"slope", f.slope},
              {"intercept", f.intercept},
              {"ci_lower", f.ci_lower},
              {"ci_upper", f.ci_upper},
              {"n_values", f.n_values},
              {"records_used", f.records_used}};
}

mnw::LdGrid grid_from_json(const json& j) {
  mnw::LdGrid g;
  auto fill = [&j](const char* key, auto& target) {
    if (j.contains(key)) target = j.at(key).get<std::decay_t<decltype(target)>>();
  };
  fill("trial_counts", g.trial_counts);
  fill("probs", g.probs);
  fill("z_points", g.z_points);
  fill("small_trial_counts", g.small_trial_counts);
  fill("small_probs", g.small_probs);
  fill("z_above_mean", g.z_above_mean);
  fill("z_below_mean", g.z_below_mean);
  return g;
}

json ld_report_json(const mnw::LdReport& r) {
  json violations = json::array();
  for (const auto& v : r.violations)
    violations.push_back(json{{"family", v.family},
                              {"n", v.n},
                              {"p", v.p},
                              {"z", v.z},
                              {"log_exact", v.log_exact},
                              {"log_bound", v.log_bound},
                              {"asserted", v.asserted}});
  return json{{"checked_rate", r.checked_rate},
              {"violations_rate", r.violations_rate},
              {"checked_small_lower", r.checked_small_lower},
              {"violations_small_lower", r.violations_small_lower},
              {"checked_small_upper", r.checked_small_upper},
              {"violations_small_upper", r.violations_small_upper},
              {"checked_linear", r.checked_linear},
              {"violations_linear_asserted", r.violations_linear_asserted},
              {"violations_linear_reported", r.violations_linear_reported},
              {"asserted_clean", r.asserted_clean()},
              {"violations", violations}};
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"modified small-world graphs on the lattice torus: generation, "
               "diameter, random-walk mixing, spectral and isoperimetric bounds"};
  app.require_subcommand(1);
  int threads = 0;
  app.add_option("--threads", threads,
                 "worker threads (0 = hardware, or the MNW_THREADS variable); "
                 "results never depend on it")
      ->envname("MNW_THREADS");

  // generate
  auto* gen_cmd = app.add_subcommand("generate", "sample a graph and write it in mnw v1 format");
  mnw::ModelParams params;
  std::string out_path;
  gen_cmd->add_option("--d", params.d, "torus dimension")->required();
  gen_cmd->add_option("--n", params.n, "torus side length")->required();
  gen_cmd->add_option("--alpha", params.alpha, "window lower fraction")->required();
  gen_cmd->add_option("--beta", params.beta, "window upper fraction")->required();
  gen_cmd->add_option("--sigma", params.sigma, "edge probability scale")->required();
  gen_cmd->add_option("--zeta", params.zeta, "edge probability log exponent")->required();
  gen_cmd->add_option("--seed", params.seed, "random seed")->required();
  gen_cmd->add_option("--out", out_path, "output path")->required();

  // diameter
  auto* diam_cmd = app.add_subcommand("diameter", "diameter of a stored graph");
  std::string graph_path, mode = "exact", hist_path, json_path;
  int samples = 32;
  std::uint64_t sample_seed = 0;
  mnw::Vertex hist_source = 0;
  diam_cmd->add_option("graph", graph_path, "mnw v1 graph file")->required();
  diam_cmd->add_option("--mode", mode, "exact | sampled")
      ->check(CLI::IsMember({"exact", "sampled"}));
  diam_cmd->add_option("--samples", samples, "sources in sampled mode");
  diam_cmd->add_option("--seed", sample_seed, "source sampling seed");
  diam_cmd->add_option("--hist", hist_path, "write distance,count CSV for one BFS");
  diam_cmd->add_option("--hist-source", hist_source, "BFS source for --hist");
  diam_cmd->add_option("--out", json_path, "JSON result path");

  // mix
  auto* mix_cmd = app.add_subcommand("mix", "mixing time of the lazy walk");
  std::string starts = "all", curve_path;
  mnw::MixOptions mix_opt;
  mix_cmd->add_option("graph", graph_path, "mnw v1 graph file")->required();
  mix_cmd->add_option("--starts", starts, "all | sample")
      ->check(CLI::IsMember({"all", "sample"}));
  mix_cmd->add_option("--k", mix_opt.sample_count, "sampled start count");
  mix_cmd->add_option("--seed", mix_opt.sample_seed, "start sampling seed");
  mix_cmd->add_option("--all-cap", mix_opt.all_cap, "max vertices for all-starts mode");
  mix_cmd->add_option("--step-cap", mix_opt.step_cap, "abort beyond this many steps");
  mix_cmd->add_option("--curve", curve_path, "write t,tv curve CSV for the worst start");
  mix_cmd->add_option("--out", json_path, "JSON result path");

  // spectral
  auto* spec_cmd = app.add_subcommand("spectral", "spectral gap and the mixing-time bound");
  double tol = 1e-9;
  spec_cmd->add_option("graph", graph_path, "mnw v1 graph file")->required();
  spec_cmd->add_option("--tol", tol, "power iteration tolerance");
  spec_cmd->add_option("--out", json_path, "JSON result path");

  // bounds
  auto* bounds_cmd = app.add_subcommand(
      "bounds", "conductance / isoperimetry (exact when small, sweep bracket otherwise)");
  bounds_cmd->add_option("graph", graph_path, "mnw v1 graph file")->required();
  bounds_cmd->add_option("--tol", tol, "power iteration tolerance");
  bounds_cmd->add_option("--out", json_path, "JSON result path");

  // boxes
  auto* boxes_cmd = app.add_subcommand("boxes", "scan for boxes with no crossing long edge");
  double box_r = 0.5;
  std::int64_t max_list = 1000;
  boxes_cmd->add_option("graph", graph_path, "mnw v1 graph file")->required();
  boxes_cmd->add_option("--r", box_r, "box side exponent")->required();
  boxes_cmd->add_option("--max-list", max_list, "max origins listed in JSON");
  boxes_cmd->add_option("--out", json_path, "JSON result path");

  // ldcheck
  auto* ld_cmd = app.add_subcommand("ldcheck", "binomial tail bounds on a grid");
  std::string params_path;
  ld_cmd->add_option("--params", params_path, "JSON grid config");
  ld_cmd->add_option("--out", json_path, "JSON report path");

  // scan
  auto* scan_cmd = app.add_subcommand("scan", "run a parameter sweep");
  bool strict = false;
  scan_cmd->add_option("--params", params_path, "JSON experiment config")->required();
  scan_cmd->add_option("--out", out_path, "records CSV path")->required();
  scan_cmd->add_flag("--strict", strict, "exit 3 when any cell hits a resource cap");

  // fit
  auto* fit_cmd = app.add_subcommand("fit", "polylog exponent fit over scan records");
  std::string records_path, response = "diameter";
  std::uint64_t boot_seed = 1234;
  fit_cmd->add_option("--records", records_path, "records CSV")->required();
  fit_cmd->add_option("--response", response, "diameter | tmix")
      ->check(CLI::IsMember({"diameter", "tmix"}));
  fit_cmd->add_option("--boot-seed", boot_seed, "bootstrap seed");
  fit_cmd->add_option("--out", json_path, "JSON result path");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitValidation;
  }

  try {
    if (gen_cmd->parsed()) {
      params.validate();
      mnw::save_mnw(out_path, mnw::generate(params, threads));
      return kExitOk;
    }

    if (diam_cmd->parsed()) {
      mnw::Graph g = mnw::build(mnw::load_mnw(graph_path));
      mnw::DiameterResult r = mode == "exact"
                                  ? mnw::diameter_exact(g, threads)
                                  : mnw::diameter_sampled(g, samples, sample_seed, threads);
      std::cout << r.value << '\n';
      if (!hist_path.empty()) {
        std::ofstream os(hist_path);
        auto dist = mnw::bfs_distances(g, hist_source);
        mnw::write_distance_histogram_csv(os, dist);
      }
      write_json(json_path, json{{"diameter", r.value},
                                 {"exact", r.exact},
                                 {"lower_bound_only", !r.exact},
                                 {"bfs_runs", r.bfs_runs}});
      return kExitOk;
    }

    if (mix_cmd->parsed()) {
      mnw::Graph g = mnw::build(mnw::load_mnw(graph_path));
      mix_opt.all_starts = starts == "all";
      mix_opt.threads = threads;
      mnw::MixingResult r = mnw::mixing_time(g, mix_opt);
      std::cout << r.t_mix << '\n';
      write_json(json_path, mixing_json(r));
      if (!curve_path.empty()) {
        std::ofstream os(curve_path);
        os << "t,tv\n";
        auto curve = mnw::tv_curve(g, r.worst_start, r.t_mix + 8);
        for (std::size_t t = 0; t < curve.size(); ++t) os << t << ',' << curve[t] << '\n';
      }
      return kExitOk;
    }

    if (spec_cmd->parsed()) {
      mnw::Graph g = mnw::build(mnw::load_mnw(graph_path));
      mnw::TmixBound b = mnw::upper_bound_tmix(g, tol);
      std::cout << b.gap << '\n';
      write_json(json_path, json{{"gap", b.gap},
                                 {"lambda1", 1.0 - b.gap},
                                 {"pi_min", b.pi_min},
                                 {"tmix_upper_bound", b.bound}});
      return kExitOk;
    }

    if (bounds_cmd->parsed()) {
      mnw::Graph g = mnw::build(mnw::load_mnw(graph_path));
      json j;
      if (g.vertex_count <= 24) {
        mnw::IsoperimetryResult h = mnw::conductance_exact(g, threads);
        mnw::IsoperimetryResult iota = mnw::isoperimetric_exact(g, threads);
        mnw::DiameterBoundReport diam = mnw::diameter_bound_check(g, iota, threads);
        j = json{{"method", "brute"},
                 {"conductance", h.value},
                 {"conductance_minimizer", h.minimizer},
                 {"isoperimetric_constant", iota.value},
                 {"isoperimetric_minimizer", iota.minimizer},
                 {"diameter", diam.diameter},
                 {"max_degree", diam.max_deg},
                 {"diameter_bound", diam.bound},
                 {"diameter_bound_holds", diam.holds},
                 {"certified", diam.certified}};
        std::cout << "h=" << h.value << " iota=" << iota.value << " diam=" << diam.diameter
                  << " bound=" << diam.bound << '\n';
      } else {
        mnw::ConductanceBracket b = mnw::conductance_sweep(g, tol);
        j = json{{"method", "sweep"},
                 {"conductance_lower", b.lower},
                 {"conductance_upper", b.upper},
                 {"gap", b.gap},
                 {"certified", false},
                 {"note",
                  "bracket from the spectral sweep; exact enumeration needs <= 24 vertices"}};
        std::cout << "h in [" << b.lower << ", " << b.upper << "] (sweep bracket)\n";
      }
      write_json(json_path, j);
      return kExitOk;
    }

    if (boxes_cmd->parsed()) {
      mnw::EdgeList edges = mnw::load_mnw(graph_path);
      mnw::EmptyBoxScan scan = mnw::empty_box_scan(edges, box_r);
      std::cout << scan.origins.size() << '\n';
      json origins = json::array();
      for (std::size_t i = 0; i < scan.origins.size() && i < static_cast<std::size_t>(max_list);
           ++i)
        origins.push_back(scan.origins[i]);
      write_json(json_path, json{{"side", scan.side},
                                 {"count", scan.origins.size()},
                                 {"exists", !scan.origins.empty()},
                                 {"origins", origins}});
      return kExitOk;
    }

    if (ld_cmd->parsed()) {
      mnw::LdGrid grid;
      if (!params_path.empty()) {
        std::ifstream is(params_path);
        if (!is) throw std::runtime_error("mnw: cannot open '" + params_path + "'");
        json j;
        is >> j;
        grid = grid_from_json(j);
      }
      mnw::LdReport report = mnw::check_ld_bounds(grid);
      write_json(json_path, ld_report_json(report));
      std::cout << "rate: " << report.violations_rate << '/' << report.checked_rate
                << " violations; small-p lower: " << report.violations_small_lower << '/'
                << report.checked_small_lower
                << "; linear(asserted): " << report.violations_linear_asserted << '\n';
      return report.asserted_clean() ? kExitOk : kExitFailure;
    }

    if (scan_cmd->parsed()) {
      mnw::ExperimentConfig config = mnw::load_experiment_config(params_path);
      config.strict = config.strict || strict;
      auto records = mnw::run_scan(config, out_path, threads);
      std::int64_t skipped = 0;
      for (const auto& r : records) skipped += r.skipped ? 1 : 0;
      std::cout << records.size() << " records (" << skipped << " skipped)\n";
      if (config.strict && skipped > 0) return kExitStrictSkip;
      return kExitOk;
    }

    if (fit_cmd->parsed()) {
      auto records = mnw::read_records_csv(records_path);
      mnw::FitResult f =
          mnw::fit_polylog_exponent(records, mnw::measure_from_name(response), boot_seed);
      std::cout << "slope=" << f.slope << " ci=[" << f.ci_lower << ", " << f.ci_upper << "]\n";
      write_json(json_path, fit_json(f));
      return kExitOk;
    }
  } catch (const std::invalid_argument& e) {
    std::cerr << e.what() << '\n';
    return kExitValidation;
  } catch (const std::exception& e) {
    std::cerr << e.what() << '\n';
    return kExitFailure;
  }
  return kExitValidation;
}
