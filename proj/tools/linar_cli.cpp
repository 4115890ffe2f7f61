#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>

#include "linar/linar.hpp"

namespace fs = std::filesystem;
using namespace linar;

namespace {

struct SweepFlags {
  std::vector<int> n;
  std::vector<int> k;
  std::vector<double> beta;
  std::vector<std::string> algorithms;
  double failure_fraction = 0.2;
  int repetitions = 10;
  std::uint64_t seed = 1;
  double field_width = 200.0;
  double field_height = 200.0;
  double range = 20.0;
  double sensing_range = 20.0;
  double resolution = 0.0;
  std::string out = "out";
  std::string config;
};

void add_experiment_flags(CLI::App* app, SweepFlags& f) {
  app->add_option("--n", f.n, "node counts")->delimiter(',');
  app->add_option("--k", f.k, "connectivity targets")->delimiter(',');
  app->add_option("--beta", f.beta, "coverage conservation ratios")->delimiter(',');
  app->add_option("--algorithms", f.algorithms, "linar,mccr,tapu,greedy,localized,basic")->delimiter(',');
  app->add_option("--failure-fraction", f.failure_fraction, "share of nodes stopped per run");
  app->add_option("--repetitions", f.repetitions, "topologies per (n, k)");
  app->add_option("--seed", f.seed, "base seed");
  app->add_option("--field-width", f.field_width);
  app->add_option("--field-height", f.field_height);
  app->add_option("--range", f.range, "radio range (m)");
  app->add_option("--sensing-range", f.sensing_range, "sensing radius (m)");
  app->add_option("--resolution", f.resolution, "coverage grid step (m), 0 = default");
  app->add_option("--out", f.out, "output directory");
  app->add_option("--config", f.config, "key = value file; overrides flags");
}

ExperimentConfig to_config(const SweepFlags& f) {
  ExperimentConfig c;
  if (!f.n.empty()) c.n = f.n;
  if (!f.k.empty()) c.k = f.k;
  if (!f.beta.empty()) c.beta = f.beta;
  if (!f.algorithms.empty()) c.algorithms = f.algorithms;
  c.failure_fraction = f.failure_fraction;
  c.repetitions = f.repetitions;
  c.seed = f.seed;
  c.field = {f.field_width, f.field_height};
  c.range = f.range;
  c.sensing_range = f.sensing_range;
  c.resolution = f.resolution;
  c.output_dir = f.out;
  if (!f.config.empty()) return load_config(f.config, c);
  validate_config(c);
  return c;
}

std::ofstream open_out(const fs::path& p) {
  std::ofstream os(p, std::ios::binary);
  if (!os) throw std::runtime_error("cannot write " + p.string());
  return os;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"k-connectivity restoration simulator"};
  app.require_subcommand(1);

  // gen
  auto* gen = app.add_subcommand("gen", "generate a k-connected random geometric topology");
  int gen_n = 40, gen_k = 2;
  std::uint64_t gen_seed = 1;
  double gen_w = 200, gen_h = 200, gen_r = 20;
  std::string gen_out;
  gen->add_option("--n", gen_n, "node count")->required();
  gen->add_option("--k", gen_k, "connectivity target")->required();
  gen->add_option("--seed", gen_seed);
  gen->add_option("--field-width", gen_w);
  gen->add_option("--field-height", gen_h);
  gen->add_option("--range", gen_r);
  gen->add_option("-o,--output", gen_out, "topology file (default stdout)");

  // run
  auto* run = app.add_subcommand("run", "run one algorithm on one topology and print per-event CSV");
  std::string run_topo, run_alg = "linar", run_out;
  double run_beta = 0.0, run_fraction = 0.2;
  int run_k = 0;
  std::uint64_t run_seed_v = 1;
  run->add_option("-t,--topology", run_topo, "topology file")->required()->check(CLI::ExistingFile);
  run->add_option("-a,--algorithm", run_alg)->check(CLI::IsMember(known_algorithms()));
  run->add_option("--beta", run_beta);
  run->add_option("--k", run_k, "connectivity target (default: the file's k)");
  run->add_option("--failure-fraction", run_fraction);
  run->add_option("--seed", run_seed_v, "failure order seed");
  run->add_option("-o,--output", run_out, "CSV file (default stdout)");

  // sweep
  auto* sweep = app.add_subcommand("sweep", "run every configured combination; writes raw.csv and aggregate.csv");
  SweepFlags sf;
  add_experiment_flags(sweep, sf);
  bool quiet = false;
  sweep->add_flag("-q,--quiet", quiet, "no progress lines");

  // plotdata
  auto* plot = app.add_subcommand("plotdata", "turn a raw sweep CSV into per-figure series files");
  std::string plot_raw, plot_out = "plots", plot_filter;
  plot->add_option("--raw", plot_raw, "raw.csv from sweep")->required()->check(CLI::ExistingFile);
  plot->add_option("--out", plot_out, "output directory");
  plot->add_option("--filter", plot_filter, "keep runs with key=value (algorithm, n, k, beta)");

  // validate
  auto* val = app.add_subcommand("validate", "check the protocol against exact oracles on one topology");
  std::string val_topo;
  int val_k = 0;
  bool val_no_restore = false;
  val->add_option("-t,--topology", val_topo)->required()->check(CLI::ExistingFile);
  val->add_option("--k", val_k, "connectivity target (default: the file's k)");
  val->add_flag("--skip-restoration", val_no_restore, "skip the per-node failure replays");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*gen) {
      Topology t = generate(gen_n, gen_k, {gen_w, gen_h}, gen_r, gen_seed);
      if (gen_out.empty()) {
        write_topology(std::cout, t);
      } else {
        save_topology(t, gen_out);
      }
      return 0;
    }

    if (*run) {
      Topology t = load_topology(run_topo);
      RunSpec spec;
      spec.algorithm = run_alg;
      spec.k = run_k > 0 ? run_k : t.k;
      spec.beta = run_beta;
      spec.seed = run_seed_v;
      spec.failures = failure_order(static_cast<int>(t.nodes.size()), run_fraction, run_seed_v);
      auto rows = run_scenario(spec, t, SimConfig{}, default_resolution(t.field));
      if (run_out.empty()) {
        write_raw_csv(std::cout, rows);
      } else {
        auto os = open_out(run_out);
        write_raw_csv(os, rows);
      }
      return 0;
    }

    if (*sweep) {
      ExperimentConfig cfg = to_config(sf);
      fs::create_directories(cfg.output_dir);
      auto rows = run_sweep(cfg, quiet ? nullptr : &std::cerr);
      {
        auto os = open_out(fs::path(cfg.output_dir) / "raw.csv");
        write_raw_csv(os, rows);
      }
      std::ifstream back(fs::path(cfg.output_dir) / "raw.csv", std::ios::binary);
      auto runs = summarize_runs(read_csv(back));
      auto os = open_out(fs::path(cfg.output_dir) / "aggregate.csv");
      write_aggregate_csv(os, runs);
      return 0;
    }

    if (*plot) {
      std::ifstream is(plot_raw, std::ios::binary);
      auto runs = summarize_runs(read_csv(is));
      if (!plot_filter.empty()) {
        auto eq = plot_filter.find('=');
        if (eq == std::string::npos) throw std::runtime_error("--filter expects key=value");
        runs = filter_runs(runs, plot_filter.substr(0, eq), plot_filter.substr(eq + 1));
      }
      fs::create_directories(plot_out);
      for (const auto& f : figure_specs()) {
        auto os = open_out(fs::path(plot_out) / (f.name + ".csv"));
        write_series_csv(os, figure_series(runs, f));
      }
      return 0;
    }

    if (*val) {
      Topology t = load_topology(val_topo);
      ValidateOptions opts;
      opts.restoration = !val_no_restore;
      auto results = validate_topology(t, val_k > 0 ? val_k : t.k, opts);
      bool ok = true;
      for (const auto& r : results) {
        std::cout << (r.passed ? "[PASS] " : "[FAIL] ") << r.name << " checked=" << r.checked
                  << " violations=" << r.violations;
        if (!r.detail.empty()) std::cout << " (" << r.detail << ")";
        std::cout << '\n';
        ok = ok && r.passed;
      }
      return ok ? 0 : 1;
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
