// bench: runs the moving-domain experiments and verification suites and
// writes CSV (and optionally SVG) results.
//
//   bench --experiment stability --scheme mIE,mCN --dt 0.01,0.005 --strategy dc,c --nx 40 --out results/
//   bench --config run.cfg --svg

#include <chrono>
#include <cstdio>
#include <iostream>
#include <map>
#include <string>

#include "CLI11.hpp"
#include "alefem/bench/experiments.hpp"

using namespace alefem::bench;

int main(int argc, char** argv) {
  CLI::App app{"ALE heat equation benchmarks on moving domains"};
  // Every flag maps onto a config key; values given on the command line
  // override the config file, which overrides the experiment defaults.
  std::map<std::string, std::string> overrides;
  std::string config_path;
  bool svg = false;

  auto add = [&](const std::string& flag, const std::string& key, const std::string& help) {
    app.add_option_function<std::string>(flag, [&overrides, key](const std::string& v) { overrides[key] = v; }, help);
  };
  add("--experiment,-e", "experiment", "stability | convergence | accuracy | scl-check | verify");
  add("--scheme,-s", "scheme", "comma list of mIE,mCN,mBDF2,mBDF3,cIE,cCN,cBDF2");
  add("--dt", "dt", "comma list of time steps");
  add("--strategy", "strategy", "comma list of grid velocity strategies (dc, c)");
  add("--nx", "nx", "cells in x");
  add("--ny", "ny", "cells in y (defaults to nx)");
  add("--degree", "degree", "Lagrange degree (1 or 2)");
  add("--map", "map", "comma list of maps: identity, stability, convergence, A, B");
  add("--mesh-sizes", "mesh_sizes", "comma list of mesh sizes for scl-check");
  add("--final-time,-T", "final_time", "final time");
  add("--startup", "startup", "multistep startup: ie | cn");
  add("--past-motion", "past_motion", "BDF past motion target: unknown | interval_end");
  add("--cn-geometry", "cn_geometry", "CN start terms: trapezoidal | interval_end");
  add("--out,-o", "out", "output directory");
  app.add_option("--config,-c", config_path, "flat key = value config file");
  app.add_flag("--svg", svg, "also write SVG plots");
  CLI11_PARSE(app, argc, argv);

  ExperimentConfig cfg;
  try {
    const auto file = config_path.empty() ? decltype(parse_config_file("")){} : parse_config_file(config_path);
    std::string experiment = "stability";
    for (const auto& [k, v] : file)
      if (k == "experiment") experiment = v;
    if (overrides.count("experiment")) experiment = overrides["experiment"];

    cfg = default_config(parse_experiment(experiment));
    apply_settings(cfg, file);
    for (const auto& [k, v] : overrides) apply_setting(cfg, k, v);
    if (overrides.count("nx") && !overrides.count("ny")) cfg.ny = cfg.nx;
    if (svg) cfg.svg = true;
    cfg.validate();
  } catch (const std::exception& e) {
    std::cerr << "bench: " << e.what() << '\n';
    return 2;
  }

  try {
    const auto t0 = std::chrono::steady_clock::now();
    const ExperimentResult res = run_experiment(cfg);
    const auto files = write_outputs(res, cfg.out_dir);
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    for (const auto& f : files) std::cout << "wrote " << f.string() << '\n';
    for (const auto& f : res.failures) std::cerr << "series failed: " << f << '\n';
    std::printf("%s finished in %.1f s%s\n", to_string(cfg.experiment).c_str(), secs,
                res.passed ? "" : " (checks FAILED, see CSV)");
    return (res.passed && res.failures.empty()) ? 0 : 1;
  } catch (const std::exception& e) {
    std::cerr << "bench: " << e.what() << '\n';
    return 1;
  }
}
