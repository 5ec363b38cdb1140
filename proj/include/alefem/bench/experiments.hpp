#pragma once

#include <filesystem>
#include <fstream>
#include <functional>
#include <future>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "alefem/bench/config.hpp"
#include "alefem/bench/csv.hpp"
#include "alefem/bench/svg.hpp"
#include "alefem/verify.hpp"

namespace alefem::bench {

/// Outcome of one time series. Runs that throw keep the steps completed so
/// far and the error message.
struct SeriesRun {
  std::vector<StepRecord> steps;
  std::optional<std::string> error;
};

inline SeriesRun run_series(const fem::FeSpace& space, const SchemeConfig& cfg, const Problem& problem) {
  SeriesRun out;
  try {
    Stepper stepper(space, cfg, problem);
    try {
      stepper.run();
    } catch (const std::exception& e) {
      out.error = e.what();
    }
    out.steps = stepper.record().steps;
  } catch (const std::exception& e) {
    out.error = e.what();
  }
  return out;
}

/// Evaluate jobs concurrently; results come back in job order.
template <class T>
std::vector<T> run_all(const std::vector<std::function<T()>>& jobs) {
  std::vector<std::future<T>> f;
  f.reserve(jobs.size());
  for (const auto& j : jobs) f.push_back(std::async(std::launch::async, j));
  std::vector<T> out;
  out.reserve(jobs.size());
  for (auto& x : f) out.push_back(x.get());
  return out;
}

struct ExperimentResult {
  std::vector<std::pair<std::string, CsvTable>> tables;  // file name, table
  std::vector<std::pair<std::string, std::string>> svgs;  // file name, document
  std::vector<std::string> failures;
  bool passed = true;  // meaningful for scl-check and verify
};

inline double horizon_for_map(const std::string& map) {
  if (map == "stability") return 0.4;
  if (map == "convergence") return 0.3;
  if (map == "A" || map == "B") return 2.0;
  return 1.0;
}

inline SchemeConfig scheme_config(const ExperimentConfig& c, Scheme s, VelocityStrategy st, double dt) {
  SchemeConfig k;
  k.scheme = s;
  k.dt = dt;
  k.final_time = c.final_time;
  k.strategy = st;
  k.degree = c.degree;
  k.startup = c.startup;
  k.past_motion = c.past_motion;
  k.cn_geometry = c.cn_geometry;
  return k;
}

inline double max_scl(const std::vector<StepRecord>& steps) {
  double m = 0.0;
  for (const auto& s : steps) m = std::max(m, s.scl_residual);
  return m;
}

inline std::string failure_text(const std::string& series, const SeriesRun& r) {
  return series + ": " + r.error.value_or("");
}

// ---------------------------------------------------------------------------

inline ExperimentResult run_stability(const ExperimentConfig& c) {
  const fem::FeSpace space(build_unit_square_mesh(c.nx, c.ny), c.degree);
  const Problem problem = stability_problem();
  struct Key {
    Scheme s;
    VelocityStrategy st;
    double dt;
  };
  std::vector<Key> keys;
  for (auto s : c.schemes)
    for (auto st : c.strategies)
      for (double dt : c.dts) keys.push_back({s, st, dt});
  std::vector<std::function<SeriesRun()>> jobs;
  for (const auto& k : keys)
    jobs.push_back([&space, &problem, &c, k] { return run_series(space, scheme_config(c, k.s, k.st, k.dt), problem); });
  const auto runs = run_all(jobs);

  ExperimentResult res;
  CsvTable t({"scheme", "strategy", "dt", "t", "l2_norm", "scl_residual"});
  std::vector<Series> series;
  for (std::size_t i = 0; i < keys.size(); ++i) {
    const auto& k = keys[i];
    const std::string label = to_string(k.s) + " " + to_string(k.st) + " dt=" + verify::short_number(k.dt);
    if (runs[i].error) res.failures.push_back(failure_text(label, runs[i]));
    Series s{label, {}};
    for (const auto& r : runs[i].steps) {
      t.add_row({to_string(k.s), to_string(k.st), format_number(k.dt), format_number(r.t), format_number(r.l2_norm),
                 format_number(r.scl_residual)});
      s.points.emplace_back(r.t, r.l2_norm);
    }
    series.push_back(std::move(s));
  }
  res.tables.emplace_back("stability.csv", std::move(t));
  if (c.svg) res.svgs.emplace_back("stability.svg", render_svg(series, {"L2 norm on the moving domain", "t", "||u||"}));
  return res;
}

// ---------------------------------------------------------------------------

inline ExperimentResult run_convergence(const ExperimentConfig& c) {
  const fem::FeSpace space(build_unit_square_mesh(c.nx, c.ny), c.degree);
  const Problem problem = convergence_problem();
  struct Key {
    Scheme s;
    VelocityStrategy st;
    double dt;
  };
  std::vector<Key> keys;
  for (auto s : c.schemes)
    for (auto st : c.strategies)
      for (double dt : c.dts) keys.push_back({s, st, dt});
  std::vector<std::function<SeriesRun()>> jobs;
  for (const auto& k : keys)
    jobs.push_back([&space, &problem, &c, k] { return run_series(space, scheme_config(c, k.s, k.st, k.dt), problem); });
  const auto runs = run_all(jobs);

  ExperimentResult res;
  CsvTable errors({"scheme", "strategy", "dt", "error", "scl_residual"});
  CsvTable rates({"scheme", "strategy", "slope", "intercept"});
  std::vector<Series> series;
  PlotSpec spec{"Error at t = " + format_number(c.final_time), "dt", "L2 error", true, {}};
  std::size_t i = 0;
  for (auto s : c.schemes)
    for (auto st : c.strategies) {
      const std::string label = to_string(s) + " " + to_string(st);
      Series ser{label, {}};
      std::vector<double> e, d;
      for (double dt : c.dts) {
        const SeriesRun& r = runs[i++];
        if (r.error || r.steps.empty()) {
          res.failures.push_back(failure_text(label + " dt=" + verify::short_number(dt), r));
          continue;
        }
        const double err = r.steps.back().l2_error;
        errors.add_row({to_string(s), to_string(st), format_number(dt), format_number(err), format_number(max_scl(r.steps))});
        ser.points.emplace_back(dt, err);
        e.push_back(err);
        d.push_back(dt);
      }
      if (e.size() >= 3) {
        const auto rate = verify::convergence_rate(e, d);
        rates.add_row({to_string(s), to_string(st), format_number(rate.slope), format_number(rate.intercept)});
        spec.annotations.push_back(label + " slope " + format_number(rate.slope));
      }
      series.push_back(std::move(ser));
    }
  res.tables.emplace_back("convergence.csv", std::move(errors));
  res.tables.emplace_back("convergence_rates.csv", std::move(rates));
  if (c.svg) res.svgs.emplace_back("convergence.svg", render_svg(series, spec));
  return res;
}

// ---------------------------------------------------------------------------

/// Classical counterpart of a modified scheme, if one exists.
inline std::optional<Scheme> classical_counterpart(Scheme s) {
  switch (s) {
    case Scheme::mIE: return Scheme::cIE;
    case Scheme::mCN: return Scheme::cCN;
    case Scheme::mBDF2: return Scheme::cBDF2;
    default: return std::nullopt;
  }
}

struct AccuracyRun {
  std::string scheme;
  std::string variant;  // fixed, mov-nSCL-dc, mov-nSCL-c, mov-wSCL
  std::string map;
  double dt = 0.0;
  SeriesRun run;
};

/// All accuracy series: fixed grid, SCL-exact moving grid per strategy, and
/// the classical SCL-violating comparator (dc strategy).
inline std::vector<AccuracyRun> accuracy_runs(const ExperimentConfig& c) {
  const fem::FeSpace space(build_unit_square_mesh(c.nx, c.ny), c.degree);
  std::vector<AccuracyRun> out;
  std::vector<std::function<SeriesRun()>> jobs;
  auto add = [&](Scheme s, const std::string& variant, const std::string& map, VelocityStrategy st, double dt) {
    out.push_back({to_string(s), variant, map, dt, {}});
    jobs.push_back([&space, &c, s, map, st, dt] {
      return run_series(space, scheme_config(c, s, st, dt), accuracy_problem(parse_map(map)));
    });
  };
  for (double dt : c.dts)
    for (auto s : c.schemes) {
      if (is_classical(s)) continue;
      add(s, "fixed", "identity", VelocityStrategy::piecewise_constant, dt);
      for (const auto& m : c.maps) {
        for (auto st : c.strategies) add(s, "mov-nSCL-" + to_string(st), m, st, dt);
        if (auto cs = classical_counterpart(s)) add(*cs, "mov-wSCL", m, VelocityStrategy::piecewise_constant, dt);
      }
    }
  const auto runs = run_all(jobs);
  for (std::size_t i = 0; i < out.size(); ++i) out[i].run = runs[i];
  return out;
}

inline ExperimentResult run_accuracy(const ExperimentConfig& c) {
  ExperimentResult res;
  CsvTable t({"scheme", "variant", "map", "dt", "t", "l2_error", "scl_residual"});
  std::vector<Series> series;
  for (const auto& a : accuracy_runs(c)) {
    const std::string label = a.scheme + " " + a.variant + " " + a.map + " dt=" + verify::short_number(a.dt);
    if (a.run.error) res.failures.push_back(failure_text(label, a.run));
    Series s{label, {}};
    for (const auto& r : a.run.steps) {
      t.add_row({a.scheme, a.variant, a.map, format_number(a.dt), format_number(r.t), format_number(r.l2_error),
                 format_number(r.scl_residual)});
      s.points.emplace_back(r.t, r.l2_error);
    }
    series.push_back(std::move(s));
  }
  res.tables.emplace_back("accuracy.csv", std::move(t));
  if (c.svg) res.svgs.emplace_back("accuracy.svg", render_svg(series, {"L2 error, fixed physical domain", "t", "error"}));
  return res;
}

// ---------------------------------------------------------------------------

inline ExperimentResult run_scl_check(const ExperimentConfig& c) {
  std::vector<verify::NamedMap> maps;
  for (const auto& m : c.maps) maps.push_back({m, parse_map(m), horizon_for_map(m)});
  const auto cases = verify::scl_cases(c.mesh_sizes, maps, c.strategies, c.dts);
  const auto rep = verify::scl_identity_suite(cases);

  ExperimentResult res;
  CsvTable t({"map", "mesh", "strategy", "dt", "max_residual", "pass"});
  for (std::size_t i = 0; i < cases.size(); ++i) {
    const auto& k = cases[i];
    t.add_row({k.map_name, std::to_string(k.mesh_size), to_string(k.strategy), format_number(k.dt), format_number(rep.rows[i].value),
               rep.rows[i].pass ? "1" : "0"});
  }
  res.passed = rep.all_pass();
  res.tables.emplace_back("scl_check.csv", std::move(t));
  return res;
}

// ---------------------------------------------------------------------------

inline constexpr const char* kComparatorSuite = "constant_preservation_comparator";

/// All verification suites in one report.
inline verify::Report verification_report(const ExperimentConfig& c) {
  verify::Report rep;

  std::vector<verify::NamedMap> maps;
  for (const auto& m : c.maps) maps.push_back({m, parse_map(m), std::min(horizon_for_map(m), c.final_time)});
  rep.append(verify::scl_identity_suite(verify::scl_cases({c.nx}, maps, c.strategies, c.dts)));

  const fem::FeSpace space(build_unit_square_mesh(c.nx, c.ny), 1);
  std::vector<verify::PreservationCase> modified, classical;
  for (const auto& m : maps)
    for (auto st : c.strategies)
      for (auto s : {Scheme::mIE, Scheme::mCN, Scheme::mBDF2, Scheme::mBDF3, Scheme::cIE, Scheme::cCN, Scheme::cBDF2}) {
        verify::PreservationCase pc{m.name, m.map, s, st, c.dts.front(), m.horizon};
        (is_classical(s) ? classical : modified).push_back(pc);
      }
  rep.append(verify::constant_preservation_suite(space, modified));
  // Classical comparators use the same pass rule and are expected to fail it
  // on moving grids; they document the violation and are not part of the
  // overall verdict.
  for (auto row : verify::constant_preservation_suite(space, classical).rows) {
    row.suite = kComparatorSuite;
    rep.rows.push_back(row);
  }

  for (const auto& m : maps)
    for (double t : {0.1, 0.25, 0.5, 0.75}) {
      const double d = verify::change_of_variables_oracle(space, m.map, t).max();
      rep.rows.push_back({"change_of_variables", "map=" + m.name + " t=" + verify::short_number(t),
                          "max_entry_difference", d, d <= verify::kIdentityTolerance});
    }

  const double fuzz = verify::cofactor_fuzz(20240917);
  rep.rows.push_back({"cofactor_fuzz", "n=1000 seed=20240917", "max_entry_error", fuzz, fuzz <= verify::kIdentityTolerance});

  const double f_conv = verify::forcing_fd_discrepancy(convergence_problem(), 0.3, 7);
  rep.rows.push_back({"forcing_fd", "convergence", "max_abs_difference", f_conv, f_conv <= 1e-6});
  const double f_acc = verify::forcing_fd_discrepancy(accuracy_problem(PrescribedMap::identity()), 2.0, 11);
  rep.rows.push_back({"forcing_fd", "accuracy", "max_abs_difference", f_acc, f_acc <= 1e-6});
  return rep;
}

inline ExperimentResult run_verify(const ExperimentConfig& c) {
  const auto rep = verification_report(c);
  ExperimentResult res;
  CsvTable t({"suite", "case", "metric", "value", "pass"});
  for (const auto& r : rep.rows) t.add_row({r.suite, r.case_name, r.metric, format_number(r.value), r.pass ? "1" : "0"});
  res.passed = std::all_of(rep.rows.begin(), rep.rows.end(),
                           [](const verify::ReportRow& r) { return r.pass || r.suite == kComparatorSuite; });
  res.tables.emplace_back("verify.csv", std::move(t));
  return res;
}

// ---------------------------------------------------------------------------

inline ExperimentResult run_experiment(const ExperimentConfig& c) {
  c.validate();
  switch (c.experiment) {
    case Experiment::stability: return run_stability(c);
    case Experiment::convergence: return run_convergence(c);
    case Experiment::accuracy: return run_accuracy(c);
    case Experiment::scl_check: return run_scl_check(c);
    case Experiment::verify: return run_verify(c);
  }
  throw std::logic_error("unknown experiment");
}

/// Write tables and plots below `dir`; returns the written paths.
inline std::vector<std::filesystem::path> write_outputs(const ExperimentResult& r, const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  std::vector<std::filesystem::path> out;
  for (const auto& [name, table] : r.tables) {
    out.push_back(dir / name);
    table.write_file(out.back().string());
  }
  for (const auto& [name, doc] : r.svgs) {
    out.push_back(dir / name);
    std::ofstream f(out.back(), std::ios::binary);
    if (!f) throw std::runtime_error("cannot write " + out.back().string());
    f << doc;
  }
  return out;
}

}  // namespace alefem::bench
