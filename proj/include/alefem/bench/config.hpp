#pragma once

#include <cstddef>
#include <fstream>
#include <istream>
#include <numbers>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "alefem/schemes.hpp"

namespace alefem::bench {

enum class Experiment { stability, convergence, accuracy, scl_check, verify };

inline std::string to_string(Experiment e) {
  switch (e) {
    case Experiment::stability: return "stability";
    case Experiment::convergence: return "convergence";
    case Experiment::accuracy: return "accuracy";
    case Experiment::scl_check: return "scl-check";
    case Experiment::verify: return "verify";
  }
  return "?";
}

inline Experiment parse_experiment(const std::string& s) {
  for (auto e : {Experiment::stability, Experiment::convergence, Experiment::accuracy, Experiment::scl_check,
                 Experiment::verify})
    if (to_string(e) == s) return e;
  throw std::invalid_argument("unknown experiment '" + s + "'");
}

/// Named maps used by the experiments.
inline PrescribedMap parse_map(const std::string& s) {
  using std::numbers::pi;
  if (s == "identity") return PrescribedMap::identity();
  if (s == "stability") return PrescribedMap::uniform_scale(2.0, 1.0, 20.0 * pi);
  if (s == "convergence") return PrescribedMap::uniform_scale(2.0, 1.0, 10.0 * pi);
  if (s == "A") return PrescribedMap::map_a();
  if (s == "B") return PrescribedMap::map_b();
  throw std::invalid_argument("unknown map '" + s + "' (identity, stability, convergence, A, B)");
}

inline std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

inline std::vector<std::string> split_list(const std::string& s, char sep = ',') {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, sep)) {
    item = trim(item);
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

inline double parse_double(const std::string& s) {
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(s, &used);
  } catch (const std::exception&) {
    throw std::invalid_argument("not a number: '" + s + "'");
  }
  if (used != s.size()) throw std::invalid_argument("not a number: '" + s + "'");
  return v;
}

inline std::size_t parse_size(const std::string& s) {
  const double v = parse_double(s);
  if (v < 1.0 || v != static_cast<double>(static_cast<std::size_t>(v)))
    throw std::invalid_argument("expected a positive integer, got '" + s + "'");
  return static_cast<std::size_t>(v);
}

struct ExperimentConfig {
  Experiment experiment = Experiment::stability;
  std::size_t nx = 40;
  std::size_t ny = 40;
  int degree = 1;
  std::vector<Scheme> schemes{Scheme::mIE, Scheme::mCN, Scheme::mBDF2, Scheme::mBDF3};
  std::vector<double> dts{0.01, 0.005, 0.001, 0.0005};
  std::vector<VelocityStrategy> strategies{VelocityStrategy::piecewise_constant, VelocityStrategy::continuous};
  std::vector<std::string> maps;  // accuracy / scl-check
  std::vector<std::size_t> mesh_sizes{20, 40};  // scl-check
  double final_time = 0.4;
  Startup startup = Startup::implicit_euler;
  PastMotionTarget past_motion = PastMotionTarget::unknown;
  CnGeometry cn_geometry = CnGeometry::trapezoidal;
  std::string out_dir = "results";
  bool svg = false;

  void validate() const {
    if (nx == 0 || ny == 0) throw std::invalid_argument("mesh size must be >= 1");
    if (degree != 1 && degree != 2) throw std::invalid_argument("degree must be 1 or 2");
    if (dts.empty()) throw std::invalid_argument("dt list is empty");
    if (strategies.empty()) throw std::invalid_argument("strategy list is empty");
    for (double dt : dts)
      if (!(dt > 0.0)) throw std::invalid_argument("dt values must be positive");
    if (!(final_time > 0.0)) throw std::invalid_argument("final time must be positive");
    switch (experiment) {
      case Experiment::stability:
      case Experiment::convergence:
      case Experiment::accuracy:
        if (schemes.empty()) throw std::invalid_argument("scheme list is empty");
        break;
      default: break;
    }
    if ((experiment == Experiment::accuracy || experiment == Experiment::scl_check) && maps.empty())
      throw std::invalid_argument("map list is empty");
    if (experiment == Experiment::convergence && dts.size() < 3)
      throw std::invalid_argument("convergence needs at least 3 time steps");
    for (const auto& m : maps) parse_map(m);
  }
};

/// Defaults of each experiment.
inline ExperimentConfig default_config(Experiment e) {
  ExperimentConfig c;
  c.experiment = e;
  switch (e) {
    case Experiment::stability: break;
    case Experiment::convergence:
      c.degree = 2;
      c.dts = {0.05, 0.01, 0.005, 0.001};
      c.final_time = 0.3;
      c.startup = Startup::crank_nicolson;
      break;
    case Experiment::accuracy:
      c.degree = 2;
      c.dts = {0.05};
      c.final_time = 2.0;
      c.maps = {"A", "B"};
      break;
    case Experiment::scl_check:
      c.dts = {0.05, 0.01, 0.001};
      c.maps = {"stability", "A", "B"};
      break;
    case Experiment::verify:
      c.nx = c.ny = 20;
      c.dts = {0.05};
      c.final_time = 2.0;
      c.maps = {"identity", "A", "B"};
      break;
  }
  return c;
}

/// Apply one key=value setting. Lists are comma separated.
inline void apply_setting(ExperimentConfig& c, const std::string& key, const std::string& value) {
  const std::string v = trim(value);
  if (key == "experiment") {
    c.experiment = parse_experiment(v);
  } else if (key == "nx") {
    c.nx = parse_size(v);
  } else if (key == "ny") {
    c.ny = parse_size(v);
  } else if (key == "degree") {
    c.degree = static_cast<int>(parse_size(v));
  } else if (key == "scheme" || key == "schemes") {
    c.schemes.clear();
    for (const auto& s : split_list(v)) c.schemes.push_back(parse_scheme(s));
  } else if (key == "dt" || key == "dts") {
    c.dts.clear();
    for (const auto& s : split_list(v)) c.dts.push_back(parse_double(s));
  } else if (key == "strategy" || key == "strategies") {
    c.strategies.clear();
    for (const auto& s : split_list(v)) c.strategies.push_back(parse_velocity_strategy(s));
  } else if (key == "map" || key == "maps") {
    c.maps = split_list(v);
  } else if (key == "mesh_sizes") {
    c.mesh_sizes.clear();
    for (const auto& s : split_list(v)) c.mesh_sizes.push_back(parse_size(s));
  } else if (key == "final_time" || key == "T") {
    c.final_time = parse_double(v);
  } else if (key == "startup") {
    if (v == "ie") c.startup = Startup::implicit_euler;
    else if (v == "cn") c.startup = Startup::crank_nicolson;
    else throw std::invalid_argument("startup must be ie or cn");
  } else if (key == "past_motion") {
    if (v == "unknown") c.past_motion = PastMotionTarget::unknown;
    else if (v == "interval_end") c.past_motion = PastMotionTarget::interval_end;
    else throw std::invalid_argument("past_motion must be unknown or interval_end");
  } else if (key == "cn_geometry") {
    if (v == "trapezoidal") c.cn_geometry = CnGeometry::trapezoidal;
    else if (v == "interval_end") c.cn_geometry = CnGeometry::interval_end;
    else throw std::invalid_argument("cn_geometry must be trapezoidal or interval_end");
  } else if (key == "out") {
    c.out_dir = v;
  } else if (key == "svg") {
    c.svg = (v == "1" || v == "true" || v == "yes");
  } else {
    throw std::invalid_argument("unknown config key '" + key + "'");
  }
}

/// Flat key = value file; '#' starts a comment. Returns the pairs in file
/// order.
inline std::vector<std::pair<std::string, std::string>> parse_config(std::istream& in) {
  std::vector<std::pair<std::string, std::string>> out;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (auto h = line.find('#'); h != std::string::npos) line.resize(h);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw std::invalid_argument("config line " + std::to_string(lineno) + ": expected key = value");
    out.emplace_back(trim(line.substr(0, eq)), trim(line.substr(eq + 1)));
  }
  return out;
}

inline std::vector<std::pair<std::string, std::string>> parse_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open config file " + path);
  return parse_config(in);
}

inline void apply_settings(ExperimentConfig& c, const std::vector<std::pair<std::string, std::string>>& pairs) {
  for (const auto& [k, v] : pairs) {
    try {
      apply_setting(c, k, v);
    } catch (const std::invalid_argument& err) {
      throw std::invalid_argument("setting '" + k + "': " + err.what());
    }
  }
}

}  // namespace alefem::bench
