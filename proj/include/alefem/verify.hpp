#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <future>
#include <ostream>
#include <random>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "alefem/schemes.hpp"

namespace alefem::verify {

// ---------------------------------------------------------------------------
// Report
// ---------------------------------------------------------------------------

struct ReportRow {
  std::string suite;
  std::string case_name;
  std::string metric;
  double value = 0.0;
  bool pass = false;
};

struct Report {
  std::vector<ReportRow> rows;

  bool all_pass() const {
    return std::all_of(rows.begin(), rows.end(), [](const ReportRow& r) { return r.pass; });
  }
  double max_value() const {
    double m = 0.0;
    for (const auto& r : rows) m = std::max(m, r.value);
    return m;
  }
  void append(const Report& other) { rows.insert(rows.end(), other.rows.begin(), other.rows.end()); }
};

inline std::string short_number(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%g", v);
  return buf;
}

/// Threshold for algebraic identities and per-interval SCL residuals.
inline constexpr double kIdentityTolerance = 1e-12;
/// Threshold for end-to-end constant preservation.
inline constexpr double kPreservationTolerance = 1e-10;

// ---------------------------------------------------------------------------
// Convergence rate
// ---------------------------------------------------------------------------

struct RateEstimate {
  double slope = 0.0;
  double intercept = 0.0;
  std::vector<std::pair<double, double>> points;  // (dt, error)
};

/// Least-squares line through (log dt, log error).
inline RateEstimate convergence_rate(std::span<const double> errors, std::span<const double> dts) {
  if (errors.size() != dts.size()) throw std::invalid_argument("convergence_rate: length mismatch");
  if (errors.size() < 3) throw std::invalid_argument("convergence_rate: need at least 3 points");
  RateEstimate r;
  for (std::size_t i = 0; i < errors.size(); ++i) {
    if (!(errors[i] > 0.0) || !(dts[i] > 0.0))
      throw std::invalid_argument("convergence_rate: errors and time steps must be positive");
    r.points.emplace_back(dts[i], errors[i]);
  }
  if (std::all_of(dts.begin(), dts.end(), [&](double d) { return d == dts[0]; }))
    throw std::invalid_argument("convergence_rate: time steps must not all be equal");
  // centred least squares on (log dt, log error)
  const double n = static_cast<double>(errors.size());
  double mx = 0, my = 0;
  for (std::size_t i = 0; i < errors.size(); ++i) {
    mx += std::log(dts[i]) / n;
    my += std::log(errors[i]) / n;
  }
  double sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < errors.size(); ++i) {
    const double dx = std::log(dts[i]) - mx;
    sxx += dx * dx;
    sxy += dx * (std::log(errors[i]) - my);
  }
  r.slope = sxy / sxx;
  r.intercept = my - r.slope * mx;
  return r;
}

// ---------------------------------------------------------------------------
// SCL identity
// ---------------------------------------------------------------------------

/// A map with a display name and the horizon it is run over.
struct NamedMap {
  std::string name;
  PrescribedMap map;
  double horizon = 1.0;
};

struct SclCase {
  std::size_t mesh_size = 20;
  std::string map_name = "identity";
  PrescribedMap map;
  double final_time = 0.4;
  VelocityStrategy strategy = VelocityStrategy::piecewise_constant;
  double dt = 0.01;
  bool endpoint_flux = false;  // classical approximation instead of the exact integral

  std::string label() const {
    return "map=" + map_name + " mesh=" + std::to_string(mesh_size) + " strategy=" + to_string(strategy) +
           " dt=" + short_number(dt) + (endpoint_flux ? " flux=endpoint" : "");
  }
};

/// Largest per-interval weak SCL residual over [0, final_time]; the grid
/// velocity is chained across intervals exactly as the time stepper does.
inline double max_scl_residual(const Mesh& mesh, const SclCase& c) {
  const auto steps = static_cast<std::size_t>(std::llround(c.final_time / c.dt));
  DisplacementField u = sample_displacement(c.map, mesh, 0.0);
  std::vector<double> j = element_jacobians(mesh, u);
  std::vector<Vec2d> w_end;
  double worst = 0.0;
  for (std::size_t n = 0; n < steps; ++n) {
    const DisplacementField next = sample_displacement(c.map, mesh, static_cast<double>(n + 1) * c.dt);
    GridVelocity w = velocity_piecewise_constant(u, next, c.dt);
    if (c.strategy == VelocityStrategy::continuous) w = velocity_continuous(u, next, n == 0 ? w.start : w_end, c.dt);
    const IntervalGeometry geom = build_interval_geometry(mesh, u, w);
    const auto flux = c.endpoint_flux ? endpoint_flux_field(mesh, geom) : integrated_flux_field(geom);
    std::vector<double> j_next = element_jacobians(mesh, next);
    worst = std::max(worst, max_abs(scl_residual(mesh, j, j_next, flux)));
    u = next;
    j = std::move(j_next);
    w_end = w.end_values();
  }
  return worst;
}

/// Cross product of the given cases; each row passes iff the residual is
/// at most 1e-12. Cases run concurrently.
inline Report scl_identity_suite(const std::vector<SclCase>& cases) {
  std::vector<std::size_t> sizes;
  for (const auto& c : cases) sizes.push_back(c.mesh_size);
  std::sort(sizes.begin(), sizes.end());
  sizes.erase(std::unique(sizes.begin(), sizes.end()), sizes.end());
  std::vector<Mesh> meshes;
  for (auto n : sizes) meshes.push_back(build_unit_square_mesh(n, n));
  auto mesh_for = [&](std::size_t n) -> const Mesh& {
    return meshes[static_cast<std::size_t>(std::lower_bound(sizes.begin(), sizes.end(), n) - sizes.begin())];
  };

  std::vector<std::future<double>> jobs;
  for (const auto& c : cases)
    jobs.push_back(std::async(std::launch::async, [&, c] { return max_scl_residual(mesh_for(c.mesh_size), c); }));
  Report rep;
  for (std::size_t i = 0; i < cases.size(); ++i) {
    const double r = jobs[i].get();
    rep.rows.push_back({"scl_identity", cases[i].label(), "max_residual", r, r <= kIdentityTolerance});
  }
  return rep;
}

/// Cartesian product helper for the SCL suite.
inline std::vector<SclCase> scl_cases(const std::vector<std::size_t>& mesh_sizes, const std::vector<NamedMap>& maps,
                                      const std::vector<VelocityStrategy>& strategies, const std::vector<double>& dts) {
  std::vector<SclCase> out;
  for (auto n : mesh_sizes)
    for (const auto& m : maps)
      for (auto s : strategies)
        for (double dt : dts) {
          SclCase c;
          c.mesh_size = n;
          c.map_name = m.name;
          c.map = m.map;
          c.final_time = m.horizon;
          c.strategy = s;
          c.dt = dt;
          out.push_back(c);
        }
  return out;
}

// ---------------------------------------------------------------------------
// Constant preservation
// ---------------------------------------------------------------------------

struct PreservationCase {
  std::string map_name = "identity";
  PrescribedMap map;
  Scheme scheme = Scheme::mIE;
  VelocityStrategy strategy = VelocityStrategy::piecewise_constant;
  double dt = 0.05;
  double final_time = 2.0;

  std::string label() const {
    return "map=" + map_name + " scheme=" + to_string(scheme) + " strategy=" + to_string(strategy) +
           " dt=" + short_number(dt);
  }
};

/// max |u - 1| over dofs and time levels for alpha = 0, f = 0, u_D = 1.
inline double constant_drift(const fem::FeSpace& space, const PreservationCase& c) {
  SchemeConfig cfg;
  cfg.scheme = c.scheme;
  cfg.dt = c.dt;
  cfg.final_time = c.final_time;
  cfg.strategy = c.strategy;
  cfg.degree = space.degree();
  const RunRecord rec = run_simulation(space, cfg, constant_problem(c.map));
  double drift = 0.0;
  for (const auto& s : rec.steps) drift = std::max(drift, s.max_abs_deviation);
  return drift;
}

/// Drift per case. Rows pass iff drift <= 1e-10; classical comparators are
/// expected to fail this. A run that tangles the grid gives a failing row
/// with metric "tangled_at_step".
inline Report constant_preservation_suite(const fem::FeSpace& space, const std::vector<PreservationCase>& cases) {
  std::vector<std::future<double>> jobs;
  for (const auto& c : cases)
    jobs.push_back(std::async(std::launch::async, [&space, c] { return constant_drift(space, c); }));
  Report rep;
  for (std::size_t i = 0; i < cases.size(); ++i) {
    try {
      const double d = jobs[i].get();
      rep.rows.push_back({"constant_preservation", cases[i].label(), "max_drift", d, d <= kPreservationTolerance});
    } catch (const TanglingError& e) {
      rep.rows.push_back({"constant_preservation", cases[i].label(), "tangled_at_step", static_cast<double>(e.step()), false});
    }
  }
  return rep;
}

// ---------------------------------------------------------------------------
// Change of variables
// ---------------------------------------------------------------------------

namespace detail {

inline double max_abs_difference(const fem::SparseMatrix& a, const fem::SparseMatrix& b) {
  const fem::SparseMatrix d = a - b;
  double m = 0.0;
  for (int k = 0; k < d.outerSize(); ++k)
    for (fem::SparseMatrix::InnerIterator it(d, k); it; ++it) m = std::max(m, std::fabs(it.value()));
  return m;
}

/// Closed-form P1 mass and stiffness on a mesh given by its node coordinates.
inline std::pair<fem::SparseMatrix, fem::SparseMatrix> direct_p1_matrices(const Mesh& deformed) {
  fem::TripletAssembler mass(deformed.num_nodes()), stiff(deformed.num_nodes());
  for (std::size_t e = 0; e < deformed.num_elements(); ++e) {
    const auto v = deformed.element_vertices(e);
    const double area = triangle_area(v[0], v[1], v[2]);
    const Triangle& t = deformed.element(e);
    std::array<Vec2d, 3> g;
    for (int k = 0; k < 3; ++k) {
      const Point& p = v[(k + 1) % 3];
      const Point& q = v[(k + 2) % 3];
      g[k] = {(p.y - q.y) / (2.0 * area), (q.x - p.x) / (2.0 * area)};
    }
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) {
        mass.add(t[i], t[j], area / 12.0 * (i == j ? 2.0 : 1.0));
        stiff.add(t[i], t[j], area * dot(g[i], g[j]));
      }
  }
  return {mass.build(), stiff.build()};
}

}  // namespace detail

struct CovDiscrepancy {
  double mass = 0.0;
  double stiffness = 0.0;
  double max() const { return std::max(mass, stiffness); }
};

/// Mass and stiffness assembled by pullback on the referent P1 space versus
/// closed-form assembly on the deformed node coordinates. Throws
/// std::invalid_argument (via Mesh) when the deformed mesh is tangled.
inline CovDiscrepancy change_of_variables_oracle(const fem::FeSpace& p1_space, const PrescribedMap& map, double t) {
  if (p1_space.degree() != 1) throw std::invalid_argument("change_of_variables_oracle: needs a P1 space");
  const Mesh& mesh = p1_space.mesh();
  const DisplacementField u = sample_displacement(map, mesh, t);
  const Mesh deformed = displaced_mesh(mesh, u);
  const auto jac = element_jacobians(mesh, u);
  const auto cof = element_cofactors(mesh, u);
  const auto [m_direct, k_direct] = detail::direct_p1_matrices(deformed);
  CovDiscrepancy d;
  d.mass = detail::max_abs_difference(fem::assemble_weighted_mass(p1_space, jac), m_direct);
  d.stiffness = detail::max_abs_difference(fem::assemble_pulled_back_stiffness(p1_space, 1.0, 1.0, cof, jac), k_direct);
  return d;
}

// ---------------------------------------------------------------------------
// Seeded algebra fuzz
// ---------------------------------------------------------------------------

/// max |G C - det(G) I| over `count` random matrices with det in
/// [det_min, det_max].
inline double cofactor_fuzz(std::uint64_t seed, std::size_t count = 1000, double det_min = 0.1, double det_max = 10.0) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> entry(-4.0, 4.0);
  double worst = 0.0;
  std::size_t accepted = 0;
  while (accepted < count) {
    const Mat2d g{entry(rng), entry(rng), entry(rng), entry(rng)};
    const double det = jacobian(g);
    if (det < det_min || det > det_max) continue;
    ++accepted;
    const Mat2d r = g * cofactor2d(g) - det * identity2();
    worst = std::max(worst, max_abs_entry(r));
  }
  return worst;
}

// ---------------------------------------------------------------------------
// Forcing check
// ---------------------------------------------------------------------------

/// max |f - (du/dt - alpha Laplace u)| at `count` random points of the
/// physical domain Omega(t), t in [0, horizon], with fourth-order central
/// differences of step h applied to the exact solution.
inline double forcing_fd_discrepancy(const Problem& p, double horizon, std::uint64_t seed, std::size_t count = 100,
                                     double h = 1e-4) {
  if (!p.exact || !p.source) throw std::invalid_argument("forcing_fd_discrepancy: problem needs exact solution and source");
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.05, 0.95);
  std::uniform_real_distribution<double> time(2.0 * h, horizon);
  auto d2 = [h](auto&& f) { return (-f(2 * h) + 16 * f(h) - 30 * f(0.0) + 16 * f(-h) - f(-2 * h)) / (12 * h * h); };
  auto d1 = [h](auto&& f) { return (-f(2 * h) + 8 * f(h) - 8 * f(-h) + f(-2 * h)) / (12 * h); };
  double worst = 0.0;
  for (std::size_t k = 0; k < count; ++k) {
    const Point ref{unit(rng), unit(rng)};
    const double t = time(rng);
    const Point x = p.map(ref, t);
    const double ut = d1([&](double s) { return p.exact(x, t + s); });
    const double uxx = d2([&](double s) { return p.exact({x.x + s, x.y}, t); });
    const double uyy = d2([&](double s) { return p.exact({x.x, x.y + s}, t); });
    worst = std::max(worst, std::fabs(p.source(x, t) - (ut - p.alpha * (uxx + uyy))));
  }
  return worst;
}

}  // namespace alefem::verify
