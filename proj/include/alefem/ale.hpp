#pragma once

#include <array>
#include <cmath>
#include <cstddef>
#include <limits>
#include <numbers>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "alefem/mesh.hpp"
#include "alefem/polynomial.hpp"
#include "alefem/tensor2.hpp"

namespace alefem {

// ---------------------------------------------------------------------------
// Prescribed ALE maps
// ---------------------------------------------------------------------------

enum class MapKind { identity, uniform_scale, map_a, map_b };

/// Analytic ALE map x = phi(xhat, t) from the referent unit square.
struct PrescribedMap {
  MapKind kind = MapKind::identity;
  // uniform_scale: a(t) = c0 - c1 cos(omega t)
  double c0 = 1.0;
  double c1 = 0.0;
  double omega = 0.0;

  static PrescribedMap identity() { return {}; }
  static PrescribedMap uniform_scale(double c0, double c1, double omega) {
    return {MapKind::uniform_scale, c0, c1, omega};
  }
  static PrescribedMap map_a() { return {MapKind::map_a}; }
  static PrescribedMap map_b() { return {MapKind::map_b}; }

  double scale(double t) const { return c0 - c1 * std::cos(omega * t); }

  Point operator()(const Point& p, double t) const {
    using std::numbers::pi;
    switch (kind) {
      case MapKind::identity:
        return p;
      case MapKind::uniform_scale:
        return scale(t) * p;
      case MapKind::map_a: {
        const double s = 0.5 * std::sin(pi * t);
        return {p.x + s * std::sin(pi * p.x * (1.0 - p.x) * (p.x - 0.5)),
                p.y + s * std::sin(pi * p.y * (1.0 - p.y) * (p.y - 0.5))};
      }
      case MapKind::map_b: {
        const double bump = std::sin(pi * t) * p.x * (1.0 - p.x) * p.y * (1.0 - p.y);
        return {p.x + bump, p.y + bump};
      }
    }
    throw std::logic_error("unknown map kind");
  }
};

inline std::string to_string(MapKind k) {
  switch (k) {
    case MapKind::identity: return "identity";
    case MapKind::uniform_scale: return "uniform_scale";
    case MapKind::map_a: return "A";
    case MapKind::map_b: return "B";
  }
  return "?";
}

// ---------------------------------------------------------------------------
// Displacement and grid velocity
// ---------------------------------------------------------------------------

/// Nodal P1 displacement uhat(xhat_i, t).
using DisplacementField = std::vector<Vec2d>;

inline DisplacementField sample_displacement(const PrescribedMap& map, const Mesh& mesh, double t) {
  DisplacementField u(mesh.num_nodes());
  for (std::size_t i = 0; i < mesh.num_nodes(); ++i) u[i] = map(mesh.node(i), t) - mesh.node(i);
  return u;
}

enum class VelocityStrategy { piecewise_constant, continuous };

inline std::string to_string(VelocityStrategy s) { return s == VelocityStrategy::piecewise_constant ? "dc" : "c"; }

inline VelocityStrategy parse_velocity_strategy(const std::string& s) {
  if (s == "dc" || s == "piecewise_constant") return VelocityStrategy::piecewise_constant;
  if (s == "c" || s == "continuous") return VelocityStrategy::continuous;
  throw std::invalid_argument("unknown velocity strategy '" + s + "'");
}

/// Grid velocity on one interval, w(t) = start + t * slope for local t in [0, dt].
/// The piecewise-constant strategy has slope == 0.
struct GridVelocity {
  VelocityStrategy strategy = VelocityStrategy::piecewise_constant;
  double dt = 0.0;
  std::vector<Vec2d> start;
  std::vector<Vec2d> slope;

  std::size_t size() const { return start.size(); }
  Vec2d at(std::size_t i, double t) const { return start[i] + t * slope[i]; }
  Vec2d end(std::size_t i) const { return at(i, dt); }
  /// Exact integral of the velocity over the interval.
  Vec2d integral(std::size_t i) const { return dt * start[i] + (0.5 * dt * dt) * slope[i]; }

  std::vector<Vec2d> end_values() const {
    std::vector<Vec2d> out(size());
    for (std::size_t i = 0; i < size(); ++i) out[i] = end(i);
    return out;
  }
};

namespace detail {
inline void check_interval(const DisplacementField& a, const DisplacementField& b, double dt) {
  if (!(dt > 0.0)) throw std::invalid_argument("grid velocity: dt must be positive");
  if (a.size() != b.size()) throw std::invalid_argument("grid velocity: displacement fields differ in size");
}
}  // namespace detail

/// w = (u_{n+1} - u_n) / dt, constant on the interval.
inline GridVelocity velocity_piecewise_constant(const DisplacementField& u_n, const DisplacementField& u_np1, double dt) {
  detail::check_interval(u_n, u_np1, dt);
  GridVelocity w{VelocityStrategy::piecewise_constant, dt, std::vector<Vec2d>(u_n.size()), std::vector<Vec2d>(u_n.size())};
  for (std::size_t i = 0; i < u_n.size(); ++i) w.start[i] = (1.0 / dt) * (u_np1[i] - u_n[i]);
  return w;
}

/// Velocity continuous across intervals: starts at the previous interval's
/// end velocity and varies linearly so that its integral is u_{n+1} - u_n.
inline GridVelocity velocity_continuous(const DisplacementField& u_n, const DisplacementField& u_np1,
                                        const std::vector<Vec2d>& w_prev_end, double dt) {
  detail::check_interval(u_n, u_np1, dt);
  if (w_prev_end.size() != u_n.size()) throw std::invalid_argument("velocity_continuous: w_prev_end size mismatch");
  GridVelocity w{VelocityStrategy::continuous, dt, w_prev_end, std::vector<Vec2d>(u_n.size())};
  const double k = 2.0 / (dt * dt);
  for (std::size_t i = 0; i < u_n.size(); ++i) w.slope[i] = k * ((u_np1[i] - u_n[i]) - dt * w_prev_end[i]);
  return w;
}

// ---------------------------------------------------------------------------
// Per-element geometry
// ---------------------------------------------------------------------------

/// Referent gradient of a P1 vector field on one element (constant per element).
inline Mat2d element_gradient(const std::array<Vec2d, 3>& bary_grad, const std::array<Vec2d, 3>& values) {
  Mat2d g{};
  for (int k = 0; k < 3; ++k) {
    g.xx += values[k].x * bary_grad[k].x;
    g.xy += values[k].x * bary_grad[k].y;
    g.yx += values[k].y * bary_grad[k].x;
    g.yy += values[k].y * bary_grad[k].y;
  }
  return g;
}

inline std::array<Vec2d, 3> gather(const Triangle& t, const std::vector<Vec2d>& field) {
  return {field[t[0]], field[t[1]], field[t[2]]};
}

/// Deformation gradients I + grad(u) of a nodal displacement, one per element.
inline std::vector<Mat2d> element_deformation_gradients(const Mesh& mesh, const DisplacementField& u) {
  std::vector<Mat2d> out(mesh.num_elements());
  for (std::size_t e = 0; e < mesh.num_elements(); ++e)
    out[e] = identity2() + element_gradient(barycentric_gradients(mesh, e), gather(mesh.element(e), u));
  return out;
}

inline std::vector<double> element_jacobians(const Mesh& mesh, const DisplacementField& u) {
  const auto g = element_deformation_gradients(mesh, u);
  std::vector<double> j(g.size());
  for (std::size_t e = 0; e < g.size(); ++e) j[e] = jacobian(g[e]);
  return j;
}

inline std::vector<Mat2d> element_cofactors(const Mesh& mesh, const DisplacementField& u) {
  auto g = element_deformation_gradients(mesh, u);
  for (auto& m : g) m = cofactor2d(m);
  return g;
}

/// Per-element, linear-in-space field stored by its three vertex values
/// (discontinuous across edges), with its constant divergence.
struct ElementFlux {
  std::array<Vec2d, 3> vertex_values{};
  double divergence = 0.0;
};

using PolyMat2 = Mat2<TimePolynomial<2>>;

struct ElementGeometry {
  PolyMat2 deformation_gradient;                    ///< G(t) = I + grad u(t)
  PolyMat2 cofactor;                                ///< C(t), G C = J I
  TimePolynomial<4> jacobian;                       ///< J(t) = det G(t)
  std::array<Vec2<TimePolynomial<3>>, 3> flux;      ///< C(t) w(t) at the vertices
  ElementFlux integrated_flux;                      ///< exact integral of flux over the interval
};

/// Geometry of every element on one interval [t_n, t_n + dt], in local time.
struct IntervalGeometry {
  double dt = 0.0;
  std::vector<ElementGeometry> elements;
};

inline double p1_divergence(const std::array<Vec2d, 3>& bary_grad, const std::array<Vec2d, 3>& values) {
  double div = 0.0;
  for (int k = 0; k < 3; ++k) div += dot(bary_grad[k], values[k]);
  return div;
}

/// Displacement interpolant on the interval is u_n + t w_start + t^2/2 slope;
/// G, C, J and C w are assembled as exact polynomials in t.
inline ElementGeometry element_def_gradient(const Mesh& mesh, std::size_t e, const DisplacementField& u_n,
                                            const GridVelocity& w) {
  const Triangle& tri = mesh.element(e);
  const auto grad = barycentric_gradients(mesh, e);
  const Mat2d g0 = identity2() + element_gradient(grad, gather(tri, u_n));
  const Mat2d g1 = element_gradient(grad, gather(tri, w.start));
  const Mat2d g2 = 0.5 * element_gradient(grad, gather(tri, w.slope));

  auto entry = [](double a, double b, double c) { return TimePolynomial<2>({a, b, c}); };
  ElementGeometry geo;
  geo.deformation_gradient = {entry(g0.xx, g1.xx, g2.xx), entry(g0.xy, g1.xy, g2.xy), entry(g0.yx, g1.yx, g2.yx),
                              entry(g0.yy, g1.yy, g2.yy)};
  geo.cofactor = cofactor2d(geo.deformation_gradient);
  geo.jacobian = jacobian(geo.deformation_gradient);

  for (int k = 0; k < 3; ++k) {
    const Vec2d a = w.start[tri[k]];
    const Vec2d b = w.slope[tri[k]];
    const Vec2<TimePolynomial<1>> wk{TimePolynomial<1>({a.x, b.x}), TimePolynomial<1>({a.y, b.y})};
    geo.flux[k] = geo.cofactor * wk;
    geo.integrated_flux.vertex_values[k] = {geo.flux[k].x.integral(w.dt), geo.flux[k].y.integral(w.dt)};
  }
  geo.integrated_flux.divergence = p1_divergence(grad, geo.integrated_flux.vertex_values);
  return geo;
}

inline IntervalGeometry build_interval_geometry(const Mesh& mesh, const DisplacementField& u_n, const GridVelocity& w) {
  if (u_n.size() != mesh.num_nodes() || w.size() != mesh.num_nodes())
    throw std::invalid_argument("build_interval_geometry: field size does not match mesh");
  IntervalGeometry out{w.dt, std::vector<ElementGeometry>(mesh.num_elements())};
  for (std::size_t e = 0; e < mesh.num_elements(); ++e) out.elements[e] = element_def_gradient(mesh, e, u_n, w);
  return out;
}

/// Exactly integrated flux fields of the interval.
inline std::vector<ElementFlux> integrated_flux_field(const IntervalGeometry& geom) {
  std::vector<ElementFlux> out(geom.elements.size());
  for (std::size_t e = 0; e < out.size(); ++e) out[e] = geom.elements[e].integrated_flux;
  return out;
}

/// Endpoint approximation dt * C(dt) w(dt) of the integrated flux. This is the
/// approximation that breaks the discrete SCL; used by the classical schemes.
inline std::vector<ElementFlux> endpoint_flux_field(const Mesh& mesh, const IntervalGeometry& geom) {
  std::vector<ElementFlux> out(geom.elements.size());
  const double dt = geom.dt;
  for (std::size_t e = 0; e < out.size(); ++e) {
    const auto& g = geom.elements[e];
    for (int k = 0; k < 3; ++k) out[e].vertex_values[k] = {dt * g.flux[k].x(dt), dt * g.flux[k].y(dt)};
    out[e].divergence = p1_divergence(barycentric_gradients(mesh, e), out[e].vertex_values);
  }
  return out;
}

/// Smallest J(t) over the elements at `samples` equispaced times in [0, dt].
inline double min_sampled_jacobian(const IntervalGeometry& geom, int samples = 9) {
  double jmin = std::numeric_limits<double>::infinity();
  for (const auto& g : geom.elements)
    for (int s = 0; s < samples; ++s) jmin = std::min(jmin, g.jacobian(geom.dt * s / (samples - 1)));
  return jmin;
}

// ---------------------------------------------------------------------------
// Discrete SCL residuals
// ---------------------------------------------------------------------------

/// Per element: (J_{n+1} - J_n) - div(integrated flux). Zero to rounding
/// when the flux is integrated exactly.
inline std::vector<double> scl_differential_residual(std::span<const double> j_start, std::span<const double> j_end,
                                                     std::span<const ElementFlux> flux) {
  std::vector<double> r(flux.size());
  for (std::size_t e = 0; e < r.size(); ++e) r[e] = (j_end[e] - j_start[e]) - flux[e].divergence;
  return r;
}

/// Weak SCL residual against the P1 hat functions of the referent mesh:
/// r_i = int psi_i (J_{n+1} - J_n) - int psi_i div(integrated flux).
///
/// Both J and the divergence are constant per element, so the integrand is
/// linear; the 3-point edge-midpoint rule (degree 2) is exact.
inline std::vector<double> scl_residual(const Mesh& mesh, std::span<const double> j_start, std::span<const double> j_end,
                                        std::span<const ElementFlux> flux) {
  if (j_start.size() != mesh.num_elements() || j_end.size() != mesh.num_elements() || flux.size() != mesh.num_elements())
    throw std::invalid_argument("scl_residual: per-element data size mismatch");
  static constexpr std::array<std::array<double, 3>, 3> kMidpoints{{{0.5, 0.5, 0.0}, {0.0, 0.5, 0.5}, {0.5, 0.0, 0.5}}};
  std::vector<double> r(mesh.num_nodes(), 0.0);
  for (std::size_t e = 0; e < mesh.num_elements(); ++e) {
    const double area = element_area(mesh, e);
    const double jump = j_end[e] - j_start[e];
    const double div = flux[e].divergence;
    const Triangle& tri = mesh.element(e);
    for (const auto& q : kMidpoints) {
      const double w = area / 3.0;
      for (int k = 0; k < 3; ++k) r[tri[k]] += w * q[k] * jump - w * q[k] * div;
    }
  }
  return r;
}

inline double max_abs(std::span<const double> v) {
  double m = 0.0;
  for (double x : v) m = std::max(m, std::fabs(x));
  return m;
}

}  // namespace alefem
