#pragma once

#include <cmath>
#include <functional>
#include <numbers>
#include <string>

#include "alefem/ale.hpp"

namespace alefem {

/// Scalar function of a physical point and time.
using SpaceTimeFunction = std::function<double(const Point&, double)>;

/// Heat equation du/dt - alpha Laplace(u) = f on the moving domain
/// Omega(t) = phi(referent square, t), with Dirichlet data on the boundary.
struct Problem {
  std::string name;
  double alpha = 0.0;
  PrescribedMap map;
  SpaceTimeFunction initial;    ///< u(x, 0)
  SpaceTimeFunction dirichlet;  ///< u_D(x, t)
  SpaceTimeFunction source;     ///< f(x, t); empty means zero
  SpaceTimeFunction exact;      ///< optional exact solution
};

/// Oscillating square, zero data, decaying bump. The L2 norm over Omega(t)
/// of the exact solution decreases monotonically.
inline Problem stability_problem() {
  Problem p;
  p.name = "stability";
  p.alpha = 0.01;
  p.map = PrescribedMap::uniform_scale(2.0, 1.0, 20.0 * std::numbers::pi);
  p.initial = [](const Point& x, double) { return 1600.0 * x.x * (1.0 - x.x) * x.y * (1.0 - x.y); };
  p.dirichlet = [](const Point&, double) { return 0.0; };
  return p;
}

/// Manufactured solution on the square scaled by a(t) = 2 - cos(10 pi t):
///   u(x, t) = g(t) p(x / a(t)),  g = 16 (1 + sin(5 pi t) / 2),
///   p(xi) = xi_1 (1 - xi_1) xi_2 (1 - xi_2).
/// With xi = x / a the forcing is
///   f = g' p - g (a'/a) xi . grad p - alpha g / a^2 Laplace_xi p.
inline Problem convergence_problem() {
  using std::numbers::pi;
  Problem p;
  p.name = "convergence";
  p.alpha = 0.1;
  p.map = PrescribedMap::uniform_scale(2.0, 1.0, 10.0 * pi);
  const PrescribedMap map = p.map;
  const double alpha = p.alpha;

  auto g = [](double t) { return 16.0 * (1.0 + 0.5 * std::sin(5.0 * pi * t)); };
  auto bump = [](const Point& xi) { return xi.x * (1.0 - xi.x) * xi.y * (1.0 - xi.y); };
  p.exact = [=](const Point& x, double t) {
    const double a = map.scale(t);
    return g(t) * bump((1.0 / a) * x);
  };
  p.initial = p.exact;
  p.dirichlet = [](const Point&, double) { return 0.0; };
  p.source = [=](const Point& x, double t) {
    const double a = map.scale(t);
    const double da = map.c1 * map.omega * std::sin(map.omega * t);
    const double dg = 40.0 * pi * std::cos(5.0 * pi * t);
    const Point xi = (1.0 / a) * x;
    const Vec2d grad{(1.0 - 2.0 * xi.x) * xi.y * (1.0 - xi.y), xi.x * (1.0 - xi.x) * (1.0 - 2.0 * xi.y)};
    const double lap = -2.0 * xi.y * (1.0 - xi.y) - 2.0 * xi.x * (1.0 - xi.x);
    return dg * bump(xi) - g(t) * (da / a) * dot(xi, grad) - alpha * g(t) / (a * a) * lap;
  };
  return p;
}

/// Fixed physical square with a grid moved by `map`:
///   u = sin(t) cos(2 (x - 1/2)^2 + 2 (y - 1/2)^2),
///   f = cos(t) cos(s) + alpha sin(t) (16 r^2 cos(s) + 8 sin(s)),  s = 2 r^2.
inline Problem accuracy_problem(const PrescribedMap& map) {
  Problem p;
  p.name = "accuracy";
  p.alpha = 0.1;
  p.map = map;
  const double alpha = p.alpha;
  auto r2 = [](const Point& x) { return (x.x - 0.5) * (x.x - 0.5) + (x.y - 0.5) * (x.y - 0.5); };
  p.exact = [=](const Point& x, double t) { return std::sin(t) * std::cos(2.0 * r2(x)); };
  p.initial = p.exact;
  p.dirichlet = p.exact;
  p.source = [=](const Point& x, double t) {
    const double rr = r2(x);
    const double s = 2.0 * rr;
    return std::cos(t) * std::cos(s) + alpha * std::sin(t) * (16.0 * rr * std::cos(s) + 8.0 * std::sin(s));
  };
  return p;
}

/// Zero diffusion, zero source, u = 1 everywhere: any scheme satisfying the
/// discrete SCL keeps the constant.
inline Problem constant_problem(const PrescribedMap& map, double value = 1.0) {
  Problem p;
  p.name = "constant";
  p.alpha = 0.0;
  p.map = map;
  p.initial = [value](const Point&, double) { return value; };
  p.dirichlet = p.initial;
  p.exact = p.initial;
  return p;
}

}  // namespace alefem
