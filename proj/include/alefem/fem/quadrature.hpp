#pragma once

#include <array>
#include <stdexcept>
#include <string>
#include <vector>

namespace alefem::fem {

/// Symmetric rule on the reference triangle. Weights sum to the reference
/// area 1/2.
struct QuadratureRule {
  std::vector<std::array<double, 3>> points;  // barycentric
  std::vector<double> weights;
  int degree = 0;

  std::size_t size() const { return points.size(); }
};

namespace detail {
inline void add_s3(QuadratureRule& r, double w) {
  r.points.push_back({1.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0});
  r.weights.push_back(0.5 * w);
}
inline void add_s21(QuadratureRule& r, double a, double w) {
  const double b = 1.0 - 2.0 * a;
  for (const auto& p : {std::array<double, 3>{a, a, b}, {a, b, a}, {b, a, a}}) {
    r.points.push_back(p);
    r.weights.push_back(0.5 * w);
  }
}
inline void add_s111(QuadratureRule& r, double a, double b, double w) {
  const double c = 1.0 - a - b;
  for (const auto& p : {std::array<double, 3>{a, b, c}, {a, c, b}, {b, a, c}, {b, c, a}, {c, a, b}, {c, b, a}}) {
    r.points.push_back(p);
    r.weights.push_back(0.5 * w);
  }
}
}  // namespace detail

/// Smallest built-in rule exact for polynomials of the given total degree.
/// Available exactness: 1 (centroid), 2 (edge midpoints), 4 (6 points),
/// 6 (12 points).
inline const QuadratureRule& quadrature_rule(int degree) {
  static const QuadratureRule centroid = [] {
    QuadratureRule r;
    r.degree = 1;
    detail::add_s3(r, 1.0);
    return r;
  }();
  static const QuadratureRule midpoints = [] {
    QuadratureRule r;
    r.degree = 2;
    for (const auto& p : {std::array<double, 3>{0.5, 0.5, 0.0}, {0.0, 0.5, 0.5}, {0.5, 0.0, 0.5}}) {
      r.points.push_back(p);
      r.weights.push_back(1.0 / 6.0);
    }
    return r;
  }();
  static const QuadratureRule six_point = [] {
    QuadratureRule r;
    r.degree = 4;
    detail::add_s21(r, 0.445948490915964886318329253883, 0.223381589678011465944790297796);
    detail::add_s21(r, 0.091576213509770743459571463402, 0.109951743655321867388542968871);
    return r;
  }();
  static const QuadratureRule twelve_point = [] {
    QuadratureRule r;
    r.degree = 6;
    detail::add_s21(r, 0.249286745170910421291638553107, 0.116786275726378671398300263591);
    detail::add_s21(r, 0.063089014491502228340331602870, 0.050844906370206816920936809106);
    detail::add_s111(r, 0.053145049844816947353249671631, 0.310352451033784405416607733956,
                     0.082851075618373575193553456421);
    return r;
  }();

  if (degree <= 1) return centroid;
  if (degree <= 2) return midpoints;
  if (degree <= 4) return six_point;
  if (degree <= 6) return twelve_point;
  throw std::invalid_argument("no quadrature rule of degree " + std::to_string(degree));
}

}  // namespace alefem::fem
