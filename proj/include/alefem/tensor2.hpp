#pragma once

#include <cmath>

namespace alefem {

template <class T>
struct Vec2 {
  T x{};
  T y{};
};

/// 2x2 matrix stored by rows: [[xx, xy], [yx, yy]].
///
/// For a deformation gradient the first index is the physical component and
/// the second the referent derivative, i.e. xy = d x / d yhat.
template <class T>
struct Mat2 {
  T xx{};
  T xy{};
  T yx{};
  T yy{};
};

using Vec2d = Vec2<double>;
using Mat2d = Mat2<double>;
using Point = Vec2d;

inline constexpr Mat2d identity2() { return {1.0, 0.0, 0.0, 1.0}; }

template <class T>
constexpr Vec2<T> operator+(const Vec2<T>& a, const Vec2<T>& b) {
  return {a.x + b.x, a.y + b.y};
}
template <class T>
constexpr Vec2<T> operator-(const Vec2<T>& a, const Vec2<T>& b) {
  return {a.x - b.x, a.y - b.y};
}
constexpr Vec2d operator*(double s, const Vec2d& v) { return {s * v.x, s * v.y}; }
constexpr double dot(const Vec2d& a, const Vec2d& b) { return a.x * b.x + a.y * b.y; }
constexpr double cross(const Vec2d& a, const Vec2d& b) { return a.x * b.y - a.y * b.x; }

template <class T>
constexpr Mat2<T> operator+(const Mat2<T>& a, const Mat2<T>& b) {
  return {a.xx + b.xx, a.xy + b.xy, a.yx + b.yx, a.yy + b.yy};
}
template <class T>
constexpr Mat2<T> operator-(const Mat2<T>& a, const Mat2<T>& b) {
  return {a.xx - b.xx, a.xy - b.xy, a.yx - b.yx, a.yy - b.yy};
}
constexpr Mat2d operator*(double s, const Mat2d& m) { return {s * m.xx, s * m.xy, s * m.yx, s * m.yy}; }

template <class A, class B>
constexpr auto operator*(const Mat2<A>& m, const Vec2<B>& v) -> Vec2<decltype(m.xx * v.x)> {
  return {m.xx * v.x + m.xy * v.y, m.yx * v.x + m.yy * v.y};
}

template <class A, class B>
constexpr auto operator*(const Mat2<A>& a, const Mat2<B>& b) -> Mat2<decltype(a.xx * b.xx)> {
  return {a.xx * b.xx + a.xy * b.yx, a.xx * b.xy + a.xy * b.yy,
          a.yx * b.xx + a.yy * b.yx, a.yx * b.xy + a.yy * b.yy};
}

template <class T>
constexpr Mat2<T> transpose(const Mat2<T>& m) {
  return {m.xx, m.yx, m.xy, m.yy};
}

template <class T, class F>
constexpr auto map_entries(const Mat2<T>& m, F&& f) -> Mat2<decltype(f(m.xx))> {
  return {f(m.xx), f(m.xy), f(m.yx), f(m.yy)};
}

/// Cofactor (adjugate) matrix C with G * C = det(G) * I. Defined for
/// singular G as well; for invertible G, inverse(G) = C / det(G).
template <class T>
constexpr Mat2<T> cofactor2d(const Mat2<T>& g) {
  return {g.yy, -g.xy, -g.yx, g.xx};
}

/// Determinant. Works entrywise on polynomial matrices, where the result
/// degree is twice the entry degree.
template <class T>
constexpr auto jacobian(const Mat2<T>& g) {
  return g.xx * g.yy - g.xy * g.yx;
}

inline Mat2d inverse(const Mat2d& g) {
  const double det = jacobian(g);
  const Mat2d c = cofactor2d(g);
  return (1.0 / det) * c;
}

inline double max_abs_entry(const Mat2d& m) {
  return std::fmax(std::fmax(std::fabs(m.xx), std::fabs(m.xy)), std::fmax(std::fabs(m.yx), std::fabs(m.yy)));
}

}  // namespace alefem
