#pragma once

#include <algorithm>
#include <array>
#include <cstddef>

namespace alefem {

/// Polynomial in the interval-local time variable t, stored as monomial
/// coefficients c[0] + c[1] t + ... + c[Degree] t^Degree.
///
/// The degree is part of the type so that products of geometry polynomials
/// carry their degree bound at compile time (a product of a degree-2 and a
/// degree-1 polynomial is a TimePolynomial<3>). Integration is termwise and
/// exact.
template <int Degree>
struct TimePolynomial {
  static_assert(Degree >= 0);
  static constexpr int degree = Degree;

  std::array<double, Degree + 1> coeffs{};

  constexpr TimePolynomial() = default;
  constexpr TimePolynomial(double constant) { coeffs[0] = constant; }  // NOLINT: implicit by intent
  constexpr explicit TimePolynomial(const std::array<double, Degree + 1>& c) : coeffs(c) {}

  template <int Other>
    requires(Other < Degree)
  constexpr TimePolynomial(const TimePolynomial<Other>& p) {  // NOLINT: widening is lossless
    std::copy(p.coeffs.begin(), p.coeffs.end(), coeffs.begin());
  }

  constexpr double operator[](std::size_t k) const { return coeffs[k]; }
  constexpr double& operator[](std::size_t k) { return coeffs[k]; }

  constexpr double operator()(double t) const {
    double acc = coeffs[Degree];
    for (int k = Degree - 1; k >= 0; --k) acc = acc * t + coeffs[k];
    return acc;
  }

  /// Exact value of the integral over [0, t].
  constexpr double integral(double t) const {
    double acc = coeffs[Degree] / (Degree + 1);
    for (int k = Degree - 1; k >= 0; --k) acc = acc * t + coeffs[k] / (k + 1);
    return acc * t;
  }

  constexpr TimePolynomial<(Degree > 0 ? Degree - 1 : 0)> derivative() const {
    TimePolynomial<(Degree > 0 ? Degree - 1 : 0)> d;
    for (int k = 1; k <= Degree; ++k) d.coeffs[k - 1] = k * coeffs[k];
    return d;
  }

  /// Highest index with a nonzero coefficient (0 for the zero polynomial).
  constexpr int effective_degree() const {
    for (int k = Degree; k > 0; --k)
      if (coeffs[k] != 0.0) return k;
    return 0;
  }

  constexpr TimePolynomial operator-() const {
    TimePolynomial r;
    for (int k = 0; k <= Degree; ++k) r.coeffs[k] = -coeffs[k];
    return r;
  }

  constexpr TimePolynomial& operator*=(double s) {
    for (auto& c : coeffs) c *= s;
    return *this;
  }
};

template <int A, int B>
constexpr TimePolynomial<std::max(A, B)> operator+(const TimePolynomial<A>& p, const TimePolynomial<B>& q) {
  TimePolynomial<std::max(A, B)> r;
  for (int k = 0; k <= A; ++k) r.coeffs[k] += p.coeffs[k];
  for (int k = 0; k <= B; ++k) r.coeffs[k] += q.coeffs[k];
  return r;
}

template <int A, int B>
constexpr TimePolynomial<std::max(A, B)> operator-(const TimePolynomial<A>& p, const TimePolynomial<B>& q) {
  return p + (-q);
}

template <int A, int B>
constexpr TimePolynomial<A + B> operator*(const TimePolynomial<A>& p, const TimePolynomial<B>& q) {
  TimePolynomial<A + B> r;
  for (int i = 0; i <= A; ++i)
    for (int j = 0; j <= B; ++j) r.coeffs[i + j] += p.coeffs[i] * q.coeffs[j];
  return r;
}

template <int A>
constexpr TimePolynomial<A> operator*(double s, TimePolynomial<A> p) {
  p *= s;
  return p;
}

template <int A>
constexpr TimePolynomial<A> operator*(TimePolynomial<A> p, double s) {
  p *= s;
  return p;
}

template <class T>
struct is_time_polynomial : std::false_type {};
template <int D>
struct is_time_polynomial<TimePolynomial<D>> : std::true_type {};

}  // namespace alefem
