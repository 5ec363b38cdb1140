#pragma once

// Independent reference computations used by the tests: closed-form P1
// element matrices on given node coordinates, dense comparison helpers and
// fourth-order finite differences.

#include <Eigen/Dense>
#include <array>
#include <cmath>
#include <vector>

#include "alefem/fem/linear_algebra.hpp"
#include "alefem/mesh.hpp"

namespace oracle {

using alefem::Point;

struct P1Matrices {
  Eigen::MatrixXd mass;
  Eigen::MatrixXd stiffness;
};

/// Textbook P1 mass |K|/12 (1 + delta_ij) and stiffness |K| grad(l_i).grad(l_j),
/// assembled densely over triangles with the given node positions.
inline P1Matrices p1_matrices(const std::vector<Point>& nodes, const std::vector<alefem::Triangle>& tris) {
  const auto n = static_cast<Eigen::Index>(nodes.size());
  P1Matrices m{Eigen::MatrixXd::Zero(n, n), Eigen::MatrixXd::Zero(n, n)};
  for (const auto& t : tris) {
    const Point a = nodes[t[0]], b = nodes[t[1]], c = nodes[t[2]];
    const double area = 0.5 * ((b.x - a.x) * (c.y - a.y) - (c.x - a.x) * (b.y - a.y));
    // grad of barycentric l_k = rot90(opposite edge) / (2 area)
    const std::array<std::array<double, 2>, 3> g{{{b.y - c.y, c.x - b.x}, {c.y - a.y, a.x - c.x}, {a.y - b.y, b.x - a.x}}};
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) {
        const auto I = static_cast<Eigen::Index>(t[i]), J = static_cast<Eigen::Index>(t[j]);
        m.mass(I, J) += area / 12.0 * (i == j ? 2.0 : 1.0);
        m.stiffness(I, J) += (g[i][0] * g[j][0] + g[i][1] * g[j][1]) / (4.0 * area);
      }
  }
  return m;
}

inline double max_abs_diff(const alefem::fem::SparseMatrix& a, const Eigen::MatrixXd& b) {
  return (Eigen::MatrixXd(a) - b).cwiseAbs().maxCoeff();
}

inline double max_abs_diff(const alefem::fem::SparseMatrix& a, const alefem::fem::SparseMatrix& b) {
  return (Eigen::MatrixXd(a) - Eigen::MatrixXd(b)).cwiseAbs().maxCoeff();
}

/// Fourth-order central first and second derivatives of f at 0.
template <class F>
double d1(F&& f, double h) {
  return (-f(2 * h) + 8 * f(h) - 8 * f(-h) + f(-2 * h)) / (12 * h);
}
template <class F>
double d2(F&& f, double h) {
  return (-f(2 * h) + 16 * f(h) - 30 * f(0.0) + 16 * f(-h) - f(-2 * h)) / (12 * h * h);
}

}  // namespace oracle
