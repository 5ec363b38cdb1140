#pragma once

#include <array>
#include <stdexcept>
#include <string>

#include "alefem/tensor2.hpp"

namespace alefem::fem {

inline constexpr int kMaxLocalDofs = 6;

/// Values and reference-coordinate gradients of the Lagrange basis at one
/// point. Only the first `count` entries are meaningful.
struct BasisEvaluation {
  int count = 0;
  std::array<double, kMaxLocalDofs> values{};
  std::array<Vec2d, kMaxLocalDofs> gradients{};
};

inline int local_dof_count(int degree) {
  if (degree == 1) return 3;
  if (degree == 2) return 6;
  throw std::invalid_argument("unsupported element degree " + std::to_string(degree));
}

/// Lagrange basis on the reference triangle (0,0),(1,0),(0,1) at barycentric
/// point `bary` (lambda_0 belongs to vertex (0,0)). Local ordering: the three
/// vertices, then for P2 the midpoints of edges (0,1), (1,2), (2,0).
/// Gradients are with respect to the reference coordinates (xi, eta).
inline BasisEvaluation reference_basis(int degree, const std::array<double, 3>& bary) {
  static constexpr std::array<Vec2d, 3> dl{{{-1.0, -1.0}, {1.0, 0.0}, {0.0, 1.0}}};
  BasisEvaluation out;
  out.count = local_dof_count(degree);
  const auto& l = bary;
  if (degree == 1) {
    for (int k = 0; k < 3; ++k) {
      out.values[k] = l[k];
      out.gradients[k] = dl[k];
    }
    return out;
  }
  for (int k = 0; k < 3; ++k) {
    out.values[k] = l[k] * (2.0 * l[k] - 1.0);
    out.gradients[k] = (4.0 * l[k] - 1.0) * dl[k];
  }
  static constexpr std::array<std::array<int, 2>, 3> edges{{{0, 1}, {1, 2}, {2, 0}}};
  for (int m = 0; m < 3; ++m) {
    const int i = edges[m][0], j = edges[m][1];
    out.values[3 + m] = 4.0 * l[i] * l[j];
    out.gradients[3 + m] = (4.0 * l[j]) * dl[i] + (4.0 * l[i]) * dl[j];
  }
  return out;
}

}  // namespace alefem::fem
