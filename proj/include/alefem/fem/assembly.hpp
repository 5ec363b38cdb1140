#pragma once

#include <array>
#include <cstddef>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "alefem/ale.hpp"
#include "alefem/fem/lagrange.hpp"
#include "alefem/fem/linear_algebra.hpp"
#include "alefem/fem/quadrature.hpp"
#include "alefem/fem/space.hpp"

namespace alefem::fem {

/// A quadrature point handed to user callables: element, barycentric
/// coordinates, and referent position.
struct QuadPoint {
  std::size_t element = 0;
  std::array<double, 3> bary{};
  Point referent{};
};

/// Maps quadrature points to the physical configuration through the P1
/// displacement interpolant.
struct PhysicalPlacement {
  const Mesh* mesh;
  const DisplacementField* displacement;

  Point operator()(const QuadPoint& q) const {
    const Triangle& t = mesh->element(q.element);
    Point x = q.referent;
    for (int k = 0; k < 3; ++k) x = x + q.bary[k] * (*displacement)[t[k]];
    return x;
  }
};

namespace detail {

/// Basis values and referent gradients at one quadrature point of one element.
struct PointData {
  QuadPoint point;
  double weight = 0.0;  ///< includes the element measure
  BasisEvaluation basis;
};

template <class Visitor>
void for_each_quadrature_point(const FeSpace& space, std::size_t e, const QuadratureRule& rule, Visitor&& visit) {
  const ElementMap& map = space.element_map(e);
  const auto v = space.mesh().element_vertices(e);
  for (std::size_t q = 0; q < rule.size(); ++q) {
    PointData pd;
    pd.point.element = e;
    pd.point.bary = rule.points[q];
    pd.point.referent = pd.point.bary[0] * v[0] + pd.point.bary[1] * v[1] + pd.point.bary[2] * v[2];
    pd.weight = 2.0 * map.area * rule.weights[q];
    pd.basis = reference_basis(space.degree(), pd.point.bary);
    for (int i = 0; i < pd.basis.count; ++i) pd.basis.gradients[i] = map.inverse_transpose * pd.basis.gradients[i];
    visit(pd);
  }
}

using LocalMatrix = std::array<std::array<double, kMaxLocalDofs>, kMaxLocalDofs>;

template <class LocalKernel>
SparseMatrix assemble_matrix(const FeSpace& space, int quad_degree, LocalKernel&& kernel) {
  const QuadratureRule& rule = quadrature_rule(quad_degree);
  const int nloc = space.dofs_per_element();
  TripletAssembler assembler(space.n_dofs());
  assembler.reserve(space.mesh().num_elements() * nloc * nloc);
  for (std::size_t e = 0; e < space.mesh().num_elements(); ++e) {
    LocalMatrix local{};
    for_each_quadrature_point(space, e, rule, [&](const PointData& pd) { kernel(e, pd, local); });
    const auto dofs = space.element_dofs(e);
    for (int i = 0; i < nloc; ++i)
      for (int j = 0; j < nloc; ++j) assembler.add(dofs[i], dofs[j], local[i][j]);
  }
  return assembler.build();
}

inline void require_positive_jacobians(std::span<const double> jac, std::size_t n, const char* who) {
  if (jac.size() != n) throw std::invalid_argument(std::string(who) + ": jacobian field has wrong length");
  for (std::size_t e = 0; e < n; ++e)
    if (!(jac[e] > 0.0))
      throw std::domain_error(std::string(who) + ": nonpositive jacobian " + std::to_string(jac[e]) + " on element " +
                              std::to_string(e) + " (tangled grid)");
}

}  // namespace detail

/// M_ij = sum_K int psi_i psi_j J_K, J piecewise constant.
inline SparseMatrix assemble_weighted_mass(const FeSpace& space, std::span<const double> jac) {
  detail::require_positive_jacobians(jac, space.mesh().num_elements(), "assemble_weighted_mass");
  return detail::assemble_matrix(space, 2 * space.degree(), [&](std::size_t e, const detail::PointData& pd, auto& local) {
    const double w = pd.weight * jac[e];
    for (int i = 0; i < pd.basis.count; ++i)
      for (int j = 0; j < pd.basis.count; ++j) local[i][j] += w * pd.basis.values[i] * pd.basis.values[j];
  });
}

/// Pulled-back diffusion d(u, psi) = dt int alpha / J (C^T grad psi) . (C^T grad u)
/// with the cofactor C and jacobian J of the interval end.
inline SparseMatrix assemble_pulled_back_stiffness(const FeSpace& space, double alpha, double dt,
                                                   std::span<const Mat2d> cofactor, std::span<const double> jac) {
  detail::require_positive_jacobians(jac, space.mesh().num_elements(), "assemble_pulled_back_stiffness");
  if (cofactor.size() != jac.size()) throw std::invalid_argument("assemble_pulled_back_stiffness: cofactor size mismatch");
  const int qdeg = std::max(1, 2 * (space.degree() - 1));
  return detail::assemble_matrix(space, qdeg, [&](std::size_t e, const detail::PointData& pd, auto& local) {
    const Mat2d ct = transpose(cofactor[e]);
    const double w = pd.weight * dt * alpha / jac[e];
    std::array<Vec2d, kMaxLocalDofs> g;
    for (int i = 0; i < pd.basis.count; ++i) g[i] = ct * pd.basis.gradients[i];
    for (int i = 0; i < pd.basis.count; ++i)
      for (int j = 0; j < pd.basis.count; ++j) local[i][j] += w * dot(g[i], g[j]);
  });
}

/// Convenience overload taking the end-of-interval displacement.
inline SparseMatrix assemble_pulled_back_stiffness(const FeSpace& space, double alpha, double dt,
                                                   const DisplacementField& u_end) {
  const auto c = element_cofactors(space.mesh(), u_end);
  const auto j = element_jacobians(space.mesh(), u_end);
  return assemble_pulled_back_stiffness(space, alpha, dt, c, j);
}

/// Mesh-motion operator
///   M_ij = int psi_i (F . grad psi_j) + int psi_i psi_j div F
/// for a per-element linear flux F (the time-integrated C w).
inline SparseMatrix assemble_mesh_motion_operator(const FeSpace& space, std::span<const ElementFlux> flux) {
  if (flux.size() != space.mesh().num_elements())
    throw std::invalid_argument("assemble_mesh_motion_operator: flux field size mismatch");
  return detail::assemble_matrix(space, 2 * space.degree(), [&](std::size_t e, const detail::PointData& pd, auto& local) {
    const auto& f = flux[e];
    Vec2d fq{};
    for (int k = 0; k < 3; ++k) fq = fq + pd.point.bary[k] * f.vertex_values[k];
    for (int i = 0; i < pd.basis.count; ++i) {
      const double wi = pd.weight * pd.basis.values[i];
      for (int j = 0; j < pd.basis.count; ++j)
        local[i][j] += wi * (dot(fq, pd.basis.gradients[j]) + pd.basis.values[j] * f.divergence);
    }
  });
}

/// b_i = dt sum_K int psi_i f J_K, with f sampled at the quadrature points.
/// `source` is called as source(const QuadPoint&).
template <class Source>
Vector assemble_load(const FeSpace& space, double dt, std::span<const double> jac, Source&& source) {
  detail::require_positive_jacobians(jac, space.mesh().num_elements(), "assemble_load");
  const QuadratureRule& rule = quadrature_rule(space.degree() + 2);
  Vector b = Vector::Zero(static_cast<Eigen::Index>(space.n_dofs()));
  for (std::size_t e = 0; e < space.mesh().num_elements(); ++e) {
    const auto dofs = space.element_dofs(e);
    detail::for_each_quadrature_point(space, e, rule, [&](const detail::PointData& pd) {
      const double w = dt * pd.weight * jac[e] * source(pd.point);
      for (int i = 0; i < pd.basis.count; ++i) b[static_cast<Eigen::Index>(dofs[i])] += w * pd.basis.values[i];
    });
  }
  return b;
}

/// Plain mass and stiffness on the mesh as given (J = 1, C = I).
inline SparseMatrix assemble_mass(const FeSpace& space) {
  const std::vector<double> ones(space.mesh().num_elements(), 1.0);
  return assemble_weighted_mass(space, ones);
}

inline SparseMatrix assemble_stiffness(const FeSpace& space) {
  const std::vector<double> ones(space.mesh().num_elements(), 1.0);
  const std::vector<Mat2d> eye(space.mesh().num_elements(), identity2());
  return assemble_pulled_back_stiffness(space, 1.0, 1.0, eye, ones);
}

}  // namespace alefem::fem
