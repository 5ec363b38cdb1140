#pragma once

#include <cmath>
#include <cstddef>
#include <span>
#include <stdexcept>

#include "alefem/fem/assembly.hpp"

namespace alefem::fem {

namespace detail {
inline double field_at(const FeSpace& space, const Vector& u, std::size_t e, const BasisEvaluation& basis) {
  const auto dofs = space.element_dofs(e);
  double s = 0.0;
  for (int i = 0; i < basis.count; ++i) s += basis.values[i] * u[static_cast<Eigen::Index>(dofs[i])];
  return s;
}
}  // namespace detail

/// ||u||_{L2(Omega(t))} = sqrt(int_ref u^2 J).
inline double l2_norm_current_domain(const FeSpace& space, const Vector& u, std::span<const double> jac) {
  if (static_cast<std::size_t>(u.size()) != space.n_dofs()) throw std::invalid_argument("l2_norm_current_domain: size mismatch");
  detail::require_positive_jacobians(jac, space.mesh().num_elements(), "l2_norm_current_domain");
  const QuadratureRule& rule = quadrature_rule(2 * space.degree());
  double sum = 0.0;
  for (std::size_t e = 0; e < space.mesh().num_elements(); ++e)
    detail::for_each_quadrature_point(space, e, rule, [&](const detail::PointData& pd) {
      const double v = detail::field_at(space, u, e, pd.basis);
      sum += pd.weight * jac[e] * v * v;
    });
  return std::sqrt(sum);
}

/// sqrt(int_ref (u_h - u_exact)^2 J); `exact` is called as exact(const QuadPoint&).
template <class Exact>
double l2_error_vs_exact(const FeSpace& space, const Vector& u, Exact&& exact, std::span<const double> jac,
                         int quad_degree = 0) {
  if (static_cast<std::size_t>(u.size()) != space.n_dofs()) throw std::invalid_argument("l2_error_vs_exact: size mismatch");
  detail::require_positive_jacobians(jac, space.mesh().num_elements(), "l2_error_vs_exact");
  const QuadratureRule& rule = quadrature_rule(std::max(quad_degree, 2 * space.degree() + 2));
  double sum = 0.0;
  for (std::size_t e = 0; e < space.mesh().num_elements(); ++e)
    detail::for_each_quadrature_point(space, e, rule, [&](const detail::PointData& pd) {
      const double d = detail::field_at(space, u, e, pd.basis) - exact(pd.point);
      sum += pd.weight * jac[e] * d * d;
    });
  return std::sqrt(sum);
}

}  // namespace alefem::fem
