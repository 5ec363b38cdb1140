#pragma once

#include <algorithm>
#include <array>
#include <cstddef>
#include <map>
#include <span>
#include <stdexcept>
#include <utility>
#include <vector>

#include <Eigen/Core>

#include "alefem/fem/lagrange.hpp"
#include "alefem/mesh.hpp"

namespace alefem::fem {

using Vector = Eigen::VectorXd;

/// Affine reference-to-referent map data of one triangle.
struct ElementMap {
  Mat2d inverse_transpose;  ///< B^{-T}; referent gradient = B^{-T} * reference gradient
  double area = 0.0;
};

/// Continuous Lagrange P1/P2 space on the fixed referent mesh.
///
/// P1 has one dof per node (dof index == node index). P2 appends one dof per
/// edge, numbered in order of first appearance while traversing elements.
class FeSpace {
 public:
  FeSpace(Mesh mesh, int degree) : mesh_(std::move(mesh)), degree_(degree), per_element_(local_dof_count(degree)) {
    const std::size_t nn = mesh_.num_nodes();
    for (std::size_t i = 0; i < nn; ++i) {
      dof_coords_.push_back(mesh_.node(i));
      parents_.push_back({i, i});
    }
    std::map<std::pair<std::size_t, std::size_t>, std::size_t> edge_dof;
    cell_dofs_.reserve(mesh_.num_elements() * per_element_);
    for (std::size_t e = 0; e < mesh_.num_elements(); ++e) {
      const Triangle& t = mesh_.element(e);
      cell_dofs_.insert(cell_dofs_.end(), t.begin(), t.end());
      if (degree_ == 2) {
        static constexpr std::array<std::array<int, 2>, 3> edges{{{0, 1}, {1, 2}, {2, 0}}};
        for (const auto& ed : edges) {
          const std::size_t a = t[ed[0]], b = t[ed[1]];
          const auto key = std::make_pair(std::min(a, b), std::max(a, b));
          auto [it, inserted] = edge_dof.try_emplace(key, dof_coords_.size());
          if (inserted) {
            dof_coords_.push_back(0.5 * (mesh_.node(a) + mesh_.node(b)));
            parents_.push_back({key.first, key.second});
          }
          cell_dofs_.push_back(it->second);
        }
      }
      const auto v = mesh_.element_vertices(e);
      const Mat2d b{v[1].x - v[0].x, v[2].x - v[0].x, v[1].y - v[0].y, v[2].y - v[0].y};
      maps_.push_back({transpose(inverse(b)), triangle_area(v[0], v[1], v[2])});
    }

    std::vector<std::size_t> bd = boundary_node_set(mesh_);
    if (degree_ == 2)
      for (const BoundaryEdge& be : mesh_.boundary_edges()) {
        auto a = be.nodes[0], b = be.nodes[1];
        bd.push_back(edge_dof.at({std::min(a, b), std::max(a, b)}));
      }
    std::sort(bd.begin(), bd.end());
    bd.erase(std::unique(bd.begin(), bd.end()), bd.end());
    boundary_dofs_ = std::move(bd);
  }

  const Mesh& mesh() const { return mesh_; }
  int degree() const { return degree_; }
  std::size_t n_dofs() const { return dof_coords_.size(); }
  int dofs_per_element() const { return per_element_; }

  std::span<const std::size_t> element_dofs(std::size_t e) const {
    return {cell_dofs_.data() + e * per_element_, static_cast<std::size_t>(per_element_)};
  }
  const ElementMap& element_map(std::size_t e) const { return maps_[e]; }

  const std::vector<Point>& dof_coords() const { return dof_coords_; }
  const std::vector<std::size_t>& boundary_dofs() const { return boundary_dofs_; }

  /// Mesh nodes whose P1 average gives the dof position (a vertex dof lists
  /// its node twice).
  const std::array<std::size_t, 2>& dof_parents(std::size_t i) const { return parents_[i]; }

  /// Positions of the dofs after moving the mesh by a nodal P1 displacement.
  std::vector<Point> displaced_dof_coords(const std::vector<Vec2d>& displacement) const {
    std::vector<Point> out(n_dofs());
    for (std::size_t i = 0; i < n_dofs(); ++i) {
      const auto [a, b] = parents_[i];
      out[i] = dof_coords_[i] + 0.5 * (displacement[a] + displacement[b]);
    }
    return out;
  }

  /// Nodal interpolant of f evaluated at the given dof positions.
  template <class F>
  Vector interpolate_at(const std::vector<Point>& positions, F&& f) const {
    Vector v(static_cast<Eigen::Index>(n_dofs()));
    for (std::size_t i = 0; i < n_dofs(); ++i) v[static_cast<Eigen::Index>(i)] = f(positions[i]);
    return v;
  }

  template <class F>
  Vector interpolate(F&& f) const {
    return interpolate_at(dof_coords_, std::forward<F>(f));
  }

 private:
  Mesh mesh_;
  int degree_;
  int per_element_;
  std::vector<Point> dof_coords_;
  std::vector<std::array<std::size_t, 2>> parents_;
  std::vector<std::size_t> cell_dofs_;
  std::vector<ElementMap> maps_;
  std::vector<std::size_t> boundary_dofs_;
};

}  // namespace alefem::fem
