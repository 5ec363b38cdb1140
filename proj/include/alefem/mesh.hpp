#pragma once

#include <algorithm>
#include <array>
#include <cstddef>
#include <map>
#include <ostream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "alefem/tensor2.hpp"

namespace alefem {

using Triangle = std::array<std::size_t, 3>;

inline constexpr int kDirichletMarker = 1;

struct BoundaryEdge {
  std::array<std::size_t, 2> nodes;
  int marker = kDirichletMarker;
};

inline double signed_area(const Point& a, const Point& b, const Point& c) { return 0.5 * cross(b - a, c - a); }

/// Area of a triangle given by its vertices; throws std::domain_error for a
/// degenerate or clockwise triangle.
inline double triangle_area(const Point& a, const Point& b, const Point& c) {
  const double area = signed_area(a, b, c);
  if (!(area > 0.0)) throw std::domain_error("degenerate or inverted triangle (signed area " + std::to_string(area) + ")");
  return area;
}

/// Fixed referent triangulation. Validated on construction and immutable
/// afterwards; all motion lives in displacement fields.
class Mesh {
 public:
  Mesh(std::vector<Point> nodes, std::vector<Triangle> triangles, std::vector<BoundaryEdge> boundary_edges)
      : nodes_(std::move(nodes)), triangles_(std::move(triangles)), boundary_edges_(std::move(boundary_edges)) {
    validate();
  }

  const std::vector<Point>& nodes() const { return nodes_; }
  const std::vector<Triangle>& triangles() const { return triangles_; }
  const std::vector<BoundaryEdge>& boundary_edges() const { return boundary_edges_; }

  std::size_t num_nodes() const { return nodes_.size(); }
  std::size_t num_elements() const { return triangles_.size(); }

  const Point& node(std::size_t i) const { return nodes_.at(i); }
  const Triangle& element(std::size_t e) const { return triangles_.at(e); }

  std::array<Point, 3> element_vertices(std::size_t e) const {
    const Triangle& t = element(e);
    return {nodes_[t[0]], nodes_[t[1]], nodes_[t[2]]};
  }

 private:
  void validate() const {
    for (std::size_t e = 0; e < triangles_.size(); ++e) {
      for (std::size_t n : triangles_[e])
        if (n >= nodes_.size()) throw std::invalid_argument("triangle " + std::to_string(e) + " references node out of range");
      const Triangle& t = triangles_[e];
      if (!(signed_area(nodes_[t[0]], nodes_[t[1]], nodes_[t[2]]) > 0.0))
        throw std::invalid_argument("triangle " + std::to_string(e) + " has nonpositive signed area");
    }
    std::map<std::pair<std::size_t, std::size_t>, int> edge_count;
    for (const Triangle& t : triangles_)
      for (int k = 0; k < 3; ++k) {
        auto a = t[k], b = t[(k + 1) % 3];
        ++edge_count[{std::min(a, b), std::max(a, b)}];
      }
    for (const BoundaryEdge& be : boundary_edges_) {
      auto [a, b] = be.nodes;
      if (a >= nodes_.size() || b >= nodes_.size()) throw std::invalid_argument("boundary edge references node out of range");
      auto it = edge_count.find({std::min(a, b), std::max(a, b)});
      if (it == edge_count.end() || it->second != 1)
        throw std::invalid_argument("boundary edge (" + std::to_string(a) + "," + std::to_string(b) +
                                    ") does not belong to exactly one triangle");
    }
  }

  std::vector<Point> nodes_;
  std::vector<Triangle> triangles_;
  std::vector<BoundaryEdge> boundary_edges_;
};

/// Structured triangulation of [0,1]^2 with nx*ny cells, each split along
/// the bottom-left to top-right diagonal. All four sides are Dirichlet.
inline Mesh build_unit_square_mesh(std::size_t nx, std::size_t ny) {
  if (nx == 0 || ny == 0) throw std::invalid_argument("build_unit_square_mesh: nx and ny must be >= 1");
  std::vector<Point> nodes;
  nodes.reserve((nx + 1) * (ny + 1));
  for (std::size_t j = 0; j <= ny; ++j)
    for (std::size_t i = 0; i <= nx; ++i)
      nodes.push_back({static_cast<double>(i) / static_cast<double>(nx), static_cast<double>(j) / static_cast<double>(ny)});
  auto id = [nx](std::size_t i, std::size_t j) { return j * (nx + 1) + i; };

  std::vector<Triangle> tris;
  tris.reserve(2 * nx * ny);
  for (std::size_t j = 0; j < ny; ++j)
    for (std::size_t i = 0; i < nx; ++i) {
      const std::size_t n00 = id(i, j), n10 = id(i + 1, j), n01 = id(i, j + 1), n11 = id(i + 1, j + 1);
      tris.push_back({n00, n10, n11});
      tris.push_back({n00, n11, n01});
    }

  std::vector<BoundaryEdge> edges;
  edges.reserve(2 * (nx + ny));
  for (std::size_t i = 0; i < nx; ++i) edges.push_back({{id(i, 0), id(i + 1, 0)}});
  for (std::size_t j = 0; j < ny; ++j) edges.push_back({{id(nx, j), id(nx, j + 1)}});
  for (std::size_t i = nx; i > 0; --i) edges.push_back({{id(i, ny), id(i - 1, ny)}});
  for (std::size_t j = ny; j > 0; --j) edges.push_back({{id(0, j), id(0, j - 1)}});
  return Mesh(std::move(nodes), std::move(tris), std::move(edges));
}

inline double element_area(const Mesh& mesh, std::size_t e) {
  if (e >= mesh.num_elements()) throw std::out_of_range("element index " + std::to_string(e) + " out of range");
  const auto v = mesh.element_vertices(e);
  return triangle_area(v[0], v[1], v[2]);
}

/// Sorted indices of nodes incident to a boundary edge.
inline std::vector<std::size_t> boundary_node_set(const Mesh& mesh) {
  std::vector<std::size_t> out;
  for (const BoundaryEdge& be : mesh.boundary_edges()) {
    out.push_back(be.nodes[0]);
    out.push_back(be.nodes[1]);
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

/// Referent gradients of the three barycentric coordinates of element e.
inline std::array<Vec2d, 3> barycentric_gradients(const Mesh& mesh, std::size_t e) {
  const auto v = mesh.element_vertices(e);
  const double two_area = 2.0 * signed_area(v[0], v[1], v[2]);
  std::array<Vec2d, 3> g;
  for (int k = 0; k < 3; ++k) {
    const Point& b = v[(k + 1) % 3];
    const Point& c = v[(k + 2) % 3];
    g[k] = {(b.y - c.y) / two_area, (c.x - b.x) / two_area};
  }
  return g;
}

/// Same connectivity with every node moved by the given displacement.
inline Mesh displaced_mesh(const Mesh& mesh, const std::vector<Vec2d>& displacement) {
  if (displacement.size() != mesh.num_nodes()) throw std::invalid_argument("displaced_mesh: size mismatch");
  std::vector<Point> nodes(mesh.nodes());
  for (std::size_t i = 0; i < nodes.size(); ++i) nodes[i] = nodes[i] + displacement[i];
  return Mesh(std::move(nodes), mesh.triangles(), mesh.boundary_edges());
}

/// Debug listing: one "i x y" line per node, then one "e n0 n1 n2" line per triangle.
inline void write_mesh_dump(std::ostream& os, const Mesh& mesh) {
  const auto old = os.precision(17);
  for (std::size_t i = 0; i < mesh.num_nodes(); ++i) os << i << ' ' << mesh.node(i).x << ' ' << mesh.node(i).y << '\n';
  for (std::size_t e = 0; e < mesh.num_elements(); ++e) {
    const Triangle& t = mesh.element(e);
    os << e << ' ' << t[0] << ' ' << t[1] << ' ' << t[2] << '\n';
  }
  os.precision(old);
}

}  // namespace alefem
