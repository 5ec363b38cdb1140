#include <gtest/gtest.h>

#include <set>
#include <sstream>

#include "alefem/mesh.hpp"

using namespace alefem;

namespace {
std::size_t unique_edges(const Mesh& m) {
  std::set<std::pair<std::size_t, std::size_t>> edges;
  for (const auto& t : m.triangles())
    for (int k = 0; k < 3; ++k) edges.insert({std::min(t[k], t[(k + 1) % 3]), std::max(t[k], t[(k + 1) % 3])});
  return edges.size();
}
}  // namespace

TEST(UnitSquareMesh, OneByOneHasFourNodesTwoTrianglesFourBoundaryEdges) {
  const Mesh m = build_unit_square_mesh(1, 1);
  EXPECT_EQ(m.num_nodes(), 4u);
  EXPECT_EQ(m.num_elements(), 2u);
  EXPECT_EQ(m.boundary_edges().size(), 4u);
  EXPECT_EQ(unique_edges(m), 5u);
}

TEST(UnitSquareMesh, TwoByTwoAreas) {
  const Mesh m = build_unit_square_mesh(2, 2);
  EXPECT_EQ(m.num_nodes(), 9u);
  EXPECT_EQ(m.num_elements(), 8u);
  for (std::size_t e = 0; e < m.num_elements(); ++e) EXPECT_DOUBLE_EQ(element_area(m, e), 0.125);
}

TEST(UnitSquareMesh, TwentyByTwentyCountsAndTotalArea) {
  const Mesh m = build_unit_square_mesh(20, 20);
  EXPECT_EQ(m.num_nodes(), 441u);
  EXPECT_EQ(m.num_elements(), 800u);
  double total = 0.0, smallest = 1.0;
  for (std::size_t e = 0; e < m.num_elements(); ++e) {
    total += element_area(m, e);
    smallest = std::min(smallest, element_area(m, e));
  }
  EXPECT_NEAR(total, 1.0, 1e-13);
  EXPECT_NEAR(smallest, 1.0 / 800.0, 1e-17);
}

TEST(UnitSquareMesh, TrianglesAreCounterClockwise) {
  const Mesh m = build_unit_square_mesh(3, 5);
  for (std::size_t e = 0; e < m.num_elements(); ++e) {
    const auto v = m.element_vertices(e);
    EXPECT_GT(signed_area(v[0], v[1], v[2]), 0.0);
  }
}

TEST(UnitSquareMesh, BoundaryNodeSet) {
  const auto b = boundary_node_set(build_unit_square_mesh(2, 2));
  EXPECT_EQ(b.size(), 8u);
  EXPECT_EQ(std::count(b.begin(), b.end(), 4u), 0);  // the centre node
  EXPECT_EQ(boundary_node_set(build_unit_square_mesh(7, 3)).size(), 2u * (7 + 3));
}

TEST(UnitSquareMesh, RejectsZeroCells) {
  EXPECT_THROW(build_unit_square_mesh(0, 3), std::invalid_argument);
  EXPECT_THROW(build_unit_square_mesh(3, 0), std::invalid_argument);
}

TEST(Mesh, ElementAreaOutOfRangeThrows) {
  const Mesh m = build_unit_square_mesh(1, 1);
  EXPECT_THROW(element_area(m, 2), std::out_of_range);
}

TEST(Mesh, TriangleArea) {
  EXPECT_DOUBLE_EQ(triangle_area({0, 0}, {1, 0}, {0, 1}), 0.5);
  EXPECT_THROW(triangle_area({0, 0}, {1, 1}, {2, 2}), std::domain_error);
}

TEST(Mesh, ValidationRejectsBadInput) {
  const std::vector<Point> nodes{{0, 0}, {1, 0}, {0, 1}};
  EXPECT_THROW(Mesh(nodes, {{0, 2, 1}}, {}), std::invalid_argument);  // clockwise
  EXPECT_THROW(Mesh(nodes, {{0, 1, 3}}, {}), std::invalid_argument);  // node out of range
  EXPECT_THROW(Mesh(nodes, {{0, 1, 2}}, {{{0, 3}}}), std::invalid_argument);
  EXPECT_NO_THROW(Mesh(nodes, {{0, 1, 2}}, {{{0, 1}}, {{1, 2}}, {{2, 0}}}));
}

TEST(Mesh, DumpListsNodesThenTriangles) {
  std::ostringstream os;
  write_mesh_dump(os, build_unit_square_mesh(1, 1));
  EXPECT_EQ(os.str(), "0 0 0\n1 1 0\n2 0 1\n3 1 1\n0 0 1 3\n1 0 3 2\n");
}

TEST(Mesh, DisplacedMeshMovesNodes) {
  const Mesh m = build_unit_square_mesh(1, 1);
  const Mesh d = displaced_mesh(m, std::vector<Vec2d>(4, Vec2d{0.5, -1.0}));
  EXPECT_DOUBLE_EQ(d.node(3).x, 1.5);
  EXPECT_DOUBLE_EQ(d.node(3).y, 0.0);
  EXPECT_THROW(displaced_mesh(m, std::vector<Vec2d>(3)), std::invalid_argument);
}
