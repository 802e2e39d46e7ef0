#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numbers>

#include "sdllb/mesh.hpp"

using namespace sdllb;

TEST_CASE("square mesh counts") {
  Mesh m1 = unit_square_mesh(1);
  CHECK(m1.vertex_count() == 4);
  CHECK(m1.triangle_count() == 2);
  validate(m1);

  Mesh m8 = unit_square_mesh(8);
  CHECK(m8.vertex_count() == 81);
  CHECK(m8.triangle_count() == 128);
  validate(m8);
}

TEST_CASE("square mesh partitions the domain") {
  Mesh m = unit_square_mesh(5);
  CHECK(total_area(m) == doctest::Approx(4.0).epsilon(1e-12));
}

TEST_CASE("disk mesh level 0 is a hexagon fan on the circle") {
  Mesh d = unit_disk_mesh(0);
  CHECK(d.vertex_count() == 7);
  CHECK(d.triangle_count() == 6);
  validate(d);
  int rim = 0;
  for (int v = 1; v < 7; ++v) {
    double r = std::hypot(d.vertices[v][0], d.vertices[v][1]);
    CHECK(std::fabs(r - 1.0) <= 1e-15);
    ++rim;
  }
  CHECK(rim == 6);
}

TEST_CASE("disk refinement quadruples the triangles") {
  CHECK(unit_disk_mesh(1).triangle_count() == 24);
  CHECK(unit_disk_mesh(2).triangle_count() == 96);
}

TEST_CASE("disk polygon area approaches pi") {
  // at level L the mesh tiles the inscribed regular 3*2^(L+1)-gon exactly
  for (int level = 0; level <= 4; ++level) {
    Mesh d = unit_disk_mesh(level);
    double ngon = 3.0 * (1 << (level + 1));
    double polygon_area = 0.5 * ngon * std::sin(2.0 * std::numbers::pi / ngon);
    CHECK(total_area(d) == doctest::Approx(polygon_area).epsilon(1e-12));
  }
  Mesh d4 = unit_disk_mesh(4);
  CHECK(std::fabs(total_area(d4) - std::numbers::pi) / std::numbers::pi < 0.005);
}

TEST_CASE("red refinement of the square") {
  Mesh m = unit_square_mesh(1);
  auto [fine, map] = refine(m);
  CHECK(fine.vertex_count() == 9);
  CHECK(fine.triangle_count() == 8);
  validate(fine);
  CHECK(map.coarse_triangle_count == 2);

  auto [finer, map2] = refine(fine);
  CHECK(finer.triangle_count() == 32);  // x16 over two refinements
  validate(finer);

  // children tile their parent exactly
  for (int parent = 0; parent < m.triangle_count(); ++parent) {
    double sum = 0.0;
    for (int t = 0; t < fine.triangle_count(); ++t)
      if (map.parent_of_triangle[t][0] == parent) sum += triangle_area(fine, t);
    CHECK(sum == doctest::Approx(triangle_area(m, parent)).epsilon(1e-14));
  }
}

TEST_CASE("refinement map bookkeeping") {
  Mesh m = unit_square_mesh(2);
  auto [fine, map] = refine(m);
  CHECK(static_cast<int>(map.parent_of_triangle.size()) == fine.triangle_count());
  int children[8] = {0};
  for (const auto& p : map.parent_of_triangle) {
    CHECK(p[1] >= 0);
    CHECK(p[1] < 4);
    children[p[0]]++;
  }
  for (int t = 0; t < m.triangle_count(); ++t) CHECK(children[t] == 4);
  for (int v = 0; v < map.coarse_vertex_count; ++v)
    CHECK(map.vertex_origin[v].coarse_vertex == v);
  for (int v = map.coarse_vertex_count; v < fine.vertex_count(); ++v) {
    CHECK(map.vertex_origin[v].coarse_vertex == -1);
    CHECK(map.vertex_origin[v].edge_a >= 0);
  }
}

TEST_CASE("mesh size") {
  CHECK(mesh_size(unit_square_mesh(1)) == doctest::Approx(2.0 * std::sqrt(2.0)).epsilon(1e-15));
  CHECK(mesh_size(unit_square_mesh(8)) == doctest::Approx(std::sqrt(2.0) / 4.0).epsilon(1e-15));

  Mesh m = unit_square_mesh(4);
  auto [fine, map] = refine(m);
  CHECK(mesh_size(fine) == doctest::Approx(mesh_size(m) / 2.0).epsilon(1e-15));
}

TEST_CASE("shape regularity across the refinement families") {
  // square family: angles preserved exactly
  Mesh sq = unit_square_mesh(2);
  double base_angle = min_angle_deg(sq);
  CHECK(base_angle == doctest::Approx(45.0).epsilon(1e-12));
  Mesh cur = sq;
  for (int l = 0; l < 3; ++l) {
    cur = refine(cur).first;
    CHECK(min_angle_deg(cur) >= base_angle - 1e-9);
  }
  // disk family
  for (int level = 0; level <= 4; ++level)
    CHECK(min_angle_deg(unit_disk_mesh(level)) >= 20.0);
}

TEST_CASE("quasi-uniformity within each mesh") {
  for (int n : {1, 4, 16}) {
    Mesh m = unit_square_mesh(n);
    CHECK(mesh_size(m) / min_edge_length(m) <= 4.0);
  }
  for (int level = 0; level <= 4; ++level) {
    Mesh d = unit_disk_mesh(level);
    CHECK(mesh_size(d) / min_edge_length(d) <= 4.0);
  }
}

TEST_CASE("Euler characteristic of simply connected meshes") {
  auto euler = [](const Mesh& m) {
    return m.vertex_count() - static_cast<int>(collect_edges(m).size()) + m.triangle_count();
  };
  CHECK(euler(unit_square_mesh(1)) == 1);
  CHECK(euler(unit_square_mesh(7)) == 1);
  CHECK(euler(unit_disk_mesh(0)) == 1);
  CHECK(euler(unit_disk_mesh(3)) == 1);
}

TEST_CASE("disk boundary midpoints stay on the circle after refinement") {
  Mesh d = unit_disk_mesh(3);
  for (const auto& e : d.boundary_edges) {
    for (int v : {e[0], e[1]}) {
      double r2 = d.vertices[v][0] * d.vertices[v][0] + d.vertices[v][1] * d.vertices[v][1];
      CHECK(std::fabs(r2 - 1.0) <= 1e-12);
    }
  }
}

TEST_CASE("invalid arguments") {
  CHECK_THROWS(unit_square_mesh(0));
  CHECK_THROWS(unit_disk_mesh(-1));
}
