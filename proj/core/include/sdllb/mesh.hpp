#pragma once

#include <array>
#include <utility>
#include <vector>

namespace sdllb {

/// Conforming triangulation of the square [-1,1]^2 or the (polygonal
/// approximation of the) unit disk. Immutable after construction.
struct Mesh {
  enum class Domain { Square, Disk };

  std::vector<std::array<double, 2>> vertices;
  std::vector<std::array<int, 3>> triangles;  // counter-clockwise
  std::vector<std::array<int, 2>> boundary_edges;
  Domain domain_tag = Domain::Square;
  int level = 0;

  int vertex_count() const { return static_cast<int>(vertices.size()); }
  int triangle_count() const { return static_cast<int>(triangles.size()); }
};

/// Lineage of one red refinement: each coarse triangle gets 4 children
/// (slots 0..2 at the corners, slot 3 central), each fine vertex is a
/// coarse vertex or a coarse edge midpoint.
struct RefinementMap {
  struct VertexOrigin {
    int coarse_vertex = -1;      // >= 0 when the vertex is inherited
    int edge_a = -1, edge_b = -1;  // coarse edge endpoints for midpoints
  };

  std::vector<std::array<int, 2>> parent_of_triangle;  // {coarse tri, slot}
  std::vector<VertexOrigin> vertex_origin;
  int coarse_vertex_count = 0;
  int coarse_triangle_count = 0;
};

/// Uniform grid on [-1,1]^2, n cells per side, each cell split along the
/// diagonal from lower-left to upper-right.
Mesh unit_square_mesh(int n);

/// Level 0 is a regular hexagon fan around the origin with rim vertices on
/// the unit circle; each level applies red refinement with boundary
/// midpoints projected radially back onto the circle.
Mesh unit_disk_mesh(int level);

/// Red refinement: every triangle split into 4 via edge midpoints. Disk
/// boundary midpoints are projected onto the unit circle.
std::pair<Mesh, RefinementMap> refine(const Mesh& mesh);

/// Maximum edge length over all triangles.
double mesh_size(const Mesh& mesh);

double triangle_area(const Mesh& mesh, int t);
double total_area(const Mesh& mesh);
double min_angle_deg(const Mesh& mesh);
double min_edge_length(const Mesh& mesh);

/// All edges as canonical (min,max) vertex pairs in lexicographic order.
std::vector<std::array<int, 2>> collect_edges(const Mesh& mesh);

/// Checks positive areas, edge-manifoldness and boundary-vertex placement;
/// throws std::runtime_error on violation.
void validate(const Mesh& mesh);

}  // namespace sdllb
