#include "sdllb/mesh.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numbers>
#include <stdexcept>
#include <string>

namespace sdllb {

namespace {

std::array<int, 2> canon(int a, int b) { return {std::min(a, b), std::max(a, b)}; }

double edge_len(const Mesh& m, int a, int b) {
  double dx = m.vertices[b][0] - m.vertices[a][0];
  double dy = m.vertices[b][1] - m.vertices[a][1];
  return std::hypot(dx, dy);
}

std::vector<std::array<int, 2>> find_boundary_edges(const Mesh& m) {
  std::map<std::array<int, 2>, int> count;
  for (const auto& t : m.triangles)
    for (int e = 0; e < 3; ++e) count[canon(t[e], t[(e + 1) % 3])]++;
  std::vector<std::array<int, 2>> out;
  for (const auto& [edge, c] : count)
    if (c == 1) out.push_back(edge);
  return out;
}

}  // namespace

Mesh unit_square_mesh(int n) {
  if (n < 1) throw std::invalid_argument("unit_square_mesh: n must be >= 1");
  Mesh m;
  m.domain_tag = Mesh::Domain::Square;
  m.vertices.reserve(static_cast<std::size_t>(n + 1) * (n + 1));
  for (int j = 0; j <= n; ++j)
    for (int i = 0; i <= n; ++i)
      m.vertices.push_back({-1.0 + 2.0 * i / n, -1.0 + 2.0 * j / n});

  auto vid = [n](int i, int j) { return j * (n + 1) + i; };
  m.triangles.reserve(2 * static_cast<std::size_t>(n) * n);
  for (int j = 0; j < n; ++j) {
    for (int i = 0; i < n; ++i) {
      int ll = vid(i, j), lr = vid(i + 1, j), ur = vid(i + 1, j + 1), ul = vid(i, j + 1);
      m.triangles.push_back({ll, lr, ur});
      m.triangles.push_back({ll, ur, ul});
    }
  }
  m.boundary_edges = find_boundary_edges(m);
  return m;
}

Mesh unit_disk_mesh(int level) {
  if (level < 0) throw std::invalid_argument("unit_disk_mesh: level must be >= 0");
  Mesh m;
  m.domain_tag = Mesh::Domain::Disk;
  m.vertices.push_back({0.0, 0.0});
  for (int k = 0; k < 6; ++k) {
    double a = k * std::numbers::pi / 3.0;
    m.vertices.push_back({std::cos(a), std::sin(a)});
  }
  for (int k = 0; k < 6; ++k) m.triangles.push_back({0, 1 + k, 1 + (k + 1) % 6});
  m.boundary_edges = find_boundary_edges(m);
  for (int l = 0; l < level; ++l) m = refine(m).first;
  return m;
}

std::pair<Mesh, RefinementMap> refine(const Mesh& mesh) {
  Mesh fine;
  fine.domain_tag = mesh.domain_tag;
  fine.level = mesh.level + 1;
  fine.vertices = mesh.vertices;

  RefinementMap map;
  map.coarse_vertex_count = mesh.vertex_count();
  map.coarse_triangle_count = mesh.triangle_count();
  map.vertex_origin.resize(mesh.vertices.size());
  for (int v = 0; v < mesh.vertex_count(); ++v) map.vertex_origin[v].coarse_vertex = v;

  std::map<std::array<int, 2>, bool> on_boundary;
  for (const auto& e : mesh.boundary_edges) on_boundary[e] = true;

  // Midpoint vertex ids, numbered in sorted (min,max) edge order.
  const auto edges = collect_edges(mesh);
  std::map<std::array<int, 2>, int> midpoint_id;
  for (const auto& e : edges) {
    double mx = 0.5 * (mesh.vertices[e[0]][0] + mesh.vertices[e[1]][0]);
    double my = 0.5 * (mesh.vertices[e[0]][1] + mesh.vertices[e[1]][1]);
    if (mesh.domain_tag == Mesh::Domain::Disk && on_boundary.count(e)) {
      double r = std::hypot(mx, my);
      mx /= r;
      my /= r;
    }
    midpoint_id[e] = fine.vertex_count();
    map.vertex_origin.push_back({.coarse_vertex = -1, .edge_a = e[0], .edge_b = e[1]});
    fine.vertices.push_back({mx, my});
  }

  fine.triangles.reserve(4 * mesh.triangles.size());
  map.parent_of_triangle.reserve(4 * mesh.triangles.size());
  for (int t = 0; t < mesh.triangle_count(); ++t) {
    const auto& tri = mesh.triangles[t];
    int a = tri[0], b = tri[1], c = tri[2];
    int mab = midpoint_id[canon(a, b)];
    int mbc = midpoint_id[canon(b, c)];
    int mca = midpoint_id[canon(c, a)];
    const std::array<std::array<int, 3>, 4> children = {{
        {a, mab, mca}, {mab, b, mbc}, {mca, mbc, c}, {mab, mbc, mca}}};
    for (int s = 0; s < 4; ++s) {
      fine.triangles.push_back(children[s]);
      map.parent_of_triangle.push_back({t, s});
    }
  }
  fine.boundary_edges = find_boundary_edges(fine);
  return {std::move(fine), std::move(map)};
}

double triangle_area(const Mesh& mesh, int t) {
  const auto& tri = mesh.triangles[t];
  const auto& p0 = mesh.vertices[tri[0]];
  const auto& p1 = mesh.vertices[tri[1]];
  const auto& p2 = mesh.vertices[tri[2]];
  return 0.5 * ((p1[0] - p0[0]) * (p2[1] - p0[1]) - (p1[1] - p0[1]) * (p2[0] - p0[0]));
}

double total_area(const Mesh& mesh) {
  double s = 0.0;
  for (int t = 0; t < mesh.triangle_count(); ++t) s += triangle_area(mesh, t);
  return s;
}

double mesh_size(const Mesh& mesh) {
  double h = 0.0;
  for (const auto& t : mesh.triangles)
    for (int e = 0; e < 3; ++e) h = std::max(h, edge_len(mesh, t[e], t[(e + 1) % 3]));
  return h;
}

double min_edge_length(const Mesh& mesh) {
  double h = std::numeric_limits<double>::infinity();
  for (const auto& t : mesh.triangles)
    for (int e = 0; e < 3; ++e) h = std::min(h, edge_len(mesh, t[e], t[(e + 1) % 3]));
  return h;
}

double min_angle_deg(const Mesh& mesh) {
  double worst = 180.0;
  for (const auto& t : mesh.triangles) {
    for (int v = 0; v < 3; ++v) {
      const auto& p = mesh.vertices[t[v]];
      const auto& q = mesh.vertices[t[(v + 1) % 3]];
      const auto& r = mesh.vertices[t[(v + 2) % 3]];
      double ax = q[0] - p[0], ay = q[1] - p[1];
      double bx = r[0] - p[0], by = r[1] - p[1];
      double cosang = (ax * bx + ay * by) / (std::hypot(ax, ay) * std::hypot(bx, by));
      cosang = std::clamp(cosang, -1.0, 1.0);
      worst = std::min(worst, std::acos(cosang) * 180.0 / std::numbers::pi);
    }
  }
  return worst;
}

std::vector<std::array<int, 2>> collect_edges(const Mesh& mesh) {
  std::vector<std::array<int, 2>> edges;
  edges.reserve(mesh.triangles.size() * 3);
  for (const auto& t : mesh.triangles)
    for (int e = 0; e < 3; ++e) edges.push_back(canon(t[e], t[(e + 1) % 3]));
  std::sort(edges.begin(), edges.end());
  edges.erase(std::unique(edges.begin(), edges.end()), edges.end());
  return edges;
}

void validate(const Mesh& mesh) {
  for (int t = 0; t < mesh.triangle_count(); ++t) {
    for (int v : mesh.triangles[t])
      if (v < 0 || v >= mesh.vertex_count())
        throw std::runtime_error("mesh: triangle vertex index out of range");
    if (triangle_area(mesh, t) <= 0.0)
      throw std::runtime_error("mesh: non-positive triangle area at " + std::to_string(t));
  }
  std::map<std::array<int, 2>, int> count;
  for (const auto& t : mesh.triangles)
    for (int e = 0; e < 3; ++e) count[canon(t[e], t[(e + 1) % 3])]++;
  std::map<std::array<int, 2>, bool> listed;
  for (const auto& e : mesh.boundary_edges) listed[e] = true;
  for (const auto& [edge, c] : count) {
    if (c > 2) throw std::runtime_error("mesh: edge shared by more than two triangles");
    if (c == 1 && !listed.count(edge))
      throw std::runtime_error("mesh: boundary edge missing from boundary list");
    if (c == 2 && listed.count(edge))
      throw std::runtime_error("mesh: interior edge listed as boundary");
  }
  if (mesh.domain_tag == Mesh::Domain::Disk) {
    for (const auto& e : mesh.boundary_edges) {
      for (int v : {e[0], e[1]}) {
        double r2 = mesh.vertices[v][0] * mesh.vertices[v][0] +
                    mesh.vertices[v][1] * mesh.vertices[v][1];
        if (std::fabs(r2 - 1.0) > 1e-12)
          throw std::runtime_error("mesh: disk boundary vertex off the unit circle");
      }
    }
  }
}

}  // namespace sdllb
