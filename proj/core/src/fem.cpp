#include "sdllb/fem.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <stdexcept>

#include "sdllb/errors.hpp"
#include "sdllb/forms.hpp"
#include "sdllb/sparse.hpp"

namespace sdllb {

QuadRule quadrature_for(int degree) {
  QuadRule q;
  q.exactness = degree;
  auto orbit3 = [&q](double a, double w) {
    double b = 1.0 - 2.0 * a;
    q.points.push_back({a, a, b});
    q.points.push_back({a, b, a});
    q.points.push_back({b, a, a});
    q.weights.insert(q.weights.end(), 3, w);
  };
  auto orbit6 = [&q](double a, double b, double w) {
    double c = 1.0 - a - b;
    q.points.push_back({a, b, c});
    q.points.push_back({a, c, b});
    q.points.push_back({b, a, c});
    q.points.push_back({b, c, a});
    q.points.push_back({c, a, b});
    q.points.push_back({c, b, a});
    q.weights.insert(q.weights.end(), 6, w);
  };
  switch (degree) {
    case 2:
      // edge midpoints
      orbit3(0.5, 1.0 / 3.0);
      break;
    case 4:
      orbit3(0.4459484909159648863463670079894393, 0.2233815896780114656950070084331418);
      orbit3(0.0915762135097707434595714634022015, 0.1099517436553218676402598834264012);
      break;
    case 8:
      q.points.push_back({1.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0});
      q.weights.push_back(0.1443156076777871682510911104890646);
      orbit3(0.4592925882927231560288155144941693, 0.0950916342672846247938961043885843);
      orbit3(0.1705693077517602066222935014914645, 0.1032173705347182502817915502921290);
      orbit3(0.0505472283170309754584235505965989, 0.0324584976231980803109259283417806);
      orbit6(0.2631128296346381134217857862846436, 0.0083947774099576053372138345392944,
             0.0272303141744349942648446900739089);
      break;
    default:
      throw std::invalid_argument("quadrature_for: unsupported degree " + std::to_string(degree));
  }
  return q;
}

void basis_values(int degree, const std::array<double, 3>& l, std::array<double, 6>& out) {
  if (degree == 1) {
    out = {l[0], l[1], l[2], 0, 0, 0};
    return;
  }
  out = {l[0] * (2 * l[0] - 1), l[1] * (2 * l[1] - 1), l[2] * (2 * l[2] - 1),
         4 * l[0] * l[1], 4 * l[1] * l[2], 4 * l[2] * l[0]};
}

void basis_dlambda(int degree, const std::array<double, 3>& l,
                   std::array<std::array<double, 3>, 6>& out) {
  for (auto& row : out) row = {0, 0, 0};
  if (degree == 1) {
    out[0][0] = out[1][1] = out[2][2] = 1.0;
    return;
  }
  for (int i = 0; i < 3; ++i) out[i][i] = 4 * l[i] - 1;
  out[3][0] = 4 * l[1]; out[3][1] = 4 * l[0];
  out[4][1] = 4 * l[2]; out[4][2] = 4 * l[1];
  out[5][2] = 4 * l[0]; out[5][0] = 4 * l[2];
}

std::shared_ptr<const FeSpace> build_space(std::shared_ptr<const Mesh> mesh, int degree) {
  if (degree != 1 && degree != 2)
    throw std::invalid_argument("build_space: degree must be 1 or 2");
  auto sp = std::make_shared<FeSpace>();
  sp->mesh = mesh;
  sp->degree = degree;
  sp->dofs_per_element = degree == 1 ? 3 : 6;
  sp->quad = quadrature_for(degree == 1 ? 4 : 8);  // exact for the cubic-term products

  const int nv = mesh->vertex_count();
  sp->dof_xy = mesh->vertices;
  sp->element_dofs.resize(mesh->triangle_count());
  for (int t = 0; t < mesh->triangle_count(); ++t) {
    const auto& tri = mesh->triangles[t];
    sp->element_dofs[t] = {tri[0], tri[1], tri[2], -1, -1, -1};
  }
  if (degree == 2) {
    const auto edges = collect_edges(*mesh);
    std::map<std::array<int, 2>, int> edge_dof;
    for (const auto& e : edges) {
      edge_dof[e] = nv + static_cast<int>(edge_dof.size());
      sp->dof_xy.push_back({0.5 * (mesh->vertices[e[0]][0] + mesh->vertices[e[1]][0]),
                            0.5 * (mesh->vertices[e[0]][1] + mesh->vertices[e[1]][1])});
    }
    auto canon = [](int a, int b) { return std::array<int, 2>{std::min(a, b), std::max(a, b)}; };
    for (int t = 0; t < mesh->triangle_count(); ++t) {
      const auto& tri = mesh->triangles[t];
      sp->element_dofs[t][3] = edge_dof[canon(tri[0], tri[1])];
      sp->element_dofs[t][4] = edge_dof[canon(tri[1], tri[2])];
      sp->element_dofs[t][5] = edge_dof[canon(tri[2], tri[0])];
    }
  }
  sp->scalar_dof_count = static_cast<int>(sp->dof_xy.size());

  sp->area.resize(mesh->triangle_count());
  sp->grad_lambda.resize(mesh->triangle_count());
  for (int t = 0; t < mesh->triangle_count(); ++t) {
    const auto& tri = mesh->triangles[t];
    const auto& p0 = mesh->vertices[tri[0]];
    const auto& p1 = mesh->vertices[tri[1]];
    const auto& p2 = mesh->vertices[tri[2]];
    double d1x = p1[0] - p0[0], d1y = p1[1] - p0[1];
    double d2x = p2[0] - p0[0], d2y = p2[1] - p0[1];
    double det = d1x * d2y - d1y * d2x;  // 2 * area, positive for CCW
    sp->area[t] = 0.5 * det;
    sp->grad_lambda[t][1] = {d2y / det, -d2x / det};
    sp->grad_lambda[t][2] = {-d1y / det, d1x / det};
    sp->grad_lambda[t][0] = {-sp->grad_lambda[t][1][0] - sp->grad_lambda[t][2][0],
                             -sp->grad_lambda[t][1][1] - sp->grad_lambda[t][2][1]};
  }

  const auto& q = sp->quad;
  sp->basis_val.resize(q.points.size());
  sp->basis_dlam.resize(q.points.size());
  for (std::size_t k = 0; k < q.points.size(); ++k) {
    basis_values(degree, q.points[k], sp->basis_val[k]);
    basis_dlambda(degree, q.points[k], sp->basis_dlam[k]);
  }
  return sp;
}

FieldVec zero_field(std::shared_ptr<const FeSpace> space) {
  FieldVec f;
  f.space = space;
  f.values.assign(space->vector_dof_count(), 0.0);
  return f;
}

FieldVec nodal_interpolate(const VectorExpr& f, std::shared_ptr<const FeSpace> space, double t) {
  FieldVec out = zero_field(space);
  for (int i = 0; i < space->scalar_dof_count; ++i) {
    auto v = f.eval_at(space->dof_xy[i][0], space->dof_xy[i][1], t);
    for (int c = 0; c < 3; ++c) out.values[3 * i + c] = v[c];
  }
  return out;
}

FieldVec l2_project(const VectorExpr& f, std::shared_ptr<const FeSpace> space,
                    double t, double tol) {
  const SparseMat M = vector_mass_matrix(space);
  std::vector<double> rhs(space->vector_dof_count(), 0.0);
  const auto& q = space->quad;
  const int nloc = space->dofs_per_element;
  for (int e = 0; e < space->mesh->triangle_count(); ++e) {
    const auto& dofs = space->element_dofs[e];
    const auto& tri = space->mesh->triangles[e];
    const auto& p0 = space->mesh->vertices[tri[0]];
    const auto& p1 = space->mesh->vertices[tri[1]];
    const auto& p2 = space->mesh->vertices[tri[2]];
    for (std::size_t k = 0; k < q.points.size(); ++k) {
      const auto& l = q.points[k];
      double x = l[0] * p0[0] + l[1] * p1[0] + l[2] * p2[0];
      double y = l[0] * p0[1] + l[1] * p1[1] + l[2] * p2[1];
      auto v = f.eval_at(x, y, t);
      for (int c = 0; c < 3; ++c)
        if (!std::isfinite(v[c]))
          throw std::runtime_error("l2_project: non-finite field sample");
      double w = space->area[e] * q.weights[k];
      for (int i = 0; i < nloc; ++i) {
        double wi = w * space->basis_val[k][i];
        for (int c = 0; c < 3; ++c) rhs[3 * dofs[i] + c] += wi * v[c];
      }
    }
  }
  auto sol = solve_bicgstab(M, rhs, tol);
  FieldVec out;
  out.space = space;
  out.values = std::move(sol.x);
  return out;
}

namespace {

std::array<double, 3> barycentric(const Mesh& mesh, int tri, double x, double y) {
  const auto& t = mesh.triangles[tri];
  const auto& p0 = mesh.vertices[t[0]];
  const auto& p1 = mesh.vertices[t[1]];
  const auto& p2 = mesh.vertices[t[2]];
  double det = (p1[0] - p0[0]) * (p2[1] - p0[1]) - (p1[1] - p0[1]) * (p2[0] - p0[0]);
  double l1 = ((x - p0[0]) * (p2[1] - p0[1]) - (y - p0[1]) * (p2[0] - p0[0])) / det;
  double l2 = ((p1[0] - p0[0]) * (y - p0[1]) - (p1[1] - p0[1]) * (x - p0[0])) / det;
  return {1.0 - l1 - l2, l1, l2};
}

}  // namespace

FieldVec prolong(const FieldVec& coarse, const RefinementMap& map,
                 std::shared_ptr<const FeSpace> fine_space) {
  const auto& cs = *coarse.space;
  if (cs.degree != fine_space->degree)
    throw std::invalid_argument("prolong: degree mismatch");
  if (cs.mesh->triangle_count() != map.coarse_triangle_count ||
      cs.mesh->vertex_count() != map.coarse_vertex_count ||
      fine_space->mesh->triangle_count() != 4 * map.coarse_triangle_count)
    throw std::invalid_argument("prolong: mesh lineage mismatch");

  FieldVec out = zero_field(fine_space);
  std::vector<char> done(fine_space->scalar_dof_count, 0);
  const int nloc = fine_space->dofs_per_element;
  std::array<double, 6> bv;
  for (int e = 0; e < fine_space->mesh->triangle_count(); ++e) {
    const int parent = map.parent_of_triangle[e][0];
    for (int i = 0; i < nloc; ++i) {
      int dof = fine_space->element_dofs[e][i];
      if (done[dof]) continue;
      done[dof] = 1;
      auto l = barycentric(*cs.mesh, parent, fine_space->dof_xy[dof][0],
                           fine_space->dof_xy[dof][1]);
      basis_values(cs.degree, l, bv);
      const auto& cdofs = cs.element_dofs[parent];
      for (int c = 0; c < 3; ++c) {
        double acc = 0.0;
        for (int j = 0; j < cs.dofs_per_element; ++j)
          acc += bv[j] * coarse.values[3 * cdofs[j] + c];
        out.values[3 * dof + c] = acc;
      }
    }
  }
  return out;
}

void evaluate_on_triangle(const FieldVec& field, int tri, double x, double y,
                          std::array<double, 3>& value,
                          std::array<std::array<double, 2>, 3>* jacobian) {
  const auto& sp = *field.space;
  auto l = barycentric(*sp.mesh, tri, x, y);
  std::array<double, 6> bv;
  basis_values(sp.degree, l, bv);
  const auto& dofs = sp.element_dofs[tri];
  value = {0, 0, 0};
  for (int i = 0; i < sp.dofs_per_element; ++i)
    for (int c = 0; c < 3; ++c) value[c] += bv[i] * field.values[3 * dofs[i] + c];
  if (jacobian) {
    std::array<std::array<double, 3>, 6> dl;
    basis_dlambda(sp.degree, l, dl);
    for (auto& row : *jacobian) row = {0, 0};
    for (int i = 0; i < sp.dofs_per_element; ++i) {
      double gx = 0, gy = 0;
      for (int a = 0; a < 3; ++a) {
        gx += dl[i][a] * sp.grad_lambda[tri][a][0];
        gy += dl[i][a] * sp.grad_lambda[tri][a][1];
      }
      for (int c = 0; c < 3; ++c) {
        (*jacobian)[c][0] += gx * field.values[3 * dofs[i] + c];
        (*jacobian)[c][1] += gy * field.values[3 * dofs[i] + c];
      }
    }
  }
}

std::array<double, 3> evaluate(const FieldVec& field, double x, double y) {
  const auto& sp = *field.space;
  int best_tri = -1;
  double best_min_l = -std::numeric_limits<double>::infinity();
  for (int t = 0; t < sp.mesh->triangle_count(); ++t) {
    auto l = barycentric(*sp.mesh, t, x, y);
    double min_l = std::min({l[0], l[1], l[2]});
    if (min_l > best_min_l) {
      best_min_l = min_l;
      best_tri = t;
      if (min_l >= -1e-12) break;
    }
  }
  if (best_min_l < -1e-9)
    throw std::out_of_range("evaluate: point outside the mesh");
  std::array<double, 3> v;
  evaluate_on_triangle(field, best_tri, x, y, v, nullptr);
  return v;
}

double norm(const FieldVec& field, NormKind kind) {
  const auto& sp = *field.space;
  if (kind == NormKind::NodalMax) {
    double best = 0.0;
    for (int i = 0; i < sp.scalar_dof_count; ++i) {
      double m2 = 0.0;
      for (int c = 0; c < 3; ++c) {
        double v = field.values[3 * i + c];
        m2 += v * v;
      }
      best = std::max(best, m2);
    }
    return std::sqrt(best);
  }

  const auto& q = sp.quad;
  const int nloc = sp.dofs_per_element;
  double acc = 0.0;
  for (int e = 0; e < sp.mesh->triangle_count(); ++e) {
    const auto& dofs = sp.element_dofs[e];
    for (std::size_t k = 0; k < q.points.size(); ++k) {
      double w = sp.area[e] * q.weights[k];
      if (kind == NormKind::L2 || kind == NormKind::L4 || kind == NormKind::H1) {
        double v2 = 0.0;
        for (int c = 0; c < 3; ++c) {
          double v = 0.0;
          for (int i = 0; i < nloc; ++i)
            v += sp.basis_val[k][i] * field.values[3 * dofs[i] + c];
          v2 += v * v;
        }
        acc += w * (kind == NormKind::L4 ? v2 * v2 : v2);
      }
      if (kind == NormKind::H1Semi || kind == NormKind::H1) {
        std::array<std::array<double, 2>, 6> gN;
        for (int i = 0; i < nloc; ++i) {
          gN[i] = {0, 0};
          for (int a = 0; a < 3; ++a) {
            gN[i][0] += sp.basis_dlam[k][i][a] * sp.grad_lambda[e][a][0];
            gN[i][1] += sp.basis_dlam[k][i][a] * sp.grad_lambda[e][a][1];
          }
        }
        double g2 = 0.0;
        for (int c = 0; c < 3; ++c) {
          double gx = 0, gy = 0;
          for (int i = 0; i < nloc; ++i) {
            gx += gN[i][0] * field.values[3 * dofs[i] + c];
            gy += gN[i][1] * field.values[3 * dofs[i] + c];
          }
          g2 += gx * gx + gy * gy;
        }
        acc += w * g2;
      }
    }
  }
  if (kind == NormKind::L4) return std::pow(acc, 0.25);
  return std::sqrt(acc);
}

}  // namespace sdllb
