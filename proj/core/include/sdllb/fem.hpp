#pragma once

#include <array>
#include <memory>
#include <vector>

#include "sdllb/expr.hpp"
#include "sdllb/mesh.hpp"

namespace sdllb {

/// Symmetric Gaussian rule on the reference triangle. Weights sum to 1 and
/// are scaled by the triangle area at use.
struct QuadRule {
  std::vector<std::array<double, 3>> points;  // barycentric
  std::vector<double> weights;
  int exactness = 0;
};

/// Rules exact for bivariate polynomials up to degree 2, 4 or 8.
QuadRule quadrature_for(int degree);

/// Vector-valued (R^3 per scalar node) Lagrange space of degree 1 or 2.
/// Scalar DOFs are vertices in mesh order, then (for degree 2) edge
/// midpoints in sorted (min,max) vertex-pair order. Vector DOFs interleave
/// node-major, component-minor: dof(i, c) = 3*i + c.
struct FeSpace {
  std::shared_ptr<const Mesh> mesh;
  int degree = 1;
  int scalar_dof_count = 0;
  int dofs_per_element = 3;  // 3 for P1, 6 for P2
  std::vector<std::array<double, 2>> dof_xy;
  std::vector<std::array<int, 6>> element_dofs;
  QuadRule quad;

  // per-element geometry
  std::vector<double> area;
  std::vector<std::array<std::array<double, 2>, 3>> grad_lambda;
  // reference basis tables at quadrature points: values and d/dlambda
  std::vector<std::array<double, 6>> basis_val;                    // [q][i]
  std::vector<std::array<std::array<double, 3>, 6>> basis_dlam;    // [q][i][l]

  int vector_dof_count() const { return 3 * scalar_dof_count; }
};

std::shared_ptr<const FeSpace> build_space(std::shared_ptr<const Mesh> mesh, int degree);

/// Coefficient vector of a discrete field, length 3 * scalar_dof_count.
struct FieldVec {
  std::vector<double> values;
  std::shared_ptr<const FeSpace> space;
};

FieldVec zero_field(std::shared_ptr<const FeSpace> space);

/// Nodal interpolant (exact for polynomials up to the space degree).
FieldVec nodal_interpolate(const VectorExpr& f, std::shared_ptr<const FeSpace> space,
                           double t = 0.0);

/// L2 projection: solves M u = (f, phi) with the vector mass matrix.
FieldVec l2_project(const VectorExpr& f, std::shared_ptr<const FeSpace> space,
                    double t = 0.0, double tol = 1e-12);

/// Transfers a coarse field onto the refined mesh by evaluating the coarse
/// piecewise polynomial at the fine nodal points. Exact embedding on nested
/// (square) refinements.
FieldVec prolong(const FieldVec& coarse, const RefinementMap& map,
                 std::shared_ptr<const FeSpace> fine_space);

/// Point evaluation; points outside the mesh within 1e-9 are clamped to the
/// nearest triangle, farther points throw.
std::array<double, 3> evaluate(const FieldVec& field, double x, double y);

/// Value and Jacobian (3 components x 2 derivatives) of a field inside a
/// given triangle at a given point; extrapolates if the point lies outside.
void evaluate_on_triangle(const FieldVec& field, int tri, double x, double y,
                          std::array<double, 3>& value,
                          std::array<std::array<double, 2>, 3>* jacobian);

enum class NormKind { L2, H1Semi, H1, L4, NodalMax };

double norm(const FieldVec& field, NormKind kind);

/// Basis evaluation helpers (reference element, barycentric input).
void basis_values(int degree, const std::array<double, 3>& lambda, std::array<double, 6>& out);
void basis_dlambda(int degree, const std::array<double, 3>& lambda,
                   std::array<std::array<double, 3>, 6>& out);

}  // namespace sdllb
