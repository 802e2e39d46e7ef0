#pragma once

#include <memory>
#include <optional>
#include <utility>
#include <vector>

#include "sdllb/expr.hpp"
#include "sdllb/fem.hpp"
#include "sdllb/sparse.hpp"

namespace sdllb {

/// Physical coefficients of the coupled magnetisation / spin-accumulation
/// system. gamma_prime = gamma * delta couples the two fields; D0 is a
/// scalar diffusion field bounded above and below by positive constants;
/// j is the prescribed current density (planar, third component unused).
struct Coefficients {
  double gamma = 1.0;
  double alpha = 1.0;
  double gamma_prime = 1.0;
  double alpha_prime = 1.0;
  double kappa = 1.0;
  double mu = 1.0;  // may be negative below the Curie temperature
  double tau_sf = 1.0;
  double tau_j = 1.0;
  double beta = 0.1;  // in (0,1)
  double beta_prime = 1.0;
  ExprAst D0;
  VectorExpr j;

  /// Throws ConfigError when a positivity constraint is violated.
  void validate() const;
};

Coefficients unit_coefficients(double beta = 0.1);

/// One time step's pair of decoupled linear systems.
struct StepSystems {
  SparseMat A_m;
  std::vector<double> b_m;
  SparseMat A_s;
  std::vector<double> b_s;
};

enum class FormId { D1, C1, B1, L1, D2, C2, B2, L2 };

/// Assembles and caches the matrices tied to one space: the shared block
/// sparsity pattern plus the unweighted mass and stiffness blocks. The
/// per-step system matrices are rebuilt on every call (their coefficients
/// change each step); assembly is element-parallel with a serial scatter in
/// element order, so results do not depend on the thread count.
class Assembler {
 public:
  explicit Assembler(std::shared_ptr<const FeSpace> space);

  const std::shared_ptr<const FeSpace>& space() const { return space_; }
  const SparseMat& vector_mass() const { return mass_; }
  const SparseMat& vector_stiffness() const { return stiffness_; }

  SparseMat mass_matrix(const ExprAst* weight, double t = 0.0) const;
  SparseMat stiffness_matrix(const ExprAst* weight, double t = 0.0) const;

  /// A_m u = b_m for the new magnetisation, coefficients frozen at the
  /// previous step's fields.
  std::pair<SparseMat, std::vector<double>> m_system(const FieldVec& m_prev,
                                                     const FieldVec& s_prev,
                                                     const Coefficients& coeff,
                                                     double k) const;

  /// A_s u = b_s for the new spin accumulation; depends only on previous
  /// fields and j(t_n), never on the new magnetisation.
  std::pair<SparseMat, std::vector<double>> s_system(const FieldVec& m_prev,
                                                     const FieldVec& s_prev,
                                                     const Coefficients& coeff,
                                                     double t_n, double k) const;

  /// Load vector of the cubic effective-field term, entries
  /// (|m|^2 m, phi_i).
  std::vector<double> cubic_load(const FieldVec& m) const;

  /// min/max of D0 over all quadrature points of the mesh.
  std::pair<double, double> d0_bounds(const Coefficients& coeff) const;

 private:
  std::shared_ptr<const FeSpace> space_;
  SparseMat mass_, stiffness_;
  // scalar block pattern: value index base of (element, local i, local j)
  std::vector<int> scatter_;  // [e * nloc^2 + li*nloc + lj] -> scalar slot
  SparseMat skeleton_;        // vector pattern with zeroed values

  template <typename LocalFn>
  SparseMat assemble(const LocalFn& local_blocks) const;
};

// spec-facing free functions

SparseMat mass_matrix(std::shared_ptr<const FeSpace> space, const ExprAst* weight = nullptr);
SparseMat stiffness_matrix(std::shared_ptr<const FeSpace> space, const ExprAst* weight = nullptr);
SparseMat vector_mass_matrix(std::shared_ptr<const FeSpace> space);

StepSystems assemble_step_systems(const FieldVec& m_prev, const FieldVec& s_prev,
                                  const Coefficients& coeff, double t_n, double k);

/// Quadrature value of one of the named bilinear forms with frozen
/// coefficient fields phi (and psi for the B forms). Signs follow the
/// definitions used by the scheme; L2 contracts v otimes phi against the
/// first two columns of grad w.
double eval_form(FormId id, const FieldVec& phi, const FieldVec* psi,
                 const FieldVec& v, const FieldVec& w, const Coefficients& coeff);

/// Sup of |(j_1, j_2)| over the DOF sites (exact for constant j).
double j_max_magnitude(const FeSpace& space, const VectorExpr& j, double t);

}  // namespace sdllb
