#include "sdllb/forms.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstring>
#include <limits>
#include <stdexcept>

#include "sdllb/errors.hpp"
#include "sdllb/threads.hpp"

namespace sdllb {

namespace {

bool is_constant_expr(const ExprAst& e) {
  if (!e) return true;
  switch (e->kind) {
    case ExprNode::Kind::Constant: return true;
    case ExprNode::Kind::Variable: return false;
    case ExprNode::Kind::Unary:
    case ExprNode::Kind::Call: return is_constant_expr(e->lhs);
    case ExprNode::Kind::Binary:
      return is_constant_expr(e->lhs) && is_constant_expr(e->rhs);
  }
  return false;
}

// skew(v) w = v x w
void skew(const std::array<double, 3>& v, double s[3][3]) {
  s[0][0] = 0;      s[0][1] = -v[2]; s[0][2] = v[1];
  s[1][0] = v[2];   s[1][1] = 0;     s[1][2] = -v[0];
  s[2][0] = -v[1];  s[2][1] = v[0];  s[2][2] = 0;
}

void physical_point(const FeSpace& sp, int e, int k, double& x, double& y) {
  const auto& tri = sp.mesh->triangles[e];
  const auto& l = sp.quad.points[k];
  const auto& p0 = sp.mesh->vertices[tri[0]];
  const auto& p1 = sp.mesh->vertices[tri[1]];
  const auto& p2 = sp.mesh->vertices[tri[2]];
  x = l[0] * p0[0] + l[1] * p1[0] + l[2] * p2[0];
  y = l[0] * p0[1] + l[1] * p1[1] + l[2] * p2[1];
}

void physical_gradients(const FeSpace& sp, int e, int k,
                        std::array<std::array<double, 2>, 6>& gN) {
  const int nloc = sp.dofs_per_element;
  for (int i = 0; i < nloc; ++i) {
    gN[i] = {0, 0};
    for (int a = 0; a < 3; ++a) {
      gN[i][0] += sp.basis_dlam[k][i][a] * sp.grad_lambda[e][a][0];
      gN[i][1] += sp.basis_dlam[k][i][a] * sp.grad_lambda[e][a][1];
    }
  }
}

void field_at(const FeSpace& sp, const std::vector<double>& vals, int e, int k,
              std::array<double, 3>& out) {
  out = {0, 0, 0};
  const auto& dofs = sp.element_dofs[e];
  for (int i = 0; i < sp.dofs_per_element; ++i) {
    double n = sp.basis_val[k][i];
    for (int c = 0; c < 3; ++c) out[c] += n * vals[3 * dofs[i] + c];
  }
}

}  // namespace

void Coefficients::validate() const {
  auto positive = [](double v, const char* name) {
    if (!(v > 0.0) || !std::isfinite(v))
      throw ConfigError(std::string("coefficients.") + name, "must be strictly positive");
  };
  positive(gamma, "gamma");
  positive(alpha, "alpha");
  positive(gamma_prime, "gamma_prime");
  positive(alpha_prime, "alpha_prime");
  positive(kappa, "kappa");
  positive(tau_sf, "tau_sf");
  positive(tau_j, "tau_j");
  positive(beta_prime, "beta_prime");
  if (!(beta > 0.0 && beta < 1.0))
    throw ConfigError("coefficients.beta", "must lie in (0,1)");
  if (!std::isfinite(mu)) throw ConfigError("coefficients.mu", "must be finite");
  if (!D0) throw ConfigError("coefficients.D0", "missing diffusion field");
}

Coefficients unit_coefficients(double beta) {
  Coefficients c;
  c.gamma = c.alpha = c.gamma_prime = c.alpha_prime = c.kappa = c.mu = 1.0;
  c.tau_sf = c.tau_j = c.beta_prime = 1.0;
  c.beta = beta;
  c.D0 = make_constant(1.0);
  c.j = zero_vector_expr();
  return c;
}

Assembler::Assembler(std::shared_ptr<const FeSpace> space) : space_(std::move(space)) {
  const auto& sp = *space_;
  const int ns = sp.scalar_dof_count;
  const int nloc = sp.dofs_per_element;
  const int ne = sp.mesh->triangle_count();

  // scalar adjacency, sorted per row
  std::vector<std::vector<int>> adj(ns);
  for (int e = 0; e < ne; ++e) {
    for (int li = 0; li < nloc; ++li)
      for (int lj = 0; lj < nloc; ++lj)
        adj[sp.element_dofs[e][li]].push_back(sp.element_dofs[e][lj]);
  }
  for (auto& row : adj) {
    std::sort(row.begin(), row.end());
    row.erase(std::unique(row.begin(), row.end()), row.end());
  }

  skeleton_.n = 3 * ns;
  skeleton_.row_offsets.assign(3 * ns + 1, 0);
  std::size_t nnz = 0;
  for (int i = 0; i < ns; ++i) nnz += adj[i].size();
  skeleton_.cols.reserve(nnz * 9);
  for (int i = 0; i < ns; ++i) {
    for (int a = 0; a < 3; ++a) {
      for (int j : adj[i])
        for (int c = 0; c < 3; ++c) skeleton_.cols.push_back(3 * j + c);
      skeleton_.row_offsets[3 * i + a + 1] = static_cast<int>(skeleton_.cols.size());
    }
  }
  skeleton_.vals.assign(skeleton_.cols.size(), 0.0);

  scatter_.resize(static_cast<std::size_t>(ne) * nloc * nloc);
  for (int e = 0; e < ne; ++e) {
    for (int li = 0; li < nloc; ++li) {
      const auto& row = adj[sp.element_dofs[e][li]];
      for (int lj = 0; lj < nloc; ++lj) {
        auto it = std::lower_bound(row.begin(), row.end(), sp.element_dofs[e][lj]);
        scatter_[static_cast<std::size_t>(e) * nloc * nloc + li * nloc + lj] =
            static_cast<int>(it - row.begin());
      }
    }
  }

  mass_ = mass_matrix(nullptr);
  stiffness_ = stiffness_matrix(nullptr);
}

template <typename LocalFn>
SparseMat Assembler::assemble(const LocalFn& local_blocks) const {
  const auto& sp = *space_;
  const int ne = sp.mesh->triangle_count();
  const int nloc = sp.dofs_per_element;
  const int bs = 3 * nloc;
  SparseMat A = skeleton_;
  std::vector<double> blocks(static_cast<std::size_t>(ne) * bs * bs);
  parallel_for(
      0, ne,
      [&](int lo, int hi) {
        for (int e = lo; e < hi; ++e)
          local_blocks(e, &blocks[static_cast<std::size_t>(e) * bs * bs]);
      },
      512);
  for (int e = 0; e < ne; ++e) {
    const double* B = &blocks[static_cast<std::size_t>(e) * bs * bs];
    const auto& dofs = sp.element_dofs[e];
    const int* sc = &scatter_[static_cast<std::size_t>(e) * nloc * nloc];
    for (int li = 0; li < nloc; ++li) {
      const int gi = dofs[li];
      for (int a = 0; a < 3; ++a) {
        const int row_off = A.row_offsets[3 * gi + a];
        const double* Brow = B + (3 * li + a) * bs;
        for (int lj = 0; lj < nloc; ++lj) {
          const int base = row_off + sc[li * nloc + lj] * 3;
          A.vals[base + 0] += Brow[3 * lj + 0];
          A.vals[base + 1] += Brow[3 * lj + 1];
          A.vals[base + 2] += Brow[3 * lj + 2];
        }
      }
    }
  }
  return A;
}

SparseMat Assembler::mass_matrix(const ExprAst* weight, double t) const {
  const auto& sp = *space_;
  const int nloc = sp.dofs_per_element;
  const int bs = 3 * nloc;
  const int nq = static_cast<int>(sp.quad.points.size());
  const bool constant_w = !weight || is_constant_expr(*weight);
  const double w_const = weight && constant_w ? eval(*weight, 0, 0, t) : 1.0;
  std::atomic<bool> bad{false};

  auto local = [&](int e, double* B) {
    std::memset(B, 0, sizeof(double) * bs * bs);
    for (int k = 0; k < nq; ++k) {
      double wq = sp.area[e] * sp.quad.weights[k];
      double wval = w_const;
      if (weight && !constant_w) {
        double x, y;
        physical_point(sp, e, k, x, y);
        wval = eval(*weight, x, y, t);
      }
      if (!std::isfinite(wval)) {
        bad.store(true, std::memory_order_relaxed);
        return;
      }
      for (int li = 0; li < nloc; ++li) {
        double wi = wq * wval * sp.basis_val[k][li];
        for (int lj = 0; lj < nloc; ++lj) {
          double m = wi * sp.basis_val[k][lj];
          for (int a = 0; a < 3; ++a) B[(3 * li + a) * bs + 3 * lj + a] += m;
        }
      }
    }
  };
  SparseMat A = assemble(local);
  if (bad.load()) throw std::runtime_error("mass_matrix: non-finite weight sample");
  return A;
}

SparseMat Assembler::stiffness_matrix(const ExprAst* weight, double t) const {
  const auto& sp = *space_;
  const int nloc = sp.dofs_per_element;
  const int bs = 3 * nloc;
  const int nq = static_cast<int>(sp.quad.points.size());
  const bool constant_w = !weight || is_constant_expr(*weight);
  const double w_const = weight && constant_w ? eval(*weight, 0, 0, t) : 1.0;
  std::atomic<bool> bad{false};

  auto local = [&](int e, double* B) {
    std::memset(B, 0, sizeof(double) * bs * bs);
    std::array<std::array<double, 2>, 6> gN;
    for (int k = 0; k < nq; ++k) {
      double wq = sp.area[e] * sp.quad.weights[k];
      double wval = w_const;
      if (weight && !constant_w) {
        double x, y;
        physical_point(sp, e, k, x, y);
        wval = eval(*weight, x, y, t);
      }
      if (!std::isfinite(wval)) {
        bad.store(true, std::memory_order_relaxed);
        return;
      }
      physical_gradients(sp, e, k, gN);
      for (int li = 0; li < nloc; ++li) {
        for (int lj = 0; lj < nloc; ++lj) {
          double g = wq * wval * (gN[li][0] * gN[lj][0] + gN[li][1] * gN[lj][1]);
          for (int a = 0; a < 3; ++a) B[(3 * li + a) * bs + 3 * lj + a] += g;
        }
      }
    }
  };
  SparseMat A = assemble(local);
  if (bad.load()) throw std::runtime_error("stiffness_matrix: non-finite weight sample");
  return A;
}

std::pair<SparseMat, std::vector<double>> Assembler::m_system(const FieldVec& m_prev,
                                                              const FieldVec& s_prev,
                                                              const Coefficients& coeff,
                                                              double k_step) const {
  const auto& sp = *space_;
  if (m_prev.space.get() != &sp || s_prev.space.get() != &sp)
    throw std::invalid_argument("m_system: fields not on the assembler space");
  if (!(k_step > 0)) throw std::invalid_argument("m_system: time step must be positive");
  const int nloc = sp.dofs_per_element;
  const int bs = 3 * nloc;
  const int nq = static_cast<int>(sp.quad.points.size());
  const double c_grad = k_step * coeff.alpha * coeff.alpha_prime;
  const double c_curl = -k_step * coeff.gamma * coeff.alpha_prime;
  const double c_cross = -k_step * coeff.gamma_prime;
  const double c_mass_mu = k_step * coeff.alpha * coeff.kappa;

  auto local = [&](int e, double* B) {
    std::memset(B, 0, sizeof(double) * bs * bs);
    std::array<std::array<double, 2>, 6> gN;
    std::array<double, 3> mq, sq;
    double S_m[3][3], S_s[3][3];
    for (int k = 0; k < nq; ++k) {
      double wq = sp.area[e] * sp.quad.weights[k];
      physical_gradients(sp, e, k, gN);
      field_at(sp, m_prev.values, e, k, mq);
      field_at(sp, s_prev.values, e, k, sq);
      double m2 = mq[0] * mq[0] + mq[1] * mq[1] + mq[2] * mq[2];
      double diag_mass = 1.0 + c_mass_mu * (coeff.mu + m2);
      skew(mq, S_m);
      skew(sq, S_s);
      for (int li = 0; li < nloc; ++li) {
        for (int lj = 0; lj < nloc; ++lj) {
          double nn = wq * sp.basis_val[k][li] * sp.basis_val[k][lj];
          double gg = wq * (gN[li][0] * gN[lj][0] + gN[li][1] * gN[lj][1]);
          double d = diag_mass * nn + c_grad * gg;
          double* Bij = B + (3 * li) * bs + 3 * lj;
          for (int a = 0; a < 3; ++a) {
            for (int c = 0; c < 3; ++c) {
              double v = c_curl * gg * S_m[a][c] + c_cross * nn * S_s[a][c];
              if (a == c) v += d;
              Bij[a * bs + c] += v;
            }
          }
        }
      }
    }
  };
  SparseMat A = assemble(local);
  std::vector<double> b = spmv(mass_, m_prev.values);
  return {std::move(A), std::move(b)};
}

std::pair<SparseMat, std::vector<double>> Assembler::s_system(const FieldVec& m_prev,
                                                              const FieldVec& s_prev,
                                                              const Coefficients& coeff,
                                                              double t_n, double k_step) const {
  const auto& sp = *space_;
  if (m_prev.space.get() != &sp || s_prev.space.get() != &sp)
    throw std::invalid_argument("s_system: fields not on the assembler space");
  if (!(k_step > 0)) throw std::invalid_argument("s_system: time step must be positive");
  const int nloc = sp.dofs_per_element;
  const int bs = 3 * nloc;
  const int nq = static_cast<int>(sp.quad.points.size());
  const bool d0_const = is_constant_expr(coeff.D0);
  const double d0_const_val = d0_const ? eval(coeff.D0, 0, 0, t_n) : 0.0;
  if (d0_const && !(d0_const_val > 0.0 && std::isfinite(d0_const_val)))
    throw std::runtime_error("s_system: D0 bound violation");
  std::atomic<bool> bad{false};

  auto local = [&](int e, double* B) {
    std::memset(B, 0, sizeof(double) * bs * bs);
    std::array<std::array<double, 2>, 6> gN;
    std::array<double, 3> mq;
    double S_m[3][3];
    for (int k = 0; k < nq; ++k) {
      double wq = sp.area[e] * sp.quad.weights[k];
      double d0 = d0_const_val;
      if (!d0_const) {
        double x, y;
        physical_point(sp, e, k, x, y);
        d0 = eval(coeff.D0, x, y, t_n);
        if (!(d0 > 0.0) || !std::isfinite(d0)) {
          bad.store(true, std::memory_order_relaxed);
          return;
        }
      }
      physical_gradients(sp, e, k, gN);
      field_at(sp, m_prev.values, e, k, mq);
      skew(mq, S_m);
      double diag_mass = 1.0 + k_step * d0 / coeff.tau_sf;
      double c_grad = k_step * d0;
      double c_outer = -k_step * coeff.beta * d0;
      double c_skew = -(k_step / coeff.tau_j) * d0;
      for (int li = 0; li < nloc; ++li) {
        for (int lj = 0; lj < nloc; ++lj) {
          double nn = wq * sp.basis_val[k][li] * sp.basis_val[k][lj];
          double gg = wq * (gN[li][0] * gN[lj][0] + gN[li][1] * gN[lj][1]);
          double d = diag_mass * nn + c_grad * gg;
          double* Bij = B + (3 * li) * bs + 3 * lj;
          for (int a = 0; a < 3; ++a) {
            for (int c = 0; c < 3; ++c) {
              double v = c_outer * gg * mq[a] * mq[c] + c_skew * nn * S_m[a][c];
              if (a == c) v += d;
              Bij[a * bs + c] += v;
            }
          }
        }
      }
    }
  };
  SparseMat A = assemble(local);
  if (bad.load()) throw std::runtime_error("s_system: D0 bound violation at a quadrature point");

  // b_s = M s_prev + k beta' (m_prev (x) j(t_n), grad psi)
  std::vector<double> b = spmv(mass_, s_prev.values);
  std::array<std::array<double, 2>, 6> gN;
  std::array<double, 3> mq;
  for (int e = 0; e < sp.mesh->triangle_count(); ++e) {
    const auto& dofs = sp.element_dofs[e];
    for (int k = 0; k < nq; ++k) {
      double wq = sp.area[e] * sp.quad.weights[k];
      double x, y;
      physical_point(sp, e, k, x, y);
      double j0 = eval(coeff.j.components[0], x, y, t_n);
      double j1 = eval(coeff.j.components[1], x, y, t_n);
      physical_gradients(sp, e, k, gN);
      field_at(sp, m_prev.values, e, k, mq);
      double f = wq * k_step * coeff.beta_prime;
      for (int i = 0; i < nloc; ++i) {
        double jg = j0 * gN[i][0] + j1 * gN[i][1];
        for (int a = 0; a < 3; ++a) b[3 * dofs[i] + a] += f * mq[a] * jg;
      }
    }
  }
  return {std::move(A), std::move(b)};
}

std::vector<double> Assembler::cubic_load(const FieldVec& m) const {
  const auto& sp = *space_;
  const int nloc = sp.dofs_per_element;
  const int nq = static_cast<int>(sp.quad.points.size());
  std::vector<double> b(sp.vector_dof_count(), 0.0);
  std::array<double, 3> mq;
  for (int e = 0; e < sp.mesh->triangle_count(); ++e) {
    const auto& dofs = sp.element_dofs[e];
    for (int k = 0; k < nq; ++k) {
      double wq = sp.area[e] * sp.quad.weights[k];
      field_at(sp, m.values, e, k, mq);
      double m2 = mq[0] * mq[0] + mq[1] * mq[1] + mq[2] * mq[2];
      for (int i = 0; i < nloc; ++i) {
        double wi = wq * sp.basis_val[k][i] * m2;
        for (int c = 0; c < 3; ++c) b[3 * dofs[i] + c] += wi * mq[c];
      }
    }
  }
  return b;
}

std::pair<double, double> Assembler::d0_bounds(const Coefficients& coeff) const {
  if (is_constant_expr(coeff.D0)) {
    double v = eval(coeff.D0, 0, 0, 0);
    return {v, v};
  }
  const auto& sp = *space_;
  double lo = std::numeric_limits<double>::infinity(), hi = -lo;
  const int nq = static_cast<int>(sp.quad.points.size());
  for (int e = 0; e < sp.mesh->triangle_count(); ++e) {
    for (int k = 0; k < nq; ++k) {
      double x, y;
      physical_point(sp, e, k, x, y);
      double v = eval(coeff.D0, x, y, 0.0);
      lo = std::min(lo, v);
      hi = std::max(hi, v);
    }
  }
  return {lo, hi};
}

SparseMat mass_matrix(std::shared_ptr<const FeSpace> space, const ExprAst* weight) {
  return Assembler(std::move(space)).mass_matrix(weight);
}

SparseMat stiffness_matrix(std::shared_ptr<const FeSpace> space, const ExprAst* weight) {
  return Assembler(std::move(space)).stiffness_matrix(weight);
}

SparseMat vector_mass_matrix(std::shared_ptr<const FeSpace> space) {
  return mass_matrix(std::move(space), nullptr);
}

StepSystems assemble_step_systems(const FieldVec& m_prev, const FieldVec& s_prev,
                                  const Coefficients& coeff, double t_n, double k) {
  Assembler assembler(m_prev.space);
  StepSystems out;
  auto [am, bm] = assembler.m_system(m_prev, s_prev, coeff, k);
  auto [as, bs] = assembler.s_system(m_prev, s_prev, coeff, t_n, k);
  out.A_m = std::move(am);
  out.b_m = std::move(bm);
  out.A_s = std::move(as);
  out.b_s = std::move(bs);
  return out;
}

double j_max_magnitude(const FeSpace& space, const VectorExpr& j, double t) {
  bool constant = true;
  for (int c = 0; c < 2; ++c)
    if (j.components[c] && !is_constant_expr(j.components[c])) constant = false;
  if (constant) {
    double j0 = eval(j.components[0], 0, 0, t);
    double j1 = eval(j.components[1], 0, 0, t);
    return std::hypot(j0, j1);
  }
  double best = 0.0;
  for (int i = 0; i < space.scalar_dof_count; ++i) {
    double j0 = eval(j.components[0], space.dof_xy[i][0], space.dof_xy[i][1], t);
    double j1 = eval(j.components[1], space.dof_xy[i][0], space.dof_xy[i][1], t);
    best = std::max(best, std::hypot(j0, j1));
  }
  return best;
}

double eval_form(FormId id, const FieldVec& phi, const FieldVec* psi,
                 const FieldVec& v, const FieldVec& w, const Coefficients& coeff) {
  const auto& sp = *v.space;
  if (phi.space.get() != &sp || w.space.get() != &sp || (psi && psi->space.get() != &sp))
    throw std::invalid_argument("eval_form: fields on different spaces");
  if ((id == FormId::B1 || id == FormId::B2) && !psi)
    throw std::invalid_argument("eval_form: B forms need psi");

  const int nloc = sp.dofs_per_element;
  const int nq = static_cast<int>(sp.quad.points.size());
  const bool needs_d0 = id == FormId::D2 || id == FormId::C2 || id == FormId::B2;
  double acc = 0.0;
  std::array<double, 3> pq{}, sq{}, vq{}, wq3{};
  std::array<std::array<double, 2>, 6> gN;

  for (int e = 0; e < sp.mesh->triangle_count(); ++e) {
    const auto& dofs = sp.element_dofs[e];
    for (int k = 0; k < nq; ++k) {
      double weight = sp.area[e] * sp.quad.weights[k];
      field_at(sp, phi.values, e, k, pq);
      field_at(sp, v.values, e, k, vq);
      field_at(sp, w.values, e, k, wq3);
      if (psi) field_at(sp, psi->values, e, k, sq);
      double d0 = 1.0;
      if (needs_d0) {
        double x, y;
        physical_point(sp, e, k, x, y);
        d0 = eval(coeff.D0, x, y, 0.0);
      }

      // gradients of v and w where needed
      std::array<std::array<double, 2>, 3> gv{}, gw{};
      const bool need_gv = id == FormId::D1 || id == FormId::C1 || id == FormId::D2 || id == FormId::B2;
      const bool need_gw = need_gv || id == FormId::L2;
      if (need_gv || need_gw) {
        physical_gradients(sp, e, k, gN);
        for (auto& r : gv) r = {0, 0};
        for (auto& r : gw) r = {0, 0};
        for (int i = 0; i < nloc; ++i) {
          for (int c = 0; c < 3; ++c) {
            if (need_gv) {
              gv[c][0] += gN[i][0] * v.values[3 * dofs[i] + c];
              gv[c][1] += gN[i][1] * v.values[3 * dofs[i] + c];
            }
            gw[c][0] += gN[i][0] * w.values[3 * dofs[i] + c];
            gw[c][1] += gN[i][1] * w.values[3 * dofs[i] + c];
          }
        }
      }

      double val = 0.0;
      switch (id) {
        case FormId::D1:
        case FormId::D2: {
          double g = 0, m = 0;
          for (int c = 0; c < 3; ++c) {
            g += gv[c][0] * gw[c][0] + gv[c][1] * gw[c][1];
            m += vq[c] * wq3[c];
          }
          val = (id == FormId::D1 ? 1.0 : d0) * (g + m);
          break;
        }
        case FormId::C1: {
          // -(phi x d_b v) . d_b w summed over spatial directions
          for (int b = 0; b < 2; ++b) {
            std::array<double, 3> dv = {gv[0][b], gv[1][b], gv[2][b]};
            std::array<double, 3> dw = {gw[0][b], gw[1][b], gw[2][b]};
            val -= (pq[1] * dv[2] - pq[2] * dv[1]) * dw[0] +
                   (pq[2] * dv[0] - pq[0] * dv[2]) * dw[1] +
                   (pq[0] * dv[1] - pq[1] * dv[0]) * dw[2];
          }
          break;
        }
        case FormId::B1: {
          double ps = pq[0] * sq[0] + pq[1] * sq[1] + pq[2] * sq[2];
          double vw = vq[0] * wq3[0] + vq[1] * wq3[1] + vq[2] * wq3[2];
          val = ps * vw;
          break;
        }
        case FormId::L1: {
          // -(v x phi) . w
          val = -((vq[1] * pq[2] - vq[2] * pq[1]) * wq3[0] +
                  (vq[2] * pq[0] - vq[0] * pq[2]) * wq3[1] +
                  (vq[0] * pq[1] - vq[1] * pq[0]) * wq3[2]);
          break;
        }
        case FormId::C2: {
          // D0 (v x phi) . w
          val = d0 * ((vq[1] * pq[2] - vq[2] * pq[1]) * wq3[0] +
                      (vq[2] * pq[0] - vq[0] * pq[2]) * wq3[1] +
                      (vq[0] * pq[1] - vq[1] * pq[0]) * wq3[2]);
          break;
        }
        case FormId::B2: {
          // -beta D0 sum_b (psi . d_b v)(phi . d_b w)
          for (int b = 0; b < 2; ++b) {
            double sv = sq[0] * gv[0][b] + sq[1] * gv[1][b] + sq[2] * gv[2][b];
            double pw = pq[0] * gw[0][b] + pq[1] * gw[1][b] + pq[2] * gw[2][b];
            val -= coeff.beta * d0 * sv * pw;
          }
          break;
        }
        case FormId::L2: {
          // -(v (x) phi) : grad w, phi planar
          for (int b = 0; b < 2; ++b)
            for (int a = 0; a < 3; ++a) val -= vq[a] * pq[b] * gw[a][b];
          break;
        }
      }
      acc += weight * val;
    }
  }
  return acc;
}

}  // namespace sdllb
