#include "sdllb/sparse.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <string>

#include "sdllb/errors.hpp"

namespace sdllb {

SparseMat csr_from_triplets(const Triplets& t) {
  const int n = t.n;
  for (std::size_t i = 0; i < t.size(); ++i) {
    if (t.rows[i] < 0 || t.rows[i] >= n || t.cols[i] < 0 || t.cols[i] >= n)
      throw std::out_of_range("csr_from_triplets: index out of range");
  }

  // counting sort by row, then per-row sort by column
  std::vector<int> counts(n + 1, 0);
  for (int r : t.rows) counts[r + 1]++;
  std::partial_sum(counts.begin(), counts.end(), counts.begin());

  std::vector<int> order(t.size());
  {
    std::vector<int> next(counts.begin(), counts.end() - 1);
    for (std::size_t i = 0; i < t.size(); ++i) order[next[t.rows[i]]++] = static_cast<int>(i);
  }

  SparseMat A;
  A.n = n;
  A.row_offsets.assign(n + 1, 0);
  A.cols.reserve(t.size());
  A.vals.reserve(t.size());
  std::vector<std::pair<int, double>> row;
  for (int r = 0; r < n; ++r) {
    row.clear();
    for (int k = counts[r]; k < counts[r + 1]; ++k) {
      int i = order[k];
      row.emplace_back(t.cols[i], t.vals[i]);
    }
    std::stable_sort(row.begin(), row.end(),
                     [](const auto& a, const auto& b) { return a.first < b.first; });
    for (std::size_t i = 0; i < row.size(); ++i) {
      if (!A.cols.empty() && A.row_offsets[r] != static_cast<int>(A.cols.size()) &&
          A.cols.back() == row[i].first) {
        A.vals.back() += row[i].second;
      } else {
        A.cols.push_back(row[i].first);
        A.vals.push_back(row[i].second);
      }
    }
    A.row_offsets[r + 1] = static_cast<int>(A.cols.size());
  }
  return A;
}

void spmv(const SparseMat& A, std::span<const double> x, std::span<double> y) {
  if (static_cast<int>(x.size()) != A.n || static_cast<int>(y.size()) != A.n)
    throw std::invalid_argument("spmv: dimension mismatch");
  for (int r = 0; r < A.n; ++r) {
    double acc = 0.0;
    for (int k = A.row_offsets[r]; k < A.row_offsets[r + 1]; ++k)
      acc += A.vals[k] * x[A.cols[k]];
    y[r] = acc;
  }
}

std::vector<double> spmv(const SparseMat& A, std::span<const double> x) {
  std::vector<double> y(A.n);
  spmv(A, x, y);
  return y;
}

namespace {

double dot(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

double norm2(std::span<const double> a) { return std::sqrt(dot(a, a)); }

}  // namespace

SolveResult solve_bicgstab(const SparseMat& A, std::span<const double> b,
                           double tol, int maxiter) {
  const int n = A.n;
  if (static_cast<int>(b.size()) != n)
    throw std::invalid_argument("solve_bicgstab: dimension mismatch");
  if (maxiter <= 0) maxiter = 10 * n;

  SolveResult res;
  res.x.assign(n, 0.0);
  const double bnorm = norm2(b);
  if (bnorm == 0.0) return res;

  std::vector<double> inv_diag(n, 1.0);
  for (int r = 0; r < n; ++r) {
    for (int k = A.row_offsets[r]; k < A.row_offsets[r + 1]; ++k) {
      if (A.cols[k] == r && A.vals[k] != 0.0) inv_diag[r] = 1.0 / A.vals[k];
    }
  }

  std::vector<double> r_vec(b.begin(), b.end());  // r = b - A*0
  std::vector<double> r_hat = r_vec;
  std::vector<double> p(n, 0.0), v(n, 0.0), s(n), t(n), phat(n), shat(n);
  double rho = 1.0, alpha = 1.0, omega = 1.0;
  const double target = tol * bnorm;
  const double breakdown = 1e-300;
  bool fresh = true;

  auto true_residual = [&]() {
    std::vector<double> ax = spmv(A, res.x);
    for (int i = 0; i < n; ++i) ax[i] = b[i] - ax[i];
    return norm2(ax);
  };
  // accept only on the independently recomputed residual
  auto converged = [&](int it) {
    res.iterations = it;
    res.residual = true_residual();
    return res.residual <= target;
  };
  auto restart = [&]() {
    spmv(A, res.x, r_vec);
    for (int i = 0; i < n; ++i) r_vec[i] = b[i] - r_vec[i];
    r_hat = r_vec;
    std::fill(p.begin(), p.end(), 0.0);
    std::fill(v.begin(), v.end(), 0.0);
    rho = alpha = omega = 1.0;
    fresh = true;
  };

  for (int it = 1; it <= maxiter; ++it) {
    double rho_new = dot(r_hat, r_vec);
    if (std::fabs(rho_new) < breakdown) {
      if (converged(it)) return res;
      if (!fresh) {
        restart();
        rho_new = dot(r_hat, r_vec);
      }
      if (std::fabs(rho_new) < breakdown)
        throw SolverError("bicgstab: rho breakdown", true_residual(), it);
    }
    if (fresh) {
      p = r_vec;
      fresh = false;
    } else {
      double beta = (rho_new / rho) * (alpha / omega);
      for (int i = 0; i < n; ++i) p[i] = r_vec[i] + beta * (p[i] - omega * v[i]);
    }
    rho = rho_new;
    for (int i = 0; i < n; ++i) phat[i] = inv_diag[i] * p[i];
    spmv(A, phat, v);
    double rhat_v = dot(r_hat, v);
    if (std::fabs(rhat_v) < breakdown) {
      if (converged(it)) return res;
      throw SolverError("bicgstab: alpha breakdown", true_residual(), it);
    }
    alpha = rho / rhat_v;
    for (int i = 0; i < n; ++i) s[i] = r_vec[i] - alpha * v[i];
    if (norm2(s) <= target) {
      for (int i = 0; i < n; ++i) res.x[i] += alpha * phat[i];
      if (converged(it)) return res;
      restart();  // recurrence disagrees with the true residual
      continue;
    }
    for (int i = 0; i < n; ++i) shat[i] = inv_diag[i] * s[i];
    spmv(A, shat, t);
    double tt = dot(t, t);
    if (tt < breakdown) {
      for (int i = 0; i < n; ++i) res.x[i] += alpha * phat[i];
      if (converged(it)) return res;
      throw SolverError("bicgstab: omega breakdown", true_residual(), it);
    }
    omega = dot(t, s) / tt;
    for (int i = 0; i < n; ++i) res.x[i] += alpha * phat[i] + omega * shat[i];
    for (int i = 0; i < n; ++i) r_vec[i] = s[i] - omega * t[i];
    res.iterations = it;
    if (norm2(r_vec) <= target) {
      if (converged(it)) return res;
      restart();
      continue;
    }
    if (omega == 0.0) {
      if (converged(it)) return res;
      throw SolverError("bicgstab: omega breakdown", true_residual(), it);
    }
  }
  throw SolverError("bicgstab: no convergence in " + std::to_string(maxiter) + " iterations",
                    true_residual(), maxiter);
}

}  // namespace sdllb
