#pragma once

#include <span>
#include <vector>

namespace sdllb {

/// Unassembled (row, col, value) entries for a square n x n matrix.
struct Triplets {
  int n = 0;
  std::vector<int> rows, cols;
  std::vector<double> vals;

  void add(int r, int c, double v) {
    rows.push_back(r);
    cols.push_back(c);
    vals.push_back(v);
  }
  std::size_t size() const { return rows.size(); }
};

/// Compressed-row storage, duplicates summed, columns sorted within rows.
struct SparseMat {
  int n = 0;
  std::vector<int> row_offsets;  // size n+1
  std::vector<int> cols;
  std::vector<double> vals;

  std::size_t nnz() const { return cols.size(); }
};

SparseMat csr_from_triplets(const Triplets& t);

void spmv(const SparseMat& A, std::span<const double> x, std::span<double> y);
std::vector<double> spmv(const SparseMat& A, std::span<const double> x);

struct SolveResult {
  std::vector<double> x;
  int iterations = 0;
  double residual = 0.0;  // final true residual norm, recomputed via spmv
};

/// Jacobi-preconditioned BiCGStab with zero initial guess. Converged when
/// ||b - A x||_2 <= tol * ||b||_2 (true residual, recomputed). Throws
/// SolverError carrying the residual on breakdown or maxiter.
/// maxiter <= 0 selects the default 10 * n.
SolveResult solve_bicgstab(const SparseMat& A, std::span<const double> b,
                           double tol = 1e-10, int maxiter = 0);

}  // namespace sdllb
