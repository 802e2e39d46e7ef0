#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>
#include <vector>

#include "sdllb/errors.hpp"
#include "sdllb/fem.hpp"
#include "sdllb/forms.hpp"
#include "sdllb/mesh.hpp"
#include "sdllb/sparse.hpp"

using namespace sdllb;

namespace {

std::vector<std::vector<double>> to_dense(const SparseMat& A) {
  std::vector<std::vector<double>> D(A.n, std::vector<double>(A.n, 0.0));
  for (int r = 0; r < A.n; ++r)
    for (int k = A.row_offsets[r]; k < A.row_offsets[r + 1]; ++k)
      D[r][A.cols[k]] += A.vals[k];
  return D;
}

// plain Gaussian elimination with partial pivoting, the dense oracle
std::vector<double> dense_lu_solve(std::vector<std::vector<double>> A, std::vector<double> b) {
  const int n = static_cast<int>(b.size());
  for (int col = 0; col < n; ++col) {
    int piv = col;
    for (int r = col + 1; r < n; ++r)
      if (std::fabs(A[r][col]) > std::fabs(A[piv][col])) piv = r;
    std::swap(A[piv], A[col]);
    std::swap(b[piv], b[col]);
    for (int r = col + 1; r < n; ++r) {
      double f = A[r][col] / A[col][col];
      for (int c = col; c < n; ++c) A[r][c] -= f * A[col][c];
      b[r] -= f * b[col];
    }
  }
  std::vector<double> x(n);
  for (int r = n - 1; r >= 0; --r) {
    double acc = b[r];
    for (int c = r + 1; c < n; ++c) acc -= A[r][c] * x[c];
    x[r] = acc / A[r][r];
  }
  return x;
}

}  // namespace

TEST_CASE("triplet duplicates are summed") {
  Triplets t;
  t.n = 1;
  t.add(0, 0, 1.0);
  t.add(0, 0, 2.0);
  SparseMat A = csr_from_triplets(t);
  CHECK(A.nnz() == 1);
  CHECK(A.vals[0] == 3.0);
}

TEST_CASE("identity triplets") {
  Triplets t;
  t.n = 3;
  for (int i = 0; i < 3; ++i) t.add(i, i, 1.0);
  SparseMat A = csr_from_triplets(t);
  CHECK(A.nnz() == 3);
  for (int r = 0; r < 3; ++r) {
    CHECK(A.row_offsets[r + 1] - A.row_offsets[r] == 1);
    CHECK(A.cols[A.row_offsets[r]] == r);
  }
}

TEST_CASE("random triplets match a dense accumulation") {
  std::mt19937 rng(7);
  std::uniform_int_distribution<int> idx(0, 49);
  std::uniform_real_distribution<double> val(-1, 1);
  Triplets t;
  t.n = 50;
  std::vector<std::vector<double>> D(50, std::vector<double>(50, 0.0));
  for (int i = 0; i < 600; ++i) {
    int r = idx(rng), c = idx(rng);
    double v = val(rng);
    t.add(r, c, v);
    D[r][c] += v;
  }
  SparseMat A = csr_from_triplets(t);
  auto DA = to_dense(A);
  for (int r = 0; r < 50; ++r)
    for (int c = 0; c < 50; ++c) CHECK(DA[r][c] == doctest::Approx(D[r][c]).epsilon(1e-15));
  // columns strictly increasing within each row
  for (int r = 0; r < A.n; ++r)
    for (int k = A.row_offsets[r] + 1; k < A.row_offsets[r + 1]; ++k)
      CHECK(A.cols[k] > A.cols[k - 1]);
}

TEST_CASE("triplet index out of range") {
  Triplets t;
  t.n = 2;
  t.add(0, 2, 1.0);
  CHECK_THROWS_AS(csr_from_triplets(t), std::out_of_range);
}

TEST_CASE("spmv identity and diagonal") {
  Triplets t;
  t.n = 2;
  t.add(0, 0, 1.0);
  t.add(1, 1, 1.0);
  SparseMat I = csr_from_triplets(t);
  std::vector<double> x = {3.0, -4.0};
  CHECK(spmv(I, x) == x);

  Triplets d;
  d.n = 2;
  d.add(0, 0, 2.0);
  d.add(1, 1, 3.0);
  auto y = spmv(csr_from_triplets(d), std::vector<double>{1.0, 1.0});
  CHECK(y[0] == 2.0);
  CHECK(y[1] == 3.0);
}

TEST_CASE("spmv matches dense multiply") {
  std::mt19937 rng(11);
  std::uniform_int_distribution<int> idx(0, 49);
  std::uniform_real_distribution<double> val(-1, 1);
  Triplets t;
  t.n = 50;
  for (int i = 0; i < 700; ++i) t.add(idx(rng), idx(rng), val(rng));
  SparseMat A = csr_from_triplets(t);
  auto D = to_dense(A);
  std::vector<double> x(50);
  for (auto& v : x) v = val(rng);
  auto y = spmv(A, x);
  for (int r = 0; r < 50; ++r) {
    double acc = 0;
    for (int c = 0; c < 50; ++c) acc += D[r][c] * x[c];
    CHECK(y[r] == doctest::Approx(acc).epsilon(1e-13));
  }
}

TEST_CASE("spmv dimension mismatch") {
  Triplets t;
  t.n = 2;
  t.add(0, 0, 1.0);
  SparseMat A = csr_from_triplets(t);
  std::vector<double> x(3, 0.0);
  CHECK_THROWS(spmv(A, x));
}

TEST_CASE("bicgstab on the identity converges immediately") {
  Triplets t;
  t.n = 4;
  for (int i = 0; i < 4; ++i) t.add(i, i, 1.0);
  SparseMat I = csr_from_triplets(t);
  std::vector<double> b = {1.0, -2.0, 3.0, 0.5};
  auto r = solve_bicgstab(I, b, 1e-12);
  CHECK(r.iterations <= 1);
  for (int i = 0; i < 4; ++i) CHECK(r.x[i] == doctest::Approx(b[i]).epsilon(1e-14));
}

TEST_CASE("bicgstab on a diagonal system") {
  Triplets t;
  t.n = 2;
  t.add(0, 0, 2.0);
  t.add(1, 1, 3.0);
  auto r = solve_bicgstab(csr_from_triplets(t), std::vector<double>{2.0, 3.0}, 1e-12);
  CHECK(r.x[0] == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(r.x[1] == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("bicgstab solves the magnetisation system against dense LU") {
  auto space = build_space(std::make_shared<Mesh>(unit_square_mesh(4)), 1);
  Assembler assembler(space);
  Coefficients coeff = unit_coefficients();

  std::mt19937 rng(21);
  std::uniform_real_distribution<double> val(-0.1, 0.1);
  FieldVec m_prev = zero_field(space), s_prev = zero_field(space);
  for (auto& v : m_prev.values) v = val(rng);
  for (auto& v : s_prev.values) v = val(rng);

  auto [A, b] = assembler.m_system(m_prev, s_prev, coeff, 1e-2);
  auto result = solve_bicgstab(A, b, 1e-12);
  auto exact = dense_lu_solve(to_dense(A), b);
  double scale = 0.0;
  for (double v : exact) scale = std::max(scale, std::fabs(v));
  for (int i = 0; i < A.n; ++i) CHECK(std::fabs(result.x[i] - exact[i]) <= 1e-8 * (1 + scale));
}

TEST_CASE("bicgstab postcondition holds on return") {
  auto space = build_space(std::make_shared<Mesh>(unit_square_mesh(3)), 1);
  SparseMat M = vector_mass_matrix(space);
  std::vector<double> b(M.n);
  std::mt19937 rng(5);
  std::uniform_real_distribution<double> val(-1, 1);
  for (auto& v : b) v = val(rng);
  double tol = 1e-11;
  auto r = solve_bicgstab(M, b, tol);
  auto res = spmv(M, r.x);
  double rn = 0, bn = 0;
  for (int i = 0; i < M.n; ++i) {
    rn += (b[i] - res[i]) * (b[i] - res[i]);
    bn += b[i] * b[i];
  }
  CHECK(std::sqrt(rn) <= tol * std::sqrt(bn));
  CHECK(r.residual <= tol * std::sqrt(bn));
}

TEST_CASE("bicgstab is deterministic") {
  auto space = build_space(std::make_shared<Mesh>(unit_square_mesh(3)), 1);
  SparseMat M = vector_mass_matrix(space);
  std::vector<double> b(M.n, 1.0);
  auto r1 = solve_bicgstab(M, b, 1e-10);
  auto r2 = solve_bicgstab(M, b, 1e-10);
  CHECK(r1.iterations == r2.iterations);
  CHECK(r1.x == r2.x);
}

TEST_CASE("SPD mass system converges within n iterations") {
  auto space = build_space(std::make_shared<Mesh>(unit_square_mesh(2)), 1);
  SparseMat M = vector_mass_matrix(space);
  std::vector<double> b(M.n, 0.3);
  auto r = solve_bicgstab(M, b, 1e-12, M.n);
  CHECK(r.iterations <= M.n);
}

TEST_CASE("non-convergence raises a solver error with the residual") {
  Triplets t;
  t.n = 3;
  // stiff non-symmetric system, one iteration is not enough
  t.add(0, 0, 1.0); t.add(0, 1, 1e4);
  t.add(1, 1, 1.0); t.add(1, 2, -1e4);
  t.add(2, 0, 1e-3); t.add(2, 2, 1.0);
  SparseMat A = csr_from_triplets(t);
  std::vector<double> b = {1.0, 2.0, 3.0};
  CHECK_THROWS_AS(solve_bicgstab(A, b, 1e-14, 1), SolverError);
  try {
    solve_bicgstab(A, b, 1e-14, 1);
  } catch (const SolverError& e) {
    CHECK(e.residual() > 0.0);
    CHECK(e.iterations() >= 1);
  }
}

TEST_CASE("zero right-hand side returns zero without iterating") {
  Triplets t;
  t.n = 2;
  t.add(0, 0, 2.0);
  t.add(1, 1, 2.0);
  auto r = solve_bicgstab(csr_from_triplets(t), std::vector<double>{0.0, 0.0}, 1e-12);
  CHECK(r.iterations == 0);
  CHECK(r.x == std::vector<double>{0.0, 0.0});
}
