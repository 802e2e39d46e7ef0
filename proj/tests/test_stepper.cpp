#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "sdllb/config.hpp"
#include "sdllb/sparse.hpp"
#include "sdllb/stepper.hpp"

using namespace sdllb;

namespace {

std::shared_ptr<const FeSpace> square_space(int n, int degree = 1) {
  return build_space(std::make_shared<Mesh>(unit_square_mesh(n)), degree);
}

SimConfig unit_config(int base_one_over_h, double k, double T) {
  SimConfig c;
  apply_preset(c, "unit");
  c.domain = Mesh::Domain::Square;
  c.domain_set = true;
  c.level = 0;
  c.base_one_over_h = base_one_over_h;
  c.k = k;
  c.T = T;
  c.m0 = parse_vector({"0.1*sin(pi*x)", "0", "0"});
  c.s0 = zero_vector_expr();
  c.m0_set = c.s0_set = true;
  return c;
}

}  // namespace

TEST_CASE("zero initial data stays zero") {
  auto space = square_space(3);
  Stepper stepper(space, unit_coefficients(), 1e-2);
  SimState st = stepper.init_state(zero_vector_expr(), zero_vector_expr());
  CHECK(norm(st.m, NormKind::L2) == 0.0);
  CHECK(norm(st.s, NormKind::L2) == 0.0);
  SimState next = stepper.step(st);
  CHECK(norm(next.m, NormKind::L2) == 0.0);
  CHECK(norm(next.s, NormKind::L2) == 0.0);
  CHECK(next.n == 1);
  CHECK(next.t == doctest::Approx(1e-2));
}

TEST_CASE("constant initial data projects exactly") {
  auto space = square_space(3);
  Stepper stepper(space, unit_coefficients(), 1e-2);
  SimState st = stepper.init_state(parse_vector({"1", "0", "0"}), zero_vector_expr());
  for (int i = 0; i < space->scalar_dof_count; ++i) {
    CHECK(st.m.values[3 * i + 0] == doctest::Approx(1.0).epsilon(1e-11));
    CHECK(st.m.values[3 * i + 1] == doctest::Approx(0.0).epsilon(1e-11));
  }
}

TEST_CASE("disk initialisation keeps the nodal max near the data's sup") {
  SimConfig c;
  apply_preset(c, "sim1");
  auto mesh = std::make_shared<Mesh>(mesh_for(c));
  auto space = build_space(mesh, 1);
  Stepper stepper(space, c.coeff, c.k, c.solver);
  SimState st = stepper.init_state(c.m0, c.s0);
  double nodal_max = norm(st.m, NormKind::NodalMax);
  CHECK(nodal_max <= 0.1 * 1.05);
  CHECK(nodal_max >= 0.05);
}

TEST_CASE("one step from constant fields matches the closed forms") {
  auto space = square_space(3);
  Coefficients coeff = unit_coefficients();
  coeff.alpha = 2.0;
  coeff.kappa = 0.5;
  coeff.mu = 3.0;
  coeff.tau_sf = 0.2;
  const double k = 1e-3;
  Stepper stepper(space, coeff, k, {1e-13, 0});
  SimState st = stepper.init_state(parse_vector({"0.02", "-0.03", "0.05"}),
                                   zero_vector_expr());
  SimState next = stepper.step(st);
  double c2 = 0.02 * 0.02 + 0.03 * 0.03 + 0.05 * 0.05;
  double denom = 1.0 + k * coeff.alpha * coeff.kappa * (coeff.mu + c2);
  const double expect[3] = {0.02 / denom, -0.03 / denom, 0.05 / denom};
  for (int i = 0; i < space->scalar_dof_count; ++i)
    for (int a = 0; a < 3; ++a)
      CHECK(next.m.values[3 * i + a] == doctest::Approx(expect[a]).epsilon(1e-8));
  // with j = 0 and s0 = 0 the spin stays identically zero
  CHECK(norm(next.s, NormKind::L2) == 0.0);
}

TEST_CASE("the magnetisation norm never grows when mu is nonnegative") {
  auto space = square_space(4);
  Coefficients coeff = unit_coefficients();
  coeff.mu = 0.7;
  Stepper stepper(space, coeff, 5e-3, {1e-12, 0});
  std::mt19937 rng(61);
  std::uniform_real_distribution<double> val(-0.2, 0.2);
  for (int trial = 0; trial < 5; ++trial) {
    SimState st;
    st.n = 0;
    st.t = 0;
    st.m = zero_field(space);
    st.s = zero_field(space);
    for (auto& v : st.m.values) v = val(rng);
    for (auto& v : st.s.values) v = val(rng);
    double before = norm(st.m, NormKind::L2);
    SimState next = stepper.step(st);
    CHECK(norm(next.m, NormKind::L2) <= before * (1.0 + 1e-10) + 1e-300);
  }
}

TEST_CASE("the two solves are order independent") {
  auto space = square_space(3);
  Coefficients coeff = unit_coefficients();
  coeff.j = VectorExpr{{parse("0.5"), parse("1"), make_constant(0.0)}};
  Assembler assembler(space);
  std::mt19937 rng(97);
  std::uniform_real_distribution<double> val(-0.1, 0.1);
  FieldVec m_prev = zero_field(space), s_prev = zero_field(space);
  for (auto& v : m_prev.values) v = val(rng);
  for (auto& v : s_prev.values) v = val(rng);
  const double k = 1e-2;

  auto msys1 = assembler.m_system(m_prev, s_prev, coeff, k);
  auto m1 = solve_bicgstab(msys1.first, msys1.second, 1e-12);
  auto ssys1 = assembler.s_system(m_prev, s_prev, coeff, k, k);
  auto s1 = solve_bicgstab(ssys1.first, ssys1.second, 1e-12);

  auto ssys2 = assembler.s_system(m_prev, s_prev, coeff, k, k);
  auto s2 = solve_bicgstab(ssys2.first, ssys2.second, 1e-12);
  auto msys2 = assembler.m_system(m_prev, s_prev, coeff, k);
  auto m2 = solve_bicgstab(msys2.first, msys2.second, 1e-12);

  for (std::size_t i = 0; i < m1.x.size(); ++i) {
    CHECK(std::fabs(m1.x[i] - m2.x[i]) <= 1e-14);
    CHECK(std::fabs(s1.x[i] - s2.x[i]) <= 1e-14);
  }
}

TEST_CASE("run with T below k produces only the initial trace row") {
  SimConfig c = unit_config(4, 1e-2, 5e-3);
  RunResult r = run(c);
  CHECK(r.trace.size() == 1);
  CHECK(r.final_state.n == 0);
}

TEST_CASE("hot-magnet disk run stays finite and decays") {
  SimConfig c;
  apply_preset(c, "sim1");
  c.T = 1e-5;  // 100 steps at the preset's k
  RunResult r = run(c);
  CHECK(r.final_state.n == 100);
  CHECK(r.trace.size() == 101);
  for (std::size_t i = 0; i < r.trace.size(); ++i) {
    CHECK(std::isfinite(r.trace[i].m_l2));
    CHECK(std::isfinite(r.trace[i].s_l2));
    CHECK(std::isfinite(r.trace[i].energy));
    if (i > 0) CHECK(r.trace[i].m_l2 <= r.trace[i - 1].m_l2 * (1.0 + 1e-9));
  }
}

TEST_CASE("zero current and zero spin data keep the spin at zero") {
  SimConfig c = unit_config(4, 1e-2, 0.5);
  RunResult r = run(c);
  double m0 = r.trace.front().m_l2;
  for (const auto& row : r.trace) CHECK(row.s_l2 <= 1e-8 * m0);
}

TEST_CASE("snapshots are captured at the requested times") {
  SimConfig c = unit_config(4, 1e-2, 0.1);
  c.snapshot_times = {0.0, 0.05, 0.1};
  RunResult r = run(c);
  CHECK(r.snapshots.size() == 3);
  CHECK(r.snapshots[0].n == 0);
  CHECK(r.snapshots[1].n == 5);
  CHECK(r.snapshots[2].n == 10);
}

TEST_CASE("trace respects trace_every and keeps the final row") {
  SimConfig c = unit_config(4, 1e-2, 0.1);
  c.trace_every = 3;
  RunResult r = run(c);
  // rows at n = 0, 3, 6, 9 and the final row n = 10
  CHECK(r.trace.size() == 5);
  CHECK(r.trace.back().n == 10);
}
