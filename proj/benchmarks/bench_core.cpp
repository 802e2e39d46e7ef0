#include <benchmark/benchmark.h>

#include "sdllb/config.hpp"
#include "sdllb/fem.hpp"
#include "sdllb/forms.hpp"
#include "sdllb/sparse.hpp"
#include "sdllb/stepper.hpp"

using namespace sdllb;

namespace {

std::shared_ptr<const FeSpace> square_space(int n, int degree) {
  return build_space(std::make_shared<Mesh>(unit_square_mesh(n)), degree);
}

void bench_expr_eval(benchmark::State& state) {
  ExprAst e = parse("0.1*sin(2*pi*x)*cos(pi*y) + x^2*y - exp(-t)");
  double x = 0.3, y = -0.7, t = 0.1;
  for (auto _ : state) {
    benchmark::DoNotOptimize(eval(e, x, y, t));
    x += 1e-9;
  }
}
BENCHMARK(bench_expr_eval);

void bench_assemble_m_system(benchmark::State& state) {
  auto space = square_space(static_cast<int>(state.range(0)), 1);
  Assembler assembler(space);
  Coefficients coeff = unit_coefficients();
  FieldVec m = nodal_interpolate(parse_vector({"0.1*sin(pi*x)", "0.05*y", "0"}), space);
  FieldVec s = nodal_interpolate(parse_vector({"0.02*x", "0", "0.01"}), space);
  for (auto _ : state) {
    auto sys = assembler.m_system(m, s, coeff, 1e-3);
    benchmark::DoNotOptimize(sys.first.vals.data());
  }
}
BENCHMARK(bench_assemble_m_system)->Arg(16)->Arg(32)->Arg(64);

void bench_bicgstab_mass(benchmark::State& state) {
  auto space = square_space(static_cast<int>(state.range(0)), 1);
  SparseMat M = vector_mass_matrix(space);
  std::vector<double> b(M.n, 1.0);
  for (auto _ : state) {
    auto r = solve_bicgstab(M, b, 1e-10);
    benchmark::DoNotOptimize(r.x.data());
  }
}
BENCHMARK(bench_bicgstab_mass)->Arg(16)->Arg(32)->Arg(64);

void bench_step(benchmark::State& state) {
  SimConfig config;
  apply_preset(config, "sim2");
  auto space = square_space(2 * config.nominal_one_over_h(), config.degree);
  Stepper stepper(space, config.coeff, config.k, config.solver);
  SimState st = stepper.init_state(config.m0, config.s0);
  for (auto _ : state) {
    SimState next = stepper.step(st);
    benchmark::DoNotOptimize(next.m.values.data());
  }
}
BENCHMARK(bench_step);

}  // namespace

BENCHMARK_MAIN();
