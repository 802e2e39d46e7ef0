#include "sdllb/stepper.hpp"

#include <cmath>
#include <cstdio>
#include <future>
#include <stdexcept>
#include <string>

#include "sdllb/analyze.hpp"
#include "sdllb/errors.hpp"
#include "sdllb/sparse.hpp"
#include "sdllb/threads.hpp"

namespace sdllb {

Stepper::Stepper(std::shared_ptr<const FeSpace> space, Coefficients coeff, double k,
                 SolverConfig solver)
    : space_(std::move(space)),
      coeff_(std::move(coeff)),
      k_(k),
      solver_(solver),
      assembler_(space_) {
  coeff_.validate();
  if (!(k_ > 0)) throw ConfigError("k", "time step must be positive");
}

double Stepper::smallness_threshold() const {
  auto [lo, hi] = assembler_.d0_bounds(coeff_);
  return lo / (2.0 * coeff_.beta * hi);
}

bool Stepper::smallness_ok(const FieldVec& m) const {
  double nodal_max = norm(m, NormKind::NodalMax);
  return nodal_max * nodal_max < smallness_threshold();
}

SimState Stepper::init_state(const VectorExpr& m0, const VectorExpr& s0) const {
  SimState st;
  st.n = 0;
  st.t = 0.0;
  double tol = std::min(solver_.tol, 1e-12);
  st.m = l2_project(m0, space_, 0.0, tol);
  st.s = l2_project(s0, space_, 0.0, tol);
  if (!smallness_ok(st.m) && !warned_smallness_) {
    warned_smallness_ = true;
    std::fprintf(stderr,
                 "warning: initial |m|_max^2 >= D_*/(2 beta D^*); the discrete "
                 "systems may lose coercivity\n");
  }
  return st;
}

SimState Stepper::step(const SimState& state, bool with_current) const {
  const double t_next = state.t + k_;
  auto solve_m = [&]() {
    auto [A, b] = assembler_.m_system(state.m, state.s, coeff_, k_);
    return solve_bicgstab(A, b, solver_.tol, solver_.maxiter);
  };
  auto solve_s = [&]() {
    Coefficients c = coeff_;
    if (!with_current) c.j = zero_vector_expr();
    auto [A, b] = assembler_.s_system(state.m, state.s, c, t_next, k_);
    return solve_bicgstab(A, b, solver_.tol, solver_.maxiter);
  };

  SolveResult rm, rs;
  try {
    if (worker_count() >= 2) {
      auto fut = std::async(std::launch::async, solve_s);
      rm = solve_m();
      rs = fut.get();
    } else {
      rm = solve_m();
      rs = solve_s();
    }
  } catch (const SolverError& e) {
    throw SolverError("step " + std::to_string(state.n + 1) + ": " + e.what(),
                      e.residual(), e.iterations());
  }

  last_iters_m_ = rm.iterations;
  last_iters_s_ = rs.iterations;

  SimState next;
  next.n = state.n + 1;
  next.t = t_next;
  next.m = FieldVec{std::move(rm.x), space_};
  next.s = FieldVec{std::move(rs.x), space_};
  return next;
}

namespace {

TraceRow make_trace_row(const SimState& st, const Coefficients& coeff, int im, int is) {
  TraceRow row;
  row.n = st.n;
  row.t = st.t;
  row.m_l2 = norm(st.m, NormKind::L2);
  row.m_h1 = norm(st.m, NormKind::H1);
  row.m_nodal_max = norm(st.m, NormKind::NodalMax);
  row.s_l2 = norm(st.s, NormKind::L2);
  row.s_h1 = norm(st.s, NormKind::H1);
  row.energy = energy(st.m, coeff).total;
  row.iters_m = im;
  row.iters_s = is;
  return row;
}

}  // namespace

RunResult run(const SimConfig& config, bool retain_states) {
  auto mesh = std::make_shared<Mesh>(mesh_for(config));
  auto space = build_space(mesh, config.degree);
  return run(config, space, retain_states);
}

RunResult run(const SimConfig& config, std::shared_ptr<const FeSpace> space,
              bool retain_states) {
  config.validate();
  Coefficients coeff = config.coeff;
  Stepper stepper(space, coeff, config.k, config.solver);

  const long N = static_cast<long>(std::floor(config.T / config.k + 1e-12));
  RunResult out;

  // snapshot step indices for the configured times
  std::vector<long> snap_steps;
  for (double t : config.snapshot_times) {
    long n = std::lround(t / config.k);
    n = std::max(0L, std::min(N, n));
    snap_steps.push_back(n);
  }

  SimState st = stepper.init_state(config.m0, config.s0);
  out.trace.push_back(make_trace_row(st, coeff, 0, 0));
  if (retain_states) out.states.emplace_back(st.m, st.s);
  for (std::size_t i = 0; i < snap_steps.size(); ++i)
    if (snap_steps[i] == 0) {
      out.snapshots.push_back({0, 0.0, st.m, st.s});
      break;
    }
  if (!stepper.smallness_ok(st.m)) out.smallness_violated = true;

  double prev_l2_sq = out.trace[0].m_l2 * out.trace[0].m_l2 +
                      out.trace[0].s_l2 * out.trace[0].s_l2;
  double prev_m_l2 = out.trace[0].m_l2;
  double h1_sum = 0.0;

  for (long n = 1; n <= N; ++n) {
    bool with_current =
        !(config.j_off_time && st.t + config.k >= *config.j_off_time - 1e-15);
    SimState next = stepper.step(st, with_current);
    st = std::move(next);

    TraceRow row = make_trace_row(st, coeff, stepper.last_iters_m(), stepper.last_iters_s());
    for (double v : {row.m_l2, row.m_h1, row.s_l2, row.s_h1, row.energy})
      if (!std::isfinite(v))
        throw SolverError("step " + std::to_string(n) + ": non-finite field norm", 0.0, 0);

    // stability monitor: L2 increment vs the current-density load bound
    double l2_sq = row.m_l2 * row.m_l2 + row.s_l2 * row.s_l2;
    double jmax = with_current ? j_max_magnitude(*space, coeff.j, st.t) : 0.0;
    double s_h1semi = norm(st.s, NormKind::H1Semi);
    double bound = 2.0 * config.k * coeff.beta_prime * jmax * prev_m_l2 * s_h1semi;
    double slack = 1e-9 * (1.0 + prev_l2_sq) + 1e-6 * bound;
    out.max_l2_increment_over_bound =
        std::max(out.max_l2_increment_over_bound, (l2_sq - prev_l2_sq) - (bound + slack));
    h1_sum += config.k * (row.m_h1 * row.m_h1 + row.s_h1 * row.s_h1);
    out.stability_sum = l2_sq + h1_sum;
    prev_l2_sq = l2_sq;
    prev_m_l2 = row.m_l2;

    if (n % config.trace_every == 0 || n == N) out.trace.push_back(row);
    if (retain_states) out.states.emplace_back(st.m, st.s);
    for (std::size_t i = 0; i < snap_steps.size(); ++i) {
      if (snap_steps[i] == n) {
        out.snapshots.push_back({static_cast<int>(n), st.t, st.m, st.s});
        break;
      }
    }
    if (!stepper.smallness_ok(st.m)) out.smallness_violated = true;
  }
  out.final_state = std::move(st);
  return out;
}

}  // namespace sdllb
