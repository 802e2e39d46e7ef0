#pragma once

#include <memory>
#include <utility>
#include <vector>

#include "sdllb/config.hpp"
#include "sdllb/fem.hpp"
#include "sdllb/forms.hpp"

namespace sdllb {

struct SimState {
  int n = 0;
  double t = 0.0;
  FieldVec m, s;
};

struct TraceRow {
  int n = 0;
  double t = 0.0;
  double m_l2 = 0.0, m_h1 = 0.0, m_nodal_max = 0.0;
  double s_l2 = 0.0, s_h1 = 0.0;
  double energy = 0.0;
  int iters_m = 0, iters_s = 0;
};

/// Drives the decoupled two-solve time step. Both solves use only the
/// previous state, so they run concurrently; matrices are re-assembled
/// every step, only the unweighted mass/stiffness blocks are cached in the
/// Assembler.
class Stepper {
 public:
  Stepper(std::shared_ptr<const FeSpace> space, Coefficients coeff, double k,
          SolverConfig solver = {});

  /// L2-projects the initial data. Warns (stderr, once) when the discrete
  /// smallness criterion |m|_max^2 < D_* / (2 beta D^*) fails.
  SimState init_state(const VectorExpr& m0, const VectorExpr& s0) const;

  /// with_current = false zeroes the current density j for this step
  /// (used when the configuration schedules a switch-off time).
  SimState step(const SimState& state, bool with_current = true) const;

  const Assembler& assembler() const { return assembler_; }
  const Coefficients& coefficients() const { return coeff_; }
  double time_step() const { return k_; }

  /// D_*/(2 beta D^*), from D0 sampled at quadrature points.
  double smallness_threshold() const;
  bool smallness_ok(const FieldVec& m) const;

  int last_iters_m() const { return last_iters_m_; }
  int last_iters_s() const { return last_iters_s_; }

 private:
  std::shared_ptr<const FeSpace> space_;
  Coefficients coeff_;
  double k_;
  SolverConfig solver_;
  Assembler assembler_;
  mutable int last_iters_m_ = 0, last_iters_s_ = 0;
  mutable bool warned_smallness_ = false;
};

struct Snapshot {
  int n = 0;
  double t = 0.0;
  FieldVec m, s;
};

struct RunResult {
  SimState final_state;
  std::vector<TraceRow> trace;
  std::vector<Snapshot> snapshots;
  // retained per-step states (n = 0..N) when requested; empty otherwise
  std::vector<std::pair<FieldVec, FieldVec>> states;
  bool smallness_violated = false;
  // stability monitor: S_j = |m|^2 + |s|^2 + k sum_i (|m|_H1^2 + |s|_H1^2)
  double stability_sum = 0.0;
  double max_l2_increment_over_bound = 0.0;  // worst (increment - load bound)
};

/// N = floor(T/k) steps of the two decoupled solves, trace row every
/// trace_every steps plus the initial row, snapshots at the configured
/// times.
RunResult run(const SimConfig& config, bool retain_states = false);
RunResult run(const SimConfig& config, std::shared_ptr<const FeSpace> space,
              bool retain_states = false);

}  // namespace sdllb
