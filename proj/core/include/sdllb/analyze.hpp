#pragma once

#include <optional>
#include <vector>

#include "sdllb/config.hpp"
#include "sdllb/stepper.hpp"

namespace sdllb {

/// E(m) = alpha'/2 |grad m|^2 + kappa/4 |m|_L4^4 + kappa mu |m|_L2^2.
struct EnergyBreakdown {
  double exchange = 0.0;
  double quartic = 0.0;
  double quadratic = 0.0;
  double total = 0.0;
};

EnergyBreakdown energy(const FieldVec& m, const Coefficients& coeff);

/// L2 Riesz representative of the effective-field functional
/// phi -> -alpha'(grad m, grad phi) - kappa mu (m, phi) - kappa (|m|^2 m, phi).
FieldVec effective_field(const FieldVec& m, const Coefficients& coeff,
                         const Assembler& assembler, double tol = 1e-12);

/// Discrete residual of the energy balance along a run with retained
/// states: r^n = E(m^n) - E(m^0)
///             + k sum_{i<=n} [ alpha |H_i|^2 - gamma' (m_i x s_i, H_i) ].
std::vector<double> energy_residual(const RunResult& result, const Coefficients& coeff,
                                    double k);

struct RateRow {
  double param = 0.0;  // nominal 1/h, or k for temporal studies
  double eL2_m = 0.0, eH1_m = 0.0, eL2_s = 0.0, eH1_s = 0.0;
  bool has_rates = false;
  double rL2_m = 0.0, rH1_m = 0.0, rL2_s = 0.0, rH1_s = 0.0;
};

struct RateTable {
  bool temporal = false;
  std::vector<RateRow> rows;  // param strictly decreasing in h (increasing 1/h)
};

/// Per-level run summaries collected during a rate study.
struct RateStudyDiagnostics {
  std::vector<std::vector<TraceRow>> traces;
  std::vector<bool> smallness_violated;
  std::vector<double> max_l2_increment_over_bound;
  std::vector<double> stability_sum;
};

/// Extrapolated spatial convergence: runs the configuration on the mesh
/// ladder starting at config.level, one row per adjacent mesh pair
/// (levels rows, levels+1 meshes, time-stepped in lockstep). Row errors are
/// max over all steps of the inter-mesh difference, coarse fields carried
/// to the fine mesh by prolongation (square) or point evaluation at fine
/// quadrature points (disk). Rates are log2 of successive error ratios.
RateTable h_rate_study(const SimConfig& config, int levels,
                       RateStudyDiagnostics* diag = nullptr);

/// Temporal self-convergence on a fixed mesh: errors of each k against the
/// smallest-k run (the reference) at the common final time. The rate
/// between consecutive rows uses the effective step k_i - k_ref as the
/// abscissa, which reduces to log2 of the error ratio when k_ref << k.
RateTable k_rate_study(const SimConfig& config, const std::vector<double>& ks,
                       RateStudyDiagnostics* diag = nullptr);

struct DecayReport {
  bool mu_nonneg = false;
  bool m_l2_monotone = true;        // meaningful when mu_nonneg
  bool unit_checked = false;
  bool unit_bound_ok = true;        // |m^n|^2 <= (1+2k)^{-n} |m^0|^2
  bool s_checked = false;
  bool s_monotone_after_j_off = true;
  double stability_sum = 0.0;       // S_N from the trace
  bool stability_finite = true;
  int violations = 0;
};

DecayReport decay_report(const std::vector<TraceRow>& trace, const Coefficients& coeff,
                         double k, bool unit_preset = false,
                         std::optional<double> j_off_time = std::nullopt,
                         double slack = 1e-9);

/// Inter-mesh difference norms (L2, full H1) between a coarse field and a
/// fine field one refinement below it.
std::pair<double, double> pair_error(const FieldVec& coarse, const FieldVec& fine,
                                     const RefinementMap& map);

}  // namespace sdllb
