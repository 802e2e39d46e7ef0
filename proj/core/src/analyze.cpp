#include "sdllb/analyze.hpp"

#include <algorithm>
#include <cmath>
#include <future>
#include <stdexcept>
#include <string>

#include "sdllb/errors.hpp"
#include "sdllb/sparse.hpp"
#include "sdllb/threads.hpp"

namespace sdllb {

EnergyBreakdown energy(const FieldVec& m, const Coefficients& coeff) {
  EnergyBreakdown e;
  double semi = norm(m, NormKind::H1Semi);
  double l4 = norm(m, NormKind::L4);
  double l2 = norm(m, NormKind::L2);
  e.exchange = 0.5 * coeff.alpha_prime * semi * semi;
  e.quartic = 0.25 * coeff.kappa * l4 * l4 * l4 * l4;
  e.quadratic = coeff.kappa * coeff.mu * l2 * l2;
  e.total = e.exchange + e.quartic + e.quadratic;
  return e;
}

FieldVec effective_field(const FieldVec& m, const Coefficients& coeff,
                         const Assembler& assembler, double tol) {
  const auto& space = assembler.space();
  std::vector<double> rhs = spmv(assembler.vector_stiffness(), m.values);
  std::vector<double> mm = spmv(assembler.vector_mass(), m.values);
  std::vector<double> cubic = assembler.cubic_load(m);
  for (std::size_t i = 0; i < rhs.size(); ++i)
    rhs[i] = -coeff.alpha_prime * rhs[i] - coeff.kappa * coeff.mu * mm[i] -
             coeff.kappa * cubic[i];
  auto sol = solve_bicgstab(assembler.vector_mass(), rhs, tol);
  return FieldVec{std::move(sol.x), space};
}

std::vector<double> energy_residual(const RunResult& result, const Coefficients& coeff,
                                    double k) {
  if (result.states.empty())
    throw std::invalid_argument("energy_residual: run states were not retained");
  const auto& space = result.states.front().first.space;
  Assembler assembler(space);
  const double e0 = energy(result.states.front().first, coeff).total;

  std::vector<double> r;
  r.reserve(result.states.size());
  r.push_back(0.0);
  double acc = 0.0;
  for (std::size_t i = 1; i < result.states.size(); ++i) {
    const FieldVec& mi = result.states[i].first;
    const FieldVec& si = result.states[i].second;
    FieldVec H = effective_field(mi, coeff, assembler);
    double h_l2 = norm(H, NormKind::L2);
    // (m x s, H) = -L1(s; m, H)
    double torque = -eval_form(FormId::L1, si, nullptr, mi, H, coeff);
    acc += k * (coeff.alpha * h_l2 * h_l2 - coeff.gamma_prime * torque);
    r.push_back(energy(mi, coeff).total - e0 + acc);
  }
  return r;
}

namespace {

// L2/H1 error between coarse and fine fields, integrated with the fine
// quadrature, coarse side evaluated through the parent map (disk path).
std::pair<double, double> pair_error_pointwise(const FieldVec& coarse,
                                               const FieldVec& fine,
                                               const RefinementMap& map) {
  const auto& sp = *fine.space;
  const int nq = static_cast<int>(sp.quad.points.size());
  double l2 = 0.0, h1 = 0.0;
  std::array<double, 3> cval, fval;
  std::array<std::array<double, 2>, 3> cjac;
  for (int e = 0; e < sp.mesh->triangle_count(); ++e) {
    const int parent = map.parent_of_triangle[e][0];
    const auto& tri = sp.mesh->triangles[e];
    const auto& p0 = sp.mesh->vertices[tri[0]];
    const auto& p1 = sp.mesh->vertices[tri[1]];
    const auto& p2 = sp.mesh->vertices[tri[2]];
    const auto& dofs = sp.element_dofs[e];
    for (int q = 0; q < nq; ++q) {
      const auto& l = sp.quad.points[q];
      double x = l[0] * p0[0] + l[1] * p1[0] + l[2] * p2[0];
      double y = l[0] * p0[1] + l[1] * p1[1] + l[2] * p2[1];
      evaluate_on_triangle(coarse, parent, x, y, cval, &cjac);

      fval = {0, 0, 0};
      for (int i = 0; i < sp.dofs_per_element; ++i)
        for (int c = 0; c < 3; ++c)
          fval[c] += sp.basis_val[q][i] * fine.values[3 * dofs[i] + c];
      std::array<std::array<double, 2>, 6> gN;
      for (int i = 0; i < sp.dofs_per_element; ++i) {
        gN[i] = {0, 0};
        for (int a = 0; a < 3; ++a) {
          gN[i][0] += sp.basis_dlam[q][i][a] * sp.grad_lambda[e][a][0];
          gN[i][1] += sp.basis_dlam[q][i][a] * sp.grad_lambda[e][a][1];
        }
      }
      double w = sp.area[e] * sp.quad.weights[q];
      double v2 = 0.0, g2 = 0.0;
      for (int c = 0; c < 3; ++c) {
        double d = cval[c] - fval[c];
        v2 += d * d;
        double gx = -cjac[c][0], gy = -cjac[c][1];
        for (int i = 0; i < sp.dofs_per_element; ++i) {
          gx += gN[i][0] * fine.values[3 * dofs[i] + c];
          gy += gN[i][1] * fine.values[3 * dofs[i] + c];
        }
        g2 += gx * gx + gy * gy;
      }
      l2 += w * v2;
      h1 += w * g2;
    }
  }
  return {std::sqrt(l2), std::sqrt(l2 + h1)};
}

}  // namespace

std::pair<double, double> pair_error(const FieldVec& coarse, const FieldVec& fine,
                                     const RefinementMap& map) {
  if (coarse.space->mesh->domain_tag == Mesh::Domain::Square) {
    FieldVec lifted = prolong(coarse, map, fine.space);
    for (std::size_t i = 0; i < lifted.values.size(); ++i)
      lifted.values[i] -= fine.values[i];
    return {norm(lifted, NormKind::L2), norm(lifted, NormKind::H1)};
  }
  return pair_error_pointwise(coarse, fine, map);
}

RateTable h_rate_study(const SimConfig& config, int levels, RateStudyDiagnostics* diag) {
  if (levels < 3) throw std::invalid_argument("h_rate_study: fewer than 3 levels");
  config.validate();

  const int n_meshes = levels + 1;
  std::vector<std::shared_ptr<const FeSpace>> spaces;
  std::vector<RefinementMap> maps;  // maps[i]: mesh i -> mesh i+1
  {
    auto mesh = std::make_shared<Mesh>(mesh_for(config));
    spaces.push_back(build_space(mesh, config.degree));
    for (int i = 1; i < n_meshes; ++i) {
      auto [fine, map] = refine(*spaces.back()->mesh);
      maps.push_back(std::move(map));
      spaces.push_back(build_space(std::make_shared<Mesh>(std::move(fine)), config.degree));
    }
  }

  std::vector<Stepper> steppers;
  steppers.reserve(n_meshes);
  for (auto& sp : spaces) steppers.emplace_back(sp, config.coeff, config.k, config.solver);

  std::vector<SimState> states;
  states.reserve(n_meshes);
  for (auto& st : steppers) states.push_back(st.init_state(config.m0, config.s0));

  struct Acc {
    double l2_m = 0, h1_m = 0, l2_s = 0, h1_s = 0;
  };
  std::vector<Acc> acc(levels);
  auto update_pairs = [&]() {
    for (int i = 0; i < levels; ++i) {
      auto [el2m, eh1m] = pair_error(states[i].m, states[i + 1].m, maps[i]);
      auto [el2s, eh1s] = pair_error(states[i].s, states[i + 1].s, maps[i]);
      acc[i].l2_m = std::max(acc[i].l2_m, el2m);
      acc[i].h1_m = std::max(acc[i].h1_m, eh1m);
      acc[i].l2_s = std::max(acc[i].l2_s, el2s);
      acc[i].h1_s = std::max(acc[i].h1_s, eh1s);
    }
  };

  RateStudyDiagnostics local_diag;
  RateStudyDiagnostics& d = diag ? *diag : local_diag;
  d.traces.assign(n_meshes, {});
  d.smallness_violated.assign(n_meshes, false);
  d.max_l2_increment_over_bound.assign(n_meshes, 0.0);
  d.stability_sum.assign(n_meshes, 0.0);
  std::vector<double> prev_l2_sq(n_meshes), prev_m_l2(n_meshes), h1_sums(n_meshes, 0.0);

  auto record_trace = [&](int i, int im, int is) {
    TraceRow row;
    row.n = states[i].n;
    row.t = states[i].t;
    row.m_l2 = norm(states[i].m, NormKind::L2);
    row.m_h1 = norm(states[i].m, NormKind::H1);
    row.m_nodal_max = norm(states[i].m, NormKind::NodalMax);
    row.s_l2 = norm(states[i].s, NormKind::L2);
    row.s_h1 = norm(states[i].s, NormKind::H1);
    row.energy = energy(states[i].m, config.coeff).total;
    row.iters_m = im;
    row.iters_s = is;
    d.traces[i].push_back(row);
    if (!steppers[i].smallness_ok(states[i].m)) d.smallness_violated[i] = true;
    double l2_sq = row.m_l2 * row.m_l2 + row.s_l2 * row.s_l2;
    if (states[i].n > 0) {
      h1_sums[i] += config.k * (row.m_h1 * row.m_h1 + row.s_h1 * row.s_h1);
      double jmax = j_max_magnitude(*spaces[i], config.coeff.j, states[i].t);
      if (config.j_off_time && states[i].t >= *config.j_off_time - 1e-15) jmax = 0.0;
      double bound =
          2.0 * config.k * config.coeff.beta_prime * jmax * prev_m_l2[i] * row.s_h1;
      double slack = 1e-9 * (1.0 + prev_l2_sq[i]) + 1e-6 * bound;
      d.max_l2_increment_over_bound[i] = std::max(
          d.max_l2_increment_over_bound[i], (l2_sq - prev_l2_sq[i]) - (bound + slack));
      d.stability_sum[i] = l2_sq + h1_sums[i];
    }
    prev_l2_sq[i] = l2_sq;
    prev_m_l2[i] = row.m_l2;
  };

  for (int i = 0; i < n_meshes; ++i) record_trace(i, 0, 0);
  update_pairs();

  const long N = static_cast<long>(std::floor(config.T / config.k + 1e-12));
  for (long n = 1; n <= N; ++n) {
    bool with_current =
        !(config.j_off_time && states[0].t + config.k >= *config.j_off_time - 1e-15);
    // all levels advance concurrently, then a barrier before the errors
    std::vector<std::future<SimState>> futures;
    futures.reserve(n_meshes);
    for (int i = 0; i < n_meshes; ++i)
      futures.push_back(
          std::async(i == 0 ? std::launch::deferred : std::launch::async,
                     [&, i]() { return steppers[i].step(states[i], with_current); }));
    for (int i = 0; i < n_meshes; ++i) states[i] = futures[i].get();
    for (int i = 0; i < n_meshes; ++i)
      record_trace(i, steppers[i].last_iters_m(), steppers[i].last_iters_s());
    update_pairs();
  }

  RateTable table;
  table.temporal = false;
  for (int i = 0; i < levels; ++i) {
    RateRow row;
    row.param = config.nominal_one_over_h(i);
    row.eL2_m = acc[i].l2_m;
    row.eH1_m = acc[i].h1_m;
    row.eL2_s = acc[i].l2_s;
    row.eH1_s = acc[i].h1_s;
    if (i > 0) {
      row.has_rates = true;
      row.rL2_m = std::log2(acc[i - 1].l2_m / acc[i].l2_m);
      row.rH1_m = std::log2(acc[i - 1].h1_m / acc[i].h1_m);
      row.rL2_s = std::log2(acc[i - 1].l2_s / acc[i].l2_s);
      row.rH1_s = std::log2(acc[i - 1].h1_s / acc[i].h1_s);
    }
    table.rows.push_back(row);
  }
  return table;
}

RateTable k_rate_study(const SimConfig& config, const std::vector<double>& ks,
                       RateStudyDiagnostics* diag) {
  if (ks.size() < 2)
    throw std::invalid_argument("k_rate_study: need at least two time steps");
  for (std::size_t i = 1; i < ks.size(); ++i)
    if (!(ks[i] < ks[i - 1]))
      throw std::invalid_argument("k_rate_study: time steps must be strictly decreasing");
  config.validate();

  // all runs must land exactly on the common final time
  for (double k : ks) {
    double steps = config.T / k;
    if (std::fabs(steps - std::lround(steps)) > 1e-9 * std::max(1.0, steps))
      throw std::invalid_argument("k_rate_study: final times not aligned for k=" +
                                  std::to_string(k));
  }

  auto mesh = std::make_shared<Mesh>(mesh_for(config));
  auto space = build_space(mesh, config.degree);

  std::vector<RunResult> results(ks.size());
  if (diag) {
    diag->traces.clear();
    diag->smallness_violated.clear();
    diag->max_l2_increment_over_bound.clear();
    diag->stability_sum.clear();
  }
  for (std::size_t i = 0; i < ks.size(); ++i) {
    SimConfig c = config;
    c.k = ks[i];
    results[i] = run(c, space);
    if (diag) {
      diag->traces.push_back(results[i].trace);
      diag->smallness_violated.push_back(results[i].smallness_violated);
      diag->max_l2_increment_over_bound.push_back(results[i].max_l2_increment_over_bound);
      diag->stability_sum.push_back(results[i].stability_sum);
    }
  }

  const SimState& ref = results.back().final_state;
  const double k_ref = ks.back();
  RateTable table;
  table.temporal = true;
  std::vector<RateRow> rows;
  for (std::size_t i = 0; i + 1 < ks.size(); ++i) {
    FieldVec dm = results[i].final_state.m;
    FieldVec ds = results[i].final_state.s;
    for (std::size_t v = 0; v < dm.values.size(); ++v) {
      dm.values[v] -= ref.m.values[v];
      ds.values[v] -= ref.s.values[v];
    }
    RateRow row;
    row.param = ks[i];
    row.eL2_m = norm(dm, NormKind::L2);
    row.eH1_m = norm(dm, NormKind::H1);
    row.eL2_s = norm(ds, NormKind::L2);
    row.eH1_s = norm(ds, NormKind::H1);
    rows.push_back(row);
  }
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (i > 0) {
      // effective-step abscissa: error ~ C (k - k_ref) for a first-order
      // scheme measured against the k_ref run
      double dk = std::log((rows[i - 1].param - k_ref) / (rows[i].param - k_ref));
      rows[i].has_rates = true;
      rows[i].rL2_m = std::log(rows[i - 1].eL2_m / rows[i].eL2_m) / dk;
      rows[i].rH1_m = std::log(rows[i - 1].eH1_m / rows[i].eH1_m) / dk;
      rows[i].rL2_s = std::log(rows[i - 1].eL2_s / rows[i].eL2_s) / dk;
      rows[i].rH1_s = std::log(rows[i - 1].eH1_s / rows[i].eH1_s) / dk;
    }
    table.rows.push_back(rows[i]);
  }
  return table;
}

DecayReport decay_report(const std::vector<TraceRow>& trace, const Coefficients& coeff,
                         double k, bool unit_preset, std::optional<double> j_off_time,
                         double slack) {
  if (trace.empty()) throw std::invalid_argument("decay_report: empty trace");
  DecayReport rep;
  rep.mu_nonneg = coeff.mu >= 0.0;
  const double m0_sq = trace.front().m_l2 * trace.front().m_l2;

  double h1_sum = 0.0;
  for (std::size_t i = 0; i < trace.size(); ++i) {
    const TraceRow& row = trace[i];
    if (i > 0) {
      const TraceRow& prev = trace[i - 1];
      if (rep.mu_nonneg && row.m_l2 > prev.m_l2 * (1.0 + slack)) {
        rep.m_l2_monotone = false;
        rep.violations++;
      }
      h1_sum += k * (row.m_h1 * row.m_h1 + row.s_h1 * row.s_h1) *
                (row.n - prev.n);  // trace_every-aware
    }
    if (unit_preset) {
      rep.unit_checked = true;
      double bound = std::pow(1.0 + 2.0 * k, -row.n) * m0_sq * (1.0 + 1e-8);
      if (row.m_l2 * row.m_l2 > bound) {
        rep.unit_bound_ok = false;
        rep.violations++;
      }
    }
    if (!std::isfinite(row.m_l2) || !std::isfinite(row.s_l2) || !std::isfinite(row.m_h1) ||
        !std::isfinite(row.s_h1))
      rep.stability_finite = false;
  }
  rep.stability_sum = trace.back().m_l2 * trace.back().m_l2 +
                      trace.back().s_l2 * trace.back().s_l2 + h1_sum;
  if (!std::isfinite(rep.stability_sum)) rep.stability_finite = false;

  if (j_off_time) {
    rep.s_checked = true;
    for (std::size_t i = 1; i < trace.size(); ++i) {
      if (trace[i - 1].t >= *j_off_time &&
          trace[i].s_l2 > trace[i - 1].s_l2 * (1.0 + slack)) {
        rep.s_monotone_after_j_off = false;
        rep.violations++;
      }
    }
  }
  return rep;
}

}  // namespace sdllb
