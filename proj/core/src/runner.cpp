#include "sdllb/runner.hpp"

#include <chrono>
#include <cstdio>
#include <fstream>

#include <json.hpp>

#include "sdllb/analyze.hpp"
#include "sdllb/errors.hpp"
#include "sdllb/io.hpp"
#include "sdllb/stepper.hpp"

namespace sdllb {

using nlohmann::json;

namespace {

json config_to_json(const SimConfig& c) {
  json j;
  if (!c.preset.empty()) j["preset"] = c.preset;
  j["domain"] = c.domain == Mesh::Domain::Square ? "square" : "disk";
  j["degree"] = c.degree;
  j["level"] = c.level;
  j["base_one_over_h"] = c.base_one_over_h;
  j["k"] = c.k;
  j["T"] = c.T;
  j["trace_every"] = c.trace_every;
  j["snapshot_times"] = c.snapshot_times;
  j["solver"] = {{"tol", c.solver.tol}, {"maxiter", c.solver.maxiter}};
  if (c.j_off_time) j["j_off_time"] = *c.j_off_time;
  json co;
  co["gamma"] = c.coeff.gamma;
  co["alpha"] = c.coeff.alpha;
  co["gamma_prime"] = c.coeff.gamma_prime;
  co["alpha_prime"] = c.coeff.alpha_prime;
  co["kappa"] = c.coeff.kappa;
  co["mu"] = c.coeff.mu;
  co["tau_sf"] = c.coeff.tau_sf;
  co["tau_j"] = c.coeff.tau_j;
  co["beta"] = c.coeff.beta;
  co["beta_prime"] = c.coeff.beta_prime;
  if (c.coeff.D0) co["D0"] = to_string(c.coeff.D0);
  if (c.coeff.j.components[0] && c.coeff.j.components[1])
    co["j"] = {to_string(c.coeff.j.components[0]), to_string(c.coeff.j.components[1])};
  j["coefficients"] = co;
  auto vec3 = [](const VectorExpr& v) {
    return json{to_string(v.components[0]), to_string(v.components[1]),
                to_string(v.components[2])};
  };
  if (c.m0_set) j["m0"] = vec3(c.m0);
  if (c.s0_set) j["s0"] = vec3(c.s0);
  return j;
}

class ManifestWriter {
 public:
  ManifestWriter(const SimConfig& config, std::string command,
                 std::filesystem::path outdir)
      : outdir_(std::move(outdir)), start_(std::chrono::steady_clock::now()) {
    body_["version"] = kVersion;
    body_["command"] = std::move(command);
    body_["config"] = config_to_json(config);
    body_["mesh_mapping"] =
        config.domain == Mesh::Domain::Square
            ? "square: level l -> nominal 1/h = base_one_over_h * 2^l, grid n = 2/h"
            : "disk: level l -> hexagon fan refined l times, nominal 1/h = 2^l";
    body_["nominal_one_over_h"] = config.nominal_one_over_h();
  }

  json& body() { return body_; }

  std::filesystem::path finish(const std::string& status, const std::string& error = "") {
    body_["status"] = status;
    if (!error.empty()) body_["error"] = error;
    auto elapsed = std::chrono::duration<double>(std::chrono::steady_clock::now() - start_);
    body_["wall_time_s"] = elapsed.count();
    std::filesystem::path path = outdir_ / "run_manifest.json";
    std::ofstream out(path);
    out << body_.dump(2) << '\n';
    return path;
  }

 private:
  std::filesystem::path outdir_;
  std::chrono::steady_clock::time_point start_;
  json body_;
};

}  // namespace

RunOutputs cmd_run(const SimConfig& config, const std::filesystem::path& outdir) {
  std::filesystem::create_directories(outdir);
  ManifestWriter manifest(config, "run", outdir);
  RunOutputs outputs;
  try {
    auto mesh = std::make_shared<Mesh>(mesh_for(config));
    auto space = build_space(mesh, config.degree);
    RunResult result = run(config, space);

    outputs.trace_csv = outdir / "trace.csv";
    write_trace_csv(result.trace, outputs.trace_csv.string());

    json snaps = json::array();
    for (std::size_t i = 0; i < result.snapshots.size(); ++i) {
      char name[64];
      std::snprintf(name, sizeof name, "snapshot_%04zu.vtk", i);
      std::filesystem::path p = outdir / name;
      write_vtk(*mesh, {{"m", &result.snapshots[i].m}, {"s", &result.snapshots[i].s}},
                p.string());
      outputs.snapshot_vtks.push_back(p);
      snaps.push_back({{"file", name}, {"n", result.snapshots[i].n}, {"t", result.snapshots[i].t}});
    }
    manifest.body()["snapshots"] = snaps;
    manifest.body()["steps"] = result.final_state.n;
    manifest.body()["smallness_violated"] = result.smallness_violated;
    manifest.body()["stability_sum"] = result.stability_sum;

    DecayReport decay = decay_report(result.trace, config.coeff, config.k,
                                     config.preset.starts_with("unit"), config.j_off_time);
    manifest.body()["decay"] = {{"mu_nonneg", decay.mu_nonneg},
                                {"m_l2_monotone", decay.m_l2_monotone},
                                {"unit_bound_ok", !decay.unit_checked || decay.unit_bound_ok},
                                {"stability_finite", decay.stability_finite},
                                {"violations", decay.violations}};
    outputs.manifest = manifest.finish("ok");
    return outputs;
  } catch (const std::exception& e) {
    outputs.manifest = manifest.finish("failed", e.what());
    throw;
  }
}

RunOutputs cmd_convergence(const SimConfig& config, int levels,
                           const std::filesystem::path& outdir) {
  std::filesystem::create_directories(outdir);
  ManifestWriter manifest(config, "convergence", outdir);
  RunOutputs outputs;
  try {
    SimConfig c = config;
    c.trace_every = 1;  // max_n samples every step
    RateTable table = h_rate_study(c, levels);
    outputs.rates_csv = outdir / "rates.csv";
    write_rates_csv(table, outputs.rates_csv.string());
    manifest.body()["levels"] = levels;
    outputs.manifest = manifest.finish("ok");
    return outputs;
  } catch (const std::exception& e) {
    outputs.manifest = manifest.finish("failed", e.what());
    throw;
  }
}

RunOutputs cmd_krate(const SimConfig& config, const std::vector<double>& ks,
                     const std::filesystem::path& outdir) {
  std::filesystem::create_directories(outdir);
  ManifestWriter manifest(config, "krate", outdir);
  RunOutputs outputs;
  try {
    RateTable table = k_rate_study(config, ks);
    outputs.rates_csv = outdir / "rates.csv";
    write_rates_csv(table, outputs.rates_csv.string());
    manifest.body()["ks"] = ks;
    outputs.manifest = manifest.finish("ok");
    return outputs;
  } catch (const std::exception& e) {
    outputs.manifest = manifest.finish("failed", e.what());
    throw;
  }
}

void cmd_mesh(Mesh::Domain domain, int level, const std::filesystem::path& path) {
  Mesh mesh = domain == Mesh::Domain::Square
                  ? unit_square_mesh(2 * 8 * (1 << level))
                  : unit_disk_mesh(level);
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  write_vtk(mesh, {}, path.string());
}

}  // namespace sdllb
