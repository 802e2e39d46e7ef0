#pragma once

#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "sdllb/forms.hpp"
#include "sdllb/mesh.hpp"

namespace sdllb {

struct SolverConfig {
  double tol = 1e-10;
  int maxiter = 0;  // 0 -> 10 * n
};

/// Full problem description. Square meshes are addressed by a nominal
/// 1/h = base_one_over_h * 2^level (n = 2/h grid cells per side on
/// [-1,1]^2); disk meshes by the hexagon-fan refinement level.
struct SimConfig {
  Mesh::Domain domain = Mesh::Domain::Square;
  bool domain_set = false;
  int degree = 1;
  int level = 0;
  int base_one_over_h = 8;
  double k = 0.0;
  double T = 0.0;
  Coefficients coeff;
  VectorExpr m0, s0;
  bool m0_set = false, s0_set = false;
  int trace_every = 1;
  std::vector<double> snapshot_times;
  SolverConfig solver;
  std::optional<double> j_off_time;  // current switched off for t >= this
  std::string preset;                // resolved preset name, empty if none

  /// Throws ConfigError when required fields are missing or invalid.
  void validate() const;

  int nominal_one_over_h(int extra_levels = 0) const;
};

/// Parses a JSON config file. Unknown keys are rejected with their key
/// path; presets fill defaults first, explicit keys override.
SimConfig load_config(const std::string& path);
SimConfig config_from_json_text(const std::string& text, const std::string& origin);

/// Names: sim1, sim2, sim3, unit, sim1_desk, sim2_desk, sim3_desk.
void apply_preset(SimConfig& config, const std::string& name);

/// Builds the configured mesh, refined extra_levels beyond config.level.
Mesh mesh_for(const SimConfig& config, int extra_levels = 0);

}  // namespace sdllb
