#include "sdllb/config.hpp"

#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

#include "sdllb/errors.hpp"

namespace sdllb {

using nlohmann::json;

void SimConfig::validate() const {
  if (!domain_set) throw ConfigError("domain", "domain required (no default preset)");
  if (degree != 1 && degree != 2) throw ConfigError("degree", "degree must be 1 or 2");
  if (level < 0) throw ConfigError("level", "level must be >= 0");
  if (base_one_over_h < 1) throw ConfigError("base_one_over_h", "must be >= 1");
  if (!(k > 0.0)) throw ConfigError("k", "time step must be positive");
  if (!(T >= 0.0)) throw ConfigError("T", "horizon must be nonnegative");
  if (trace_every < 1) throw ConfigError("trace_every", "must be >= 1");
  if (!(solver.tol > 0.0)) throw ConfigError("solver.tol", "must be positive");
  if (!m0_set) throw ConfigError("m0", "initial magnetisation required");
  if (!s0_set) throw ConfigError("s0", "initial spin accumulation required");
  coeff.validate();
  if (!coeff.j.components[0] || !coeff.j.components[1])
    throw ConfigError("coefficients.j", "current density required");
}

int SimConfig::nominal_one_over_h(int extra_levels) const {
  if (domain == Mesh::Domain::Square)
    return base_one_over_h * (1 << (level + extra_levels));
  return 1 << (level + extra_levels);
}

Mesh mesh_for(const SimConfig& config, int extra_levels) {
  if (config.domain == Mesh::Domain::Square) {
    // nominal 1/h counts grid cells per unit length on [-1,1]^2
    int n = 2 * config.nominal_one_over_h(extra_levels);
    return unit_square_mesh(n);
  }
  return unit_disk_mesh(config.level + extra_levels);
}

namespace {

ExprAst parse_coeff_expr(const json& v, const std::string& path) {
  try {
    if (v.is_number()) return make_constant(v.get<double>());
    if (v.is_string()) return parse(v.get<std::string>());
  } catch (const ExprParseError& e) {
    throw ConfigError(path, e.what());
  }
  throw ConfigError(path, "expected number or expression string");
}

VectorExpr parse_vector_json(const json& v, const std::string& path, int expected) {
  if (!v.is_array() || static_cast<int>(v.size()) != expected)
    throw ConfigError(path, "expected array of " + std::to_string(expected) +
                                " expression strings");
  VectorExpr out = zero_vector_expr();
  for (int i = 0; i < expected; ++i)
    out.components[i] = parse_coeff_expr(v[i], path + "[" + std::to_string(i) + "]");
  return out;
}

void reject_unknown(const json& obj, const std::set<std::string>& known,
                    const std::string& prefix) {
  for (auto it = obj.begin(); it != obj.end(); ++it) {
    if (!known.count(it.key()))
      throw ConfigError(prefix.empty() ? it.key() : prefix + "." + it.key(),
                        "unknown key");
  }
}

double require_number(const json& v, const std::string& path) {
  if (!v.is_number()) throw ConfigError(path, "expected number");
  return v.get<double>();
}

struct PresetMaterial {
  double gamma, alpha, gamma_prime, alpha_prime, kappa, mu, tau_sf, tau_j, beta, beta_prime;
  const char* d0;
  const char* j0;
  const char* j1;
};

void apply_material(SimConfig& c, const PresetMaterial& m) {
  c.coeff.gamma = m.gamma;
  c.coeff.alpha = m.alpha;
  c.coeff.gamma_prime = m.gamma_prime;
  c.coeff.alpha_prime = m.alpha_prime;
  c.coeff.kappa = m.kappa;
  c.coeff.mu = m.mu;
  c.coeff.tau_sf = m.tau_sf;
  c.coeff.tau_j = m.tau_j;
  c.coeff.beta = m.beta;
  c.coeff.beta_prime = m.beta_prime;
  c.coeff.D0 = parse(m.d0);
  c.coeff.j = VectorExpr{{parse(m.j0), parse(m.j1), make_constant(0.0)}};
}

void desk_scale(SimConfig& c) {
  // cap the horizon at 500 steps of the preset's time step
  c.T = std::min(c.T, 500.0 * c.k);
  std::vector<double> kept;
  for (double t : c.snapshot_times)
    if (t <= c.T * (1.0 + 1e-12)) kept.push_back(t);
  c.snapshot_times = kept;
}

}  // namespace

void apply_preset(SimConfig& c, const std::string& name) {
  const PresetMaterial hot = {2.3e6, 1.0e5, 3.0e-3, 1.0e-6, 1.0e-9, 1.0e4,
                              1.0e-7, 5.0e-8, 0.1, 1.0e-5, "1.0e-2", "0", "0"};
  const std::vector<double> snaps_12 = {0.0, 2.5e-7, 1.0e-6, 2.0e-6, 2.5e-6, 4.0e-6, 5.0e-6};

  std::string base = name;
  bool desk = false;
  if (base.size() > 5 && base.ends_with("_desk")) {
    desk = true;
    base = base.substr(0, base.size() - 5);
  }

  if (base == "sim1") {
    apply_material(c, hot);
    c.coeff.j = VectorExpr{{parse("0"), parse("2.0e8"), make_constant(0.0)}};
    c.domain = Mesh::Domain::Disk;
    c.domain_set = true;
    c.level = 3;
    c.degree = 1;
    c.k = 1.0e-7;
    c.T = 5.0e-6;
    c.m0 = parse_vector({"-0.1*y", "0.1*x", "0.1*(1-x^2-y^2)"});
    c.s0 = parse_vector({"0.1*y", "-0.1*x", "-0.1*(1-x^2-y^2)"});
    c.m0_set = c.s0_set = true;
    c.snapshot_times = snaps_12;
  } else if (base == "sim2") {
    apply_material(c, hot);
    c.coeff.j = VectorExpr{{parse("0"), parse("1.0e7"), make_constant(0.0)}};
    c.domain = Mesh::Domain::Square;
    c.domain_set = true;
    c.level = 0;
    c.base_one_over_h = 8;
    c.degree = 1;
    c.k = 1.0e-9;
    c.T = 5.0e-6;
    c.m0 = parse_vector({"-0.1*y", "0.1*x", "0.1*sin(2*pi*x)"});
    c.s0 = parse_vector({"0.1*x", "-0.1*y", "0.1*x*y"});
    c.m0_set = c.s0_set = true;
    c.snapshot_times = snaps_12;
  } else if (base == "sim3") {
    const PresetMaterial cold = {2.0e6, 2.0e5, 1.0e-3, 1.2e-6, 1.0e-9, -1.0e4,
                                 2.0e-7, 1.0e-7, 0.2, 1.0e-5, "2.0e-2", "1.0e6", "0"};
    apply_material(c, cold);
    c.domain = Mesh::Domain::Square;
    c.domain_set = true;
    c.level = 0;
    c.base_one_over_h = 8;
    c.degree = 1;
    c.k = 1.0e-9;
    c.T = 5.0e-6;
    c.m0 = parse_vector({"0.2*sin(2*pi*y)", "0.2*sin(2*pi*x)", "0.05"});
    c.s0 = parse_vector({"0.1*cos(2*pi*x)", "-0.1*cos(pi*x)", "0.1*x*y"});
    c.m0_set = c.s0_set = true;
    c.snapshot_times = {0.0, 1.0e-7, 2.5e-7, 5.0e-7, 1.0e-6, 2.5e-6, 5.0e-6};
  } else if (base == "unit") {
    c.coeff = unit_coefficients();
  } else {
    throw ConfigError("preset", "unknown preset '" + name + "'");
  }
  if (desk) desk_scale(c);
  c.preset = name;
}

SimConfig config_from_json_text(const std::string& text, const std::string& origin) {
  json root;
  try {
    root = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigError(origin, std::string("JSON parse error: ") + e.what());
  }
  if (!root.is_object()) throw ConfigError(origin, "config must be a JSON object");

  reject_unknown(root,
                 {"preset", "domain", "degree", "level", "base_one_over_h", "k", "T",
                  "coefficients", "m0", "s0", "trace_every", "snapshot_times", "solver",
                  "j_off_time"},
                 "");

  SimConfig c;
  if (root.contains("preset")) {
    if (!root["preset"].is_string()) throw ConfigError("preset", "expected string");
    apply_preset(c, root["preset"].get<std::string>());
  }
  if (root.contains("domain")) {
    std::string d = root["domain"].is_string() ? root["domain"].get<std::string>() : "";
    if (d == "square") c.domain = Mesh::Domain::Square;
    else if (d == "disk") c.domain = Mesh::Domain::Disk;
    else throw ConfigError("domain", "expected \"square\" or \"disk\"");
    c.domain_set = true;
  }
  if (root.contains("degree")) c.degree = static_cast<int>(require_number(root["degree"], "degree"));
  if (root.contains("level")) c.level = static_cast<int>(require_number(root["level"], "level"));
  if (root.contains("base_one_over_h"))
    c.base_one_over_h = static_cast<int>(require_number(root["base_one_over_h"], "base_one_over_h"));
  if (root.contains("k")) c.k = require_number(root["k"], "k");
  if (root.contains("T")) c.T = require_number(root["T"], "T");
  if (root.contains("trace_every"))
    c.trace_every = static_cast<int>(require_number(root["trace_every"], "trace_every"));
  if (root.contains("j_off_time")) c.j_off_time = require_number(root["j_off_time"], "j_off_time");
  if (root.contains("snapshot_times")) {
    if (!root["snapshot_times"].is_array())
      throw ConfigError("snapshot_times", "expected array of times");
    c.snapshot_times.clear();
    for (std::size_t i = 0; i < root["snapshot_times"].size(); ++i)
      c.snapshot_times.push_back(require_number(root["snapshot_times"][i],
                                                "snapshot_times[" + std::to_string(i) + "]"));
  }
  if (root.contains("solver")) {
    const json& s = root["solver"];
    if (!s.is_object()) throw ConfigError("solver", "expected object");
    reject_unknown(s, {"tol", "maxiter"}, "solver");
    if (s.contains("tol")) c.solver.tol = require_number(s["tol"], "solver.tol");
    if (s.contains("maxiter"))
      c.solver.maxiter = static_cast<int>(require_number(s["maxiter"], "solver.maxiter"));
  }
  if (root.contains("coefficients")) {
    const json& co = root["coefficients"];
    if (!co.is_object()) throw ConfigError("coefficients", "expected object");
    reject_unknown(co,
                   {"gamma", "alpha", "gamma_prime", "alpha_prime", "kappa", "mu",
                    "tau_sf", "tau_j", "beta", "beta_prime", "D0", "j"},
                   "coefficients");
    auto num = [&](const char* key, double& target) {
      if (co.contains(key)) target = require_number(co[key], std::string("coefficients.") + key);
    };
    num("gamma", c.coeff.gamma);
    num("alpha", c.coeff.alpha);
    num("gamma_prime", c.coeff.gamma_prime);
    num("alpha_prime", c.coeff.alpha_prime);
    num("kappa", c.coeff.kappa);
    num("mu", c.coeff.mu);
    num("tau_sf", c.coeff.tau_sf);
    num("tau_j", c.coeff.tau_j);
    num("beta", c.coeff.beta);
    num("beta_prime", c.coeff.beta_prime);
    if (co.contains("D0")) c.coeff.D0 = parse_coeff_expr(co["D0"], "coefficients.D0");
    if (co.contains("j")) {
      VectorExpr j = parse_vector_json(co["j"], "coefficients.j", 2);
      j.components[2] = make_constant(0.0);
      c.coeff.j = j;
    }
  }
  if (root.contains("m0")) {
    c.m0 = parse_vector_json(root["m0"], "m0", 3);
    c.m0_set = true;
  }
  if (root.contains("s0")) {
    c.s0 = parse_vector_json(root["s0"], "s0", 3);
    c.s0_set = true;
  }
  c.validate();
  return c;
}

SimConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError(path, "cannot open config file");
  std::stringstream ss;
  ss << in.rdbuf();
  return config_from_json_text(ss.str(), path);
}

}  // namespace sdllb
