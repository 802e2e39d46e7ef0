// Command line front end: run a simulation, run convergence studies, or
// dump a mesh. Exit codes: 0 ok, 2 config error, 3 solver failure, 4 I/O.

#include <cstdio>
#include <exception>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "sdllb/config.hpp"
#include "sdllb/errors.hpp"
#include "sdllb/runner.hpp"

namespace {

std::vector<double> parse_k_list(const std::string& csv) {
  std::vector<double> ks;
  std::stringstream ss(csv);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      ks.push_back(std::stod(item));
    } catch (const std::exception&) {
      throw sdllb::ConfigError("--ks", "cannot parse time step '" + item + "'");
    }
  }
  if (ks.empty()) throw sdllb::ConfigError("--ks", "empty time-step list");
  return ks;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Finite element solver for the spin-diffusion Landau-Lifshitz-Bloch system"};
  app.require_subcommand(1);

  std::string config_path, outdir, ks_csv, domain = "disk", mesh_out;
  int levels = 3, level = 3;

  CLI::App* run_cmd = app.add_subcommand("run", "time-step a configuration");
  run_cmd->add_option("--config", config_path, "JSON config file")->required();
  run_cmd->add_option("--out", outdir, "output directory")->required();

  CLI::App* conv_cmd = app.add_subcommand("convergence", "spatial convergence study");
  conv_cmd->add_option("--config", config_path, "JSON config file")->required();
  conv_cmd->add_option("--levels", levels, "number of mesh pairs (>= 3)")->required();
  conv_cmd->add_option("--out", outdir, "output directory")->required();

  CLI::App* krate_cmd = app.add_subcommand("krate", "temporal self-convergence study");
  krate_cmd->add_option("--config", config_path, "JSON config file")->required();
  krate_cmd->add_option("--ks", ks_csv, "comma-separated decreasing time steps")->required();
  krate_cmd->add_option("--out", outdir, "output directory")->required();

  CLI::App* mesh_cmd = app.add_subcommand("mesh", "write a mesh as legacy VTK");
  mesh_cmd->add_option("--domain", domain, "square or disk")->required();
  mesh_cmd->add_option("--level", level, "refinement level")->required();
  mesh_cmd->add_option("--out", mesh_out, "output .vtk path")->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (*run_cmd) {
      sdllb::cmd_run(sdllb::load_config(config_path), outdir);
    } else if (*conv_cmd) {
      sdllb::cmd_convergence(sdllb::load_config(config_path), levels, outdir);
    } else if (*krate_cmd) {
      sdllb::cmd_krate(sdllb::load_config(config_path), parse_k_list(ks_csv), outdir);
    } else if (*mesh_cmd) {
      sdllb::Mesh::Domain d;
      if (domain == "square") d = sdllb::Mesh::Domain::Square;
      else if (domain == "disk") d = sdllb::Mesh::Domain::Disk;
      else throw sdllb::ConfigError("--domain", "expected square or disk");
      sdllb::cmd_mesh(d, level, mesh_out);
    }
  } catch (const sdllb::ConfigError& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return 2;
  } catch (const sdllb::ExprParseError& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return 2;
  } catch (const sdllb::SolverError& e) {
    std::fprintf(stderr, "solver failure: %s (residual %.3e)\n", e.what(), e.residual());
    return 3;
  } catch (const sdllb::IoError& e) {
    std::fprintf(stderr, "i/o error: %s\n", e.what());
    return 4;
  } catch (const std::filesystem::filesystem_error& e) {
    std::fprintf(stderr, "i/o error: %s\n", e.what());
    return 4;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
  return 0;
}
