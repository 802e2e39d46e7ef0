#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "sdllb/config.hpp"

namespace sdllb {

inline constexpr const char* kVersion = "0.1.0";

struct RunOutputs {
  std::filesystem::path trace_csv;
  std::vector<std::filesystem::path> snapshot_vtks;
  std::filesystem::path rates_csv;
  std::filesystem::path manifest;
};

/// Executes the time loop and writes trace.csv, VTK snapshots and
/// run_manifest.json under outdir. The manifest is written even on
/// failure, with the error recorded.
RunOutputs cmd_run(const SimConfig& config, const std::filesystem::path& outdir);

/// Spatial convergence study: rates.csv with one row per mesh pair.
RunOutputs cmd_convergence(const SimConfig& config, int levels,
                           const std::filesystem::path& outdir);

/// Temporal self-convergence study over the given time steps.
RunOutputs cmd_krate(const SimConfig& config, const std::vector<double>& ks,
                     const std::filesystem::path& outdir);

/// Writes the bare mesh as a VTK file.
void cmd_mesh(Mesh::Domain domain, int level, const std::filesystem::path& path);

}  // namespace sdllb
