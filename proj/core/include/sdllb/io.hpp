#pragma once

#include <string>
#include <utility>
#include <vector>

#include "sdllb/analyze.hpp"
#include "sdllb/fem.hpp"
#include "sdllb/mesh.hpp"
#include "sdllb/stepper.hpp"

namespace sdllb {

/// Legacy VTK 2.0 ASCII, DATASET UNSTRUCTURED_GRID, points at z = 0,
/// triangle cells (type 5), one VECTORS record per field. Degree-2 fields
/// are sampled at the vertices. Values printed with %.17g.
void write_vtk(const Mesh& mesh,
               const std::vector<std::pair<std::string, const FieldVec*>>& fields,
               const std::string& path);

/// RFC-4180 CSV, '.' decimal separator, %.17g numbers.
void write_trace_csv(const std::vector<TraceRow>& trace, const std::string& path);
void write_rates_csv(const RateTable& table, const std::string& path);

std::string format_g17(double v);
std::string csv_quote(const std::string& field);

}  // namespace sdllb
