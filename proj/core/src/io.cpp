#include "sdllb/io.hpp"

#include <cstdio>
#include <fstream>

#include "sdllb/errors.hpp"

namespace sdllb {

std::string format_g17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string csv_quote(const std::string& field) {
  if (field.find_first_of(",\"\r\n") == std::string::npos) return field;
  std::string out = "\"";
  for (char c : field) {
    if (c == '"') out += '"';
    out += c;
  }
  out += '"';
  return out;
}

void write_vtk(const Mesh& mesh,
               const std::vector<std::pair<std::string, const FieldVec*>>& fields,
               const std::string& path) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot open " + path + " for writing");
  out << "# vtk DataFile Version 2.0\n";
  out << "sdllb fields\n";
  out << "ASCII\n";
  out << "DATASET UNSTRUCTURED_GRID\n";
  out << "POINTS " << mesh.vertex_count() << " double\n";
  for (const auto& v : mesh.vertices)
    out << format_g17(v[0]) << ' ' << format_g17(v[1]) << " 0\n";
  out << "CELLS " << mesh.triangle_count() << ' ' << 4 * mesh.triangle_count() << '\n';
  for (const auto& t : mesh.triangles) out << "3 " << t[0] << ' ' << t[1] << ' ' << t[2] << '\n';
  out << "CELL_TYPES " << mesh.triangle_count() << '\n';
  for (int i = 0; i < mesh.triangle_count(); ++i) out << "5\n";
  if (!fields.empty()) {
    out << "POINT_DATA " << mesh.vertex_count() << '\n';
    for (const auto& [name, field] : fields) {
      if (!field || static_cast<int>(field->values.size()) < 3 * mesh.vertex_count())
        throw IoError("write_vtk: field '" + name + "' too short for the mesh");
      out << "VECTORS " << name << " double\n";
      // vertex DOFs come first in the numbering, so this also samples
      // degree-2 fields at the vertices
      for (int i = 0; i < mesh.vertex_count(); ++i) {
        out << format_g17(field->values[3 * i + 0]) << ' '
            << format_g17(field->values[3 * i + 1]) << ' '
            << format_g17(field->values[3 * i + 2]) << '\n';
      }
    }
  }
  if (!out) throw IoError("write failed: " + path);
}

void write_trace_csv(const std::vector<TraceRow>& trace, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot open " + path + " for writing");
  out << "n,t,m_l2,m_h1,m_nodal_max,s_l2,s_h1,energy,iters_m,iters_s\n";
  for (const auto& r : trace) {
    out << r.n << ',' << format_g17(r.t) << ',' << format_g17(r.m_l2) << ','
        << format_g17(r.m_h1) << ',' << format_g17(r.m_nodal_max) << ','
        << format_g17(r.s_l2) << ',' << format_g17(r.s_h1) << ','
        << format_g17(r.energy) << ',' << r.iters_m << ',' << r.iters_s << '\n';
  }
  if (!out) throw IoError("write failed: " + path);
}

void write_rates_csv(const RateTable& table, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot open " + path + " for writing");
  out << (table.temporal ? "k" : "one_over_h")
      << ",eL2_m,eH1_m,eL2_s,eH1_s,rateL2_m,rateH1_m,rateL2_s,rateH1_s\n";
  for (const auto& r : table.rows) {
    out << format_g17(r.param) << ',' << format_g17(r.eL2_m) << ',' << format_g17(r.eH1_m)
        << ',' << format_g17(r.eL2_s) << ',' << format_g17(r.eH1_s) << ',';
    if (r.has_rates) {
      out << format_g17(r.rL2_m) << ',' << format_g17(r.rH1_m) << ','
          << format_g17(r.rL2_s) << ',' << format_g17(r.rH1_s) << '\n';
    } else {
      out << ",,,\n";
    }
  }
  if (!out) throw IoError("write failed: " + path);
}

}  // namespace sdllb
