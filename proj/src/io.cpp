#include "slipflow/io.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "slipflow/errors.hpp"

namespace slipflow {

namespace {

// VTK_BIQUADRATIC_QUAD lists corners, edge midpoints, then the center.
constexpr int kVtkQuad[9] = {0, 2, 8, 6, 1, 5, 7, 3, 4};
constexpr int kVtkEdge[3] = {0, 2, 1};

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string field_name(const Field& f, const char* fallback) {
  std::string n = f.name.empty() ? fallback : f.name;
  for (char& ch : n)
    if (ch == ' ') ch = '_';
  return n;
}

Vec2 local_ref(int dim, int k) {
  if (dim == 1) return Vec2(0.5 * k, 0.0);
  return Vec2(0.5 * (k % 3), 0.5 * (k / 3));
}

// Evaluates f at every mesh node through the cells containing it.
template <class Eval>
std::vector<double> nodal(const Mesh& mesh, Eval&& eval) {
  std::vector<double> out(mesh.num_nodes(), 0.0);
  std::vector<char> done(mesh.num_nodes(), 0);
  for (std::size_t c = 0; c < mesh.num_cells(); ++c) {
    const auto cell = mesh.cell(static_cast<int>(c));
    for (int k = 0; k < mesh.nodes_per_cell(); ++k) {
      if (done[cell[k]]) continue;
      out[cell[k]] = eval(static_cast<int>(c), local_ref(mesh.dim(), k));
      done[cell[k]] = 1;
    }
  }
  return out;
}

void write_file(const std::string& path, const std::string& text) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw Error("cannot open '" + path + "' for writing");
  f << text;
  if (!f) throw Error("write to '" + path + "' failed");
}

}  // namespace

std::string vtk_text(const std::vector<VtkEntry>& fields, const std::string& title) {
  for (const VtkEntry& e : fields)
    if (!e.field || !e.field->space) throw ContractViolation("vtk_text: entry without a field");
  if (fields.empty()) throw ContractViolation("vtk_text needs at least one field");
  const Mesh& mesh = fields.front().field->space->mesh();
  for (const VtkEntry& e : fields)
    if (&e.field->space->mesh() != &mesh) throw ContractViolation("vtk_text: fields live on different meshes");
  const int per = mesh.nodes_per_cell();
  std::ostringstream os;
  os << "# vtk DataFile Version 3.0\n" << title << "\nASCII\nDATASET UNSTRUCTURED_GRID\n";
  os << "POINTS " << mesh.num_nodes() << " double\n";
  for (const Vec2& x : mesh.nodes()) os << num(x.x()) << ' ' << num(x.y()) << " 0\n";
  os << "CELLS " << mesh.num_cells() << ' ' << mesh.num_cells() * (per + 1) << '\n';
  for (std::size_t c = 0; c < mesh.num_cells(); ++c) {
    const auto cell = mesh.cell(static_cast<int>(c));
    os << per;
    for (int k = 0; k < per; ++k) os << ' ' << cell[mesh.dim() == 1 ? kVtkEdge[k] : kVtkQuad[k]];
    os << '\n';
  }
  os << "CELL_TYPES " << mesh.num_cells() << '\n';
  for (std::size_t c = 0; c < mesh.num_cells(); ++c) os << (mesh.dim() == 1 ? 21 : 28) << '\n';
  os << "POINT_DATA " << mesh.num_nodes() << '\n';
  for (const VtkEntry& e : fields) {
    const Field* f = e.field;
    const Space& s = *f->space;
    if (s.has_velocity() && (e.velocity || !s.has_pressure())) {
      os << "VECTORS " << field_name(*f, "velocity") << " double\n";
      for (int i = 0; i < s.num_nodes(); ++i) {
        const Vec2 u = nodal_velocity(*f, i);
        os << num(u.x()) << ' ' << num(u.y()) << " 0\n";
      }
    }
    if ((s.has_pressure() && e.pressure) || !s.has_velocity()) {
      std::vector<double> v;
      if (s.has_pressure())
        v = nodal(mesh, [&](int c, const Vec2& ref) { return eval_pressure(*f, c, ref); });
      else
        v = nodal(mesh, [&](int c, const Vec2& ref) { return eval_scalar(*f, c, ref).value; });
      os << "SCALARS " << field_name(*f, s.has_pressure() ? "pressure" : "scalar") << " double 1\n"
         << "LOOKUP_TABLE default\n";
      for (double x : v) os << num(x) << '\n';
    }
  }
  return os.str();
}

void write_vtk(const std::string& path, const std::vector<VtkEntry>& fields, const std::string& title) {
  write_file(path, vtk_text(fields, title));
}

std::string csv_text(const std::vector<std::string>& header, const std::vector<std::vector<double>>& rows) {
  std::ostringstream os;
  for (std::size_t i = 0; i < header.size(); ++i) os << (i ? "," : "") << header[i];
  os << '\n';
  for (const auto& row : rows) {
    if (row.size() != header.size()) throw ContractViolation("csv row width differs from the header");
    for (std::size_t i = 0; i < row.size(); ++i) os << (i ? "," : "") << num(row[i]);
    os << '\n';
  }
  return os.str();
}

void write_csv(const std::string& path, const std::vector<std::string>& header,
               const std::vector<std::vector<double>>& rows) {
  write_file(path, csv_text(header, rows));
}

void write_json(const std::string& path, const nlohmann::json& j) { write_file(path, j.dump(2) + "\n"); }

void write_text(const std::string& path, const std::string& text) { write_file(path, text); }

nlohmann::json to_json(const Check& c) {
  nlohmann::json j = {{"name", c.name},           {"value", c.value},   {"relation", c.relation},
                      {"tolerance", c.tolerance}, {"passed", c.passed}, {"provenance", c.provenance}};
  if (!std::isfinite(c.value) || c.timing) j["value"] = nullptr;
  nlohmann::json d = nlohmann::json::object();
  for (const auto& [k, v] : c.details) d[k] = std::isfinite(v) ? nlohmann::json(v) : nlohmann::json(nullptr);
  j["details"] = d;
  return j;
}

nlohmann::json to_json(const Report& r) {
  nlohmann::json env = nlohmann::json::object();
  for (const auto& [k, v] : r.environment) env[k] = v;
  nlohmann::json checks = nlohmann::json::array();
  for (const Check& c : r.checks) checks.push_back(to_json(c));
  return {{"environment", env}, {"checks", checks}, {"passed", r.passed()}};
}

nlohmann::json to_json(const DecayFit& f) {
  return {{"stations", f.stations},
          {"energies", f.energies},
          {"sup_values", f.sup_values},
          {"dropped", f.dropped},
          {"noise_floor", f.noise_floor},
          {"void_fit", f.void_fit},
          {"sigma", f.sigma},
          {"prefactor", f.prefactor},
          {"r2", f.r2},
          {"pointwise",
           {{"void_fit", f.pointwise_void},
            {"sigma", f.pointwise_sigma},
            {"prefactor", f.pointwise_prefactor},
            {"r2", f.pointwise_r2},
            {"note", "max over the nodes of the nearest section; lags the true sup by interpolation error"}}}};
}

nlohmann::json to_json(const FluxProfile& f) {
  return {{"reference", f.reference}, {"max_drift", f.max_drift}, {"stations", f.stations.size()}};
}

nlohmann::json to_json(const std::vector<NSIteration>& history) {
  nlohmann::json out = nlohmann::json::array();
  for (const NSIteration& it : history)
    out.push_back({{"kind", it.kind}, {"residual", it.residual}, {"step", it.step}, {"damping", it.damping}});
  return out;
}

}  // namespace slipflow
