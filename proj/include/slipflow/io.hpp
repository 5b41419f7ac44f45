#pragma once

#include <string>
#include <vector>

#include "json.hpp"
#include "slipflow/diagnostics.hpp"
#include "slipflow/fem.hpp"

namespace slipflow {

/// One field of a VTK file. Mixed fields write the parts selected here; scalar fields
/// always write their single component.
struct VtkEntry {
  const Field* field = nullptr;
  bool velocity = true;
  bool pressure = true;
};

/// Legacy ASCII VTK unstructured grid with biquadratic quads (quadratic edges in 1D).
/// Velocities are written as 3-vectors, pressures are evaluated at every node.
/// All fields must live on the same mesh.
std::string vtk_text(const std::vector<VtkEntry>& fields, const std::string& title = "slipflow");
void write_vtk(const std::string& path, const std::vector<VtkEntry>& fields, const std::string& title = "slipflow");

/// Comma-separated table, numbers with 17 significant digits.
std::string csv_text(const std::vector<std::string>& header, const std::vector<std::vector<double>>& rows);
void write_csv(const std::string& path, const std::vector<std::string>& header,
               const std::vector<std::vector<double>>& rows);

/// Pretty-printed with sorted keys and a trailing newline.
void write_json(const std::string& path, const nlohmann::json& j);
void write_text(const std::string& path, const std::string& text);

nlohmann::json to_json(const Check& c);
nlohmann::json to_json(const Report& r);
nlohmann::json to_json(const DecayFit& f);
nlohmann::json to_json(const FluxProfile& f);
nlohmann::json to_json(const std::vector<NSIteration>& history);

}  // namespace slipflow
