#pragma once

#include <cstdint>
#include <filesystem>
#include <string>

#include <json.hpp>

#include "dgmm/curves.hpp"
#include "dgmm/grid.hpp"
#include "dgmm/potentials.hpp"
#include "dgmm/profile1d.hpp"

namespace dgmm {

using json = nlohmann::json;

// Declarative potential: {"kind": "w0" | "scaled" | "perturbed", "factor", "a", "sigma",
// "seed", "softness"}.
struct PotentialSpec {
  std::string kind = "w0";
  double factor = 1.0;
  Vec2 a{0.0, 1.0};
  double sigma = 0.0;
  std::uint64_t seed = 0;
  double softness = 0.0;

  Potential build() const;
  json to_json() const;
  static PotentialSpec from_json(const json& j);
  // Named shortcuts: "w0", "w0-soft", "scaled-1.21", "perturbed-0.2-7" (sigma, seed).
  static PotentialSpec from_name(const std::string& name);
};

// Shortest round-trip decimal form.
std::string format_double(double v);

// Write through a temporary sibling file and rename into place.
void write_file_atomic(const std::filesystem::path& path, const std::string& content);
std::string read_file(const std::filesystem::path& path);

std::string curve_to_csv(const Curve& c);
Curve curve_from_csv(const std::string& text);
std::string profile_to_csv(const Profile1D& p);

enum class FieldFormat { Csv, Binary };

// Writes `<stem>.json` (grid, metadata, data file name) next to `<stem>.csv` or
// `<stem>.bin` (row-major doubles u1, u2 per node, little-endian host order).
void write_field(const std::filesystem::path& stem, const Field2D& u, const json& meta,
                 FieldFormat format = FieldFormat::Csv);
// Reads a field from its JSON sidecar.
Field2D read_field(const std::filesystem::path& sidecar, json* meta = nullptr);

json grid_to_json(const GridSpec& g);
GridSpec grid_from_json(const json& j);

}  // namespace dgmm
