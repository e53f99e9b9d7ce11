#pragma once

// JSON documents for every object the tools exchange, and the command-line
// front end. Every document is an envelope
//   {schema_version, kind, payload, provenance: {command, parameters, seed}}.

#include <json.hpp>

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "hypdual/cone_surface.hpp"
#include "hypdual/polyhedra.hpp"
#include "hypdual/realization_solver.hpp"

namespace hypdual::io {

using nlohmann::json;

inline constexpr int kSchemaVersion = 1;

enum class DocKind { ConeMetric, Polyhedron, DualOutput, SolverReport, FuchsianData };

std::string_view to_string(DocKind k);

struct Provenance {
  std::string command;
  json parameters = json::object();
  std::uint64_t seed = 0;
};

struct Document {
  DocKind kind = DocKind::ConeMetric;
  json payload;
  Provenance provenance;
};

json to_json(const cone::ConeMetric& m);
cone::ConeMetric metric_from_json(const json& j);

/// Face planes plus the derived lattice (for readers); parsing rebuilds the
/// lattice from the planes.
json to_json(const poly::ConvexPolyhedronH3& p);
poly::ConvexPolyhedronH3 polyhedron_from_json(const json& j);

json to_json(const poly::DualMetricOutput& d);
poly::DualMetricOutput dual_from_json(const json& j);

json to_json(const geom::Isometry& g);
geom::Isometry isometry_from_json(const json& j);

json envelope(const Document& doc);
/// Throws ParseError on malformed text or a malformed envelope.
Document parse_document(const std::string& text);
Document read_document(const std::filesystem::path& path);

std::string dump(const Document& doc);
/// Writes to a temporary sibling and renames it over `path`.
void write_atomic(const std::filesystem::path& path, const std::string& text);

/// Runs one command line (without the program name). Returns the process
/// exit code: 0 pass, 1 mathematical failure, 2 input or parse failure.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace hypdual::io
