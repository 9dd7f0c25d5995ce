#pragma once

#include "sketchopt/nsga2.hpp"
#include "sketchopt/parametrizer.hpp"
#include "sketchopt/vectorizer.hpp"

#include <json.hpp>

#include <filesystem>
#include <string>
#include <vector>

namespace sketchopt {

using Json = nlohmann::json;

/// Everything downstream of the parametrize stage.
struct ModelDocument {
  ParametricGraph graph;
  std::vector<DesignVariable> variables;
  std::vector<std::string> warnings;
  int width = 0;
  int height = 0;
  std::string source;         // sketch file name
  std::string source_sha256;  // of the sketch file bytes
};

struct Provenance {
  std::string source;
  std::string source_sha256;
  std::string tool_version;
  std::uint64_t seed = 0;
  std::string created;  // ISO 8601 UTC; the only non-deterministic field
};

struct SessionDocument {
  ModelDocument model;
  OptConfig config;
  std::vector<std::string> objectives;
  OptimizationResult result;
  Provenance provenance;
};

Json scene_to_json(const VectorScene& scene, const std::string& source_sha256 = "");
/// Throws SchemaError on a malformed document.
VectorScene scene_from_json(const Json& j);
std::string scene_source_sha256(const Json& j);

Json model_to_json(const ModelDocument& model);
ModelDocument model_from_json(const Json& j);

Json opt_to_json(const OptConfig& config);
/// Missing fields keep their defaults. Throws SchemaError on wrong types and
/// ConfigError on invalid values.
OptConfig opt_from_json(const Json& j);

Json session_to_json(const SessionDocument& session);
SessionDocument session_from_json(const Json& j);

Json variable_to_json(const DesignVariable& v);
Json layout_to_json(const FloorplanLayout& layout);

/// Throws IoError when unreadable and SchemaError when not JSON.
Json read_json_file(const std::filesystem::path& path);
void write_json_file(const std::filesystem::path& path, const Json& j);
void write_text_file(const std::filesystem::path& path, const std::string& text);

/// Lowercase hex SHA-256 of a file's bytes.
std::string sha256_file(const std::filesystem::path& path);
std::string sha256_hex(const std::string& bytes);

std::string utc_timestamp();

}  // namespace sketchopt
