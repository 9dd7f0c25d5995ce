#pragma once

#include "sketchopt/annotation.hpp"
#include "sketchopt/documents.hpp"
#include "sketchopt/errors.hpp"
#include "sketchopt/nsga2.hpp"
#include "sketchopt/parametrizer.hpp"
#include "sketchopt/vectorizer.hpp"

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

namespace sketchopt {

inline constexpr const char* kToolVersion = SKETCHOPT_VERSION;

/// Failure of one pipeline stage. Keeps the original error kind; the message
/// is prefixed with the stage name.
class StageError : public Error {
public:
  StageError(std::string stage, const Error& inner)
      : Error(inner.kind(), "[" + stage + "] " + inner.kind() + ": " + inner.what()), stage_(std::move(stage)) {}
  const std::string& stage() const noexcept { return stage_; }

private:
  std::string stage_;
};

struct PipelineParams {
  VectorizeParams vectorize;
  BuildParams build;
  double merge_angle_deg = 5.0;
  double collinear_tol = 1e-6;
  std::string grouping = "by_axis";
  AnnotationParams annotation;
  BindParams bind;
};

/// Manual variable from `--var axis=<id>,lo=<v>,hi=<v>`. It replaces any
/// annotation-bound variable on the same axis.
struct ManualVariable {
  int axis_id = 0;
  double lo = 0.0;
  double hi = 0.0;
  /// Throws ParamError on malformed text or a range not containing 0.
  static ManualVariable parse(const std::string& text);
};

/// Image file -> scene document (source name and file hash recorded).
Json vectorize_file(const std::filesystem::path& image, const VectorizeParams& params);

/// Scene -> model: split marks, build, merge and group the graph, bind marks,
/// add manual variables. Throws EmptySceneError when no layout strokes remain.
ModelDocument parametrize_scene(const VectorScene& scene, const std::string& source_sha256,
                                const PipelineParams& params, const std::vector<ManualVariable>& manual = {});

ObjectiveRegistry registry_for(const OptConfig& config);

/// Model -> session. Streams one progress line per generation to `progress`
/// when given. Throws ConfigError for a model without variables.
SessionDocument optimize_model(const ModelDocument& model, const OptConfig& config, std::ostream* progress);

/// Parse "v1,...,vn" (one value per variable, in variable order). Throws
/// ParamError when malformed or of the wrong length and RangeError when a
/// value lies outside its variable's range.
Assignment parse_vars(const std::string& text, const std::vector<DesignVariable>& variables);

std::string render_model_svg(const ModelDocument& model, const Assignment& assignment, const std::string& title = "");

// CLI stages. Each reads and writes documents; errors propagate as Error.
void cmd_vectorize(const std::filesystem::path& input, const std::filesystem::path& out, const PipelineParams& params);
void cmd_parametrize(const std::filesystem::path& scene, const std::filesystem::path& out,
                     const PipelineParams& params, const std::vector<ManualVariable>& manual, std::ostream& diag);
void cmd_optimize(const std::filesystem::path& model, const OptConfig& config, const std::filesystem::path& out,
                  std::ostream& diag);
void cmd_render(const std::filesystem::path& model, const std::string& vars, const std::filesystem::path& out);

struct RunSummary {
  std::size_t variables = 0;
  std::size_t front_size = 0;
  std::vector<std::filesystem::path> gallery;
};

/// Sketch -> scene.json, model.json, session.json and one SVG per front
/// member (plus base.svg) under `out_dir`. Failures are StageErrors.
RunSummary cmd_run(const std::filesystem::path& input, const OptConfig& config, const std::filesystem::path& out_dir,
                   const PipelineParams& params, const std::vector<ManualVariable>& manual, std::ostream& diag);

/// Load an opt.json, or defaults when `path` is empty.
OptConfig load_opt_config(const std::filesystem::path& path);

}  // namespace sketchopt
