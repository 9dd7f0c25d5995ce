#include "sketchopt/pipeline.hpp"

#include "sketchopt/raster.hpp"
#include "sketchopt/render.hpp"

#include <charconv>
#include <cmath>
#include <iomanip>
#include <map>
#include <ostream>
#include <sstream>

namespace sketchopt {

namespace {

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string cur;
  std::istringstream in(s);
  while (std::getline(in, cur, sep)) out.push_back(cur);
  if (!s.empty() && s.back() == sep) out.emplace_back();
  return out;
}

double parse_double(const std::string& text, const std::string& what) {
  double v = 0.0;
  const char* first = text.data();
  const char* last = text.data() + text.size();
  if (!text.empty() && *first == '+') ++first;
  const auto res = std::from_chars(first, last, v);
  if (text.empty() || res.ec != std::errc{} || res.ptr != last || !std::isfinite(v))
    throw ParamError("malformed number '" + text + "' in " + what);
  return v;
}

// Run one stage of cmd_run, tagging library errors with the stage name.
template <class F>
auto stage(const std::string& name, F&& f) -> decltype(f()) {
  try {
    return f();
  } catch (const StageError&) {
    throw;
  } catch (const Error& e) {
    throw StageError(name, e);
  }
}

}  // namespace

ManualVariable ManualVariable::parse(const std::string& text) {
  std::map<std::string, std::string> kv;
  for (const std::string& part : split(text, ',')) {
    const auto eq = part.find('=');
    if (eq == std::string::npos) throw ParamError("--var expects axis=<id>,lo=<v>,hi=<v>, got '" + text + "'");
    kv[part.substr(0, eq)] = part.substr(eq + 1);
  }
  if (kv.size() != 3 || !kv.count("axis") || !kv.count("lo") || !kv.count("hi"))
    throw ParamError("--var expects axis=<id>,lo=<v>,hi=<v>, got '" + text + "'");
  ManualVariable m;
  int axis = 0;
  const std::string& a = kv["axis"];
  const auto res = std::from_chars(a.data(), a.data() + a.size(), axis);
  if (a.empty() || res.ec != std::errc{} || res.ptr != a.data() + a.size()) throw ParamError("malformed axis id '" + a + "'");
  m.axis_id = axis;
  m.lo = parse_double(kv["lo"], "--var");
  m.hi = parse_double(kv["hi"], "--var");
  // Zero is the drawn position and must stay reachable.
  if (!(m.lo <= 0.0 && 0.0 <= m.hi && m.lo < m.hi)) throw ParamError("--var range must satisfy lo <= 0 <= hi, lo < hi");
  return m;
}

Json vectorize_file(const std::filesystem::path& image, const VectorizeParams& params) {
  const RasterImage img = load_raster(image);
  VectorScene scene = vectorize(img, params);
  scene.provenance.source = image.filename().string();
  return scene_to_json(scene, sha256_file(image));
}

ModelDocument parametrize_scene(const VectorScene& scene, const std::string& source_sha256,
                                const PipelineParams& params, const std::vector<ManualVariable>& manual) {
  const SplitResult parts = split_annotation_strokes(scene, params.annotation);
  if (parts.layout.segments.empty()) throw EmptySceneError("the scene has no wall strokes");
  ParametricGraph graph = build_graph(parts.layout, params.build);
  graph = merge_collinear(graph, deg2rad(params.merge_angle_deg), params.collinear_tol);
  graph = group_elements(graph, Grouping::parse(params.grouping));

  const DetectResult detected = detect_annotations(parts.marks_raw, params.annotation);
  BindResult bound = bind_annotations(graph, detected.marks, params.bind);

  ModelDocument doc;
  doc.warnings = detected.warnings;
  doc.warnings.insert(doc.warnings.end(), bound.warnings.begin(), bound.warnings.end());
  if (detected.marks.empty()) doc.warnings.push_back("no annotation marks found");

  std::vector<DesignVariable> vars = std::move(bound.variables);
  for (const ManualVariable& m : manual) {
    graph.axis(m.axis_id);
    std::erase_if(vars, [&](const DesignVariable& v) { return v.axis_id == m.axis_id; });
    DesignVariable v;
    v.axis_id = m.axis_id;
    v.lo = m.lo;
    v.hi = m.hi;
    vars.push_back(v);
  }
  for (std::size_t i = 0; i < vars.size(); ++i) vars[i].id = static_cast<int>(i);
  if (vars.empty()) doc.warnings.push_back("the model has no design variables");

  doc.graph = std::move(graph);
  doc.variables = std::move(vars);
  doc.width = scene.width;
  doc.height = scene.height;
  doc.source = scene.provenance.source;
  doc.source_sha256 = source_sha256;
  return doc;
}

ObjectiveRegistry registry_for(const OptConfig& config) {
  ObjectiveOptions opt;
  opt.stiffness_exponent = config.stiffness_exponent;
  opt.area_target = config.area_target;
  return make_registry(config.objectives, opt);
}

SessionDocument optimize_model(const ModelDocument& model, const OptConfig& config, std::ostream* progress) {
  config.validate();
  if (model.variables.empty()) throw ConfigError("nothing to optimize: the model has no design variables");
  const ObjectiveRegistry registry = registry_for(config);
  GenerationObserver observer;
  if (progress) {
    observer = [&](const GenerationRecord& g) {
      std::size_t front = 0;
      std::vector<double> best;
      for (const Individual& ind : g.population) {
        if (ind.infeasible) continue;
        if (ind.rank == 0) ++front;
        if (best.empty()) best = ind.objectives;
        for (std::size_t k = 0; k < best.size(); ++k) best[k] = std::min(best[k], ind.objectives[k]);
      }
      *progress << "generation " << g.index << "/" << config.generations << " front=" << front;
      for (std::size_t k = 0; k < best.size(); ++k) *progress << " best_" << config.objectives[k] << "=" << best[k];
      *progress << "\n";
    };
  }
  SessionDocument s;
  s.result = evolve(model.graph, model.variables, registry, config, observer);
  s.model = model;
  s.config = config;
  s.objectives = config.objectives;
  s.provenance.source = model.source;
  s.provenance.source_sha256 = model.source_sha256;
  s.provenance.tool_version = kToolVersion;
  s.provenance.seed = config.seed;
  s.provenance.created = utc_timestamp();
  return s;
}

Assignment parse_vars(const std::string& text, const std::vector<DesignVariable>& variables) {
  std::vector<std::string> parts = text.empty() ? std::vector<std::string>{} : split(text, ',');
  if (parts.size() != variables.size())
    throw ParamError("expected " + std::to_string(variables.size()) + " values, got " + std::to_string(parts.size()));
  std::vector<double> genome;
  for (const std::string& p : parts) genome.push_back(parse_double(p, "vars"));
  for (std::size_t i = 0; i < genome.size(); ++i) {
    const DesignVariable& v = variables[i];
    if (genome[i] < v.lo || genome[i] > v.hi) {
      std::ostringstream os;
      os << "variable " << v.id << " = " << genome[i] << " outside [" << v.lo << ", " << v.hi << "]";
      throw RangeError(os.str());
    }
  }
  return assignment_from_genome(variables, genome);
}

std::string render_model_svg(const ModelDocument& model, const Assignment& assignment, const std::string& title) {
  RenderRequest req;
  req.graph = &model.graph;
  req.variables = &model.variables;
  req.assignment = assignment;
  req.width = model.width;
  req.height = model.height;
  req.title = title;
  return render_svg(req);
}

void cmd_vectorize(const std::filesystem::path& input, const std::filesystem::path& out, const PipelineParams& params) {
  write_json_file(out, vectorize_file(input, params.vectorize));
}

void cmd_parametrize(const std::filesystem::path& scene, const std::filesystem::path& out,
                     const PipelineParams& params, const std::vector<ManualVariable>& manual, std::ostream& diag) {
  const Json doc = read_json_file(scene);
  const ModelDocument model = parametrize_scene(scene_from_json(doc), scene_source_sha256(doc), params, manual);
  for (const std::string& w : model.warnings) diag << "warning: " << w << "\n";
  write_json_file(out, model_to_json(model));
}

void cmd_optimize(const std::filesystem::path& model, const OptConfig& config, const std::filesystem::path& out,
                  std::ostream& diag) {
  const ModelDocument m = model_from_json(read_json_file(model));
  write_json_file(out, session_to_json(optimize_model(m, config, &diag)));
}

void cmd_render(const std::filesystem::path& model, const std::string& vars, const std::filesystem::path& out) {
  const ModelDocument m = model_from_json(read_json_file(model));
  write_text_file(out, render_model_svg(m, parse_vars(vars, m.variables), m.source));
}

RunSummary cmd_run(const std::filesystem::path& input, const OptConfig& config, const std::filesystem::path& out_dir,
                   const PipelineParams& params, const std::vector<ManualVariable>& manual, std::ostream& diag) {
  const Json scene_doc = stage("vectorize", [&] { return vectorize_file(input, params.vectorize); });
  write_json_file(out_dir / "scene.json", scene_doc);

  // Each stage consumes the parsed document, exactly as the chained commands do.
  const ModelDocument model = stage("parametrize", [&] {
    ModelDocument m = parametrize_scene(scene_from_json(scene_doc), scene_source_sha256(scene_doc), params, manual);
    return model_from_json(model_to_json(m));
  });
  for (const std::string& w : model.warnings) diag << "warning: " << w << "\n";
  write_json_file(out_dir / "model.json", model_to_json(model));

  const SessionDocument session = stage("optimize", [&] { return optimize_model(model, config, &diag); });
  write_json_file(out_dir / "session.json", session_to_json(session));

  RunSummary summary;
  summary.variables = model.variables.size();
  summary.front_size = session.result.front.members.size();
  stage("render", [&] {
    write_text_file(out_dir / "base.svg", render_model_svg(model, {}, "base"));
    for (std::size_t i = 0; i < session.result.front.members.size(); ++i) {
      std::ostringstream name;
      name << "member_" << std::setw(3) << std::setfill('0') << i << ".svg";
      const auto path = out_dir / "front" / name.str();
      const Individual& ind = session.result.front.members[i];
      write_text_file(path, render_model_svg(model, assignment_from_genome(model.variables, ind.genome), name.str()));
      summary.gallery.push_back(path);
    }
    return 0;
  });
  return summary;
}

OptConfig load_opt_config(const std::filesystem::path& path) {
  if (path.empty()) return OptConfig{};
  return opt_from_json(read_json_file(path));
}

}  // namespace sketchopt
