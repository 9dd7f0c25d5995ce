#include "sketchopt/pipeline.hpp"
#include "sketchopt/service.hpp"

#include <CLI11.hpp>

#include <iostream>
#include <optional>

using namespace sketchopt;

namespace {

struct CommonVectorize {
  std::optional<double> threshold;
  std::optional<int> levels;
  std::optional<double> snap_deg;

  void add(CLI::App* app) {
    app->add_option("--threshold", threshold, "detection threshold as a fraction of the luminosity range");
    app->add_option("--levels", levels, "pyramid levels");
    app->add_option("--snap-deg", snap_deg, "orthogonal snapping tolerance in degrees (negative disables)");
  }
  void apply(PipelineParams& p) const {
    if (threshold) p.vectorize.detector.threshold_fraction = *threshold;
    if (levels) p.vectorize.levels = *levels;
    if (snap_deg) p.vectorize.snap_deg = *snap_deg;
  }
};

struct CommonParametrize {
  std::vector<std::string> vars;
  std::optional<double> snap_tol;
  std::optional<double> search_radius;
  std::optional<std::string> grouping;

  void add(CLI::App* app) {
    app->add_option("--var", vars, "manual variable axis=<id>,lo=<v>,hi=<v> (repeatable)");
    app->add_option("--snap-tol", snap_tol, "node snapping tolerance in pixels");
    app->add_option("--search-radius", search_radius, "annotation search radius in pixels");
    app->add_option("--grouping", grouping, "by_axis, by_connectivity or by_adjacent_nodes(<r>)");
  }
  void apply(PipelineParams& p) const {
    if (snap_tol) p.build.snap_tol = *snap_tol;
    if (search_radius) p.bind.search_radius = *search_radius;
    if (grouping) p.grouping = *grouping;
  }
  std::vector<ManualVariable> manual() const {
    std::vector<ManualVariable> out;
    for (const std::string& v : vars) out.push_back(ManualVariable::parse(v));
    return out;
  }
};

OptConfig config_with_seed(const std::string& path, std::optional<std::uint64_t> seed) {
  OptConfig c = load_opt_config(path);
  if (seed) c.seed = *seed;
  return c;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Sketch to parametric floorplan to Pareto front"};
  app.set_version_flag("--version", std::string(kToolVersion));
  app.require_subcommand(1);

  std::string input, out, config, vars, model, host = "127.0.0.1";
  std::optional<std::uint64_t> seed;
  int port = 8080;
  CommonVectorize vec;
  CommonParametrize par;

  auto* c_vec = app.add_subcommand("vectorize", "raster sketch -> scene.json");
  c_vec->add_option("input", input, "sketch image (PNG, PGM or PFM)")->required();
  c_vec->add_option("--out", out, "scene document")->default_val("scene.json");
  vec.add(c_vec);

  auto* c_par = app.add_subcommand("parametrize", "scene.json -> model.json");
  c_par->add_option("scene", input, "scene document")->required();
  c_par->add_option("--out", out, "model document")->default_val("model.json");
  par.add(c_par);

  auto* c_opt = app.add_subcommand("optimize", "model.json -> session.json");
  c_opt->add_option("model", input, "model document")->required();
  c_opt->add_option("--config", config, "optimization config (opt.json)");
  c_opt->add_option("--seed", seed, "random seed (overrides the config)");
  c_opt->add_option("--out", out, "session document")->default_val("session.json");

  auto* c_ren = app.add_subcommand("render", "model.json + assignment -> SVG");
  c_ren->add_option("model", input, "model document")->required();
  c_ren->add_option("--vars", vars, "comma-separated values, one per variable (default all zero)");
  c_ren->add_option("--out", out, "SVG file")->default_val("layout.svg");

  auto* c_run = app.add_subcommand("run", "sketch -> scene, model, session and front gallery");
  c_run->add_option("input", input, "sketch image")->required();
  c_run->add_option("--config", config, "optimization config (opt.json)");
  c_run->add_option("--seed", seed, "random seed (overrides the config)");
  c_run->add_option("--out", out, "output directory")->default_val("run");
  vec.add(c_run);
  par.add(c_run);

  auto* c_srv = app.add_subcommand("serve", "serve a session to the explorer");
  c_srv->add_option("session", input, "session document")->required();
  c_srv->add_option("--model", model, "model document to check against the session");
  c_srv->add_option("--port", port, "TCP port")->default_val(8080);
  c_srv->add_option("--host", host, "bind address")->default_val("127.0.0.1");

  CLI11_PARSE(app, argc, argv);

  try {
    PipelineParams params;
    vec.apply(params);
    par.apply(params);
    if (*c_vec) {
      cmd_vectorize(input, out, params);
    } else if (*c_par) {
      cmd_parametrize(input, out, params, par.manual(), std::cerr);
    } else if (*c_opt) {
      cmd_optimize(input, config_with_seed(config, seed), out, std::cerr);
    } else if (*c_ren) {
      const ModelDocument m = model_from_json(read_json_file(input));
      std::string v = vars;
      if (v.empty() && !m.variables.empty()) {
        for (std::size_t i = 0; i < m.variables.size(); ++i) v += i ? ",0" : "0";
      }
      cmd_render(input, v, out);
    } else if (*c_run) {
      const RunSummary s = cmd_run(input, config_with_seed(config, seed), out, params, par.manual(), std::cerr);
      std::cerr << "variables=" << s.variables << " front=" << s.front_size << " gallery=" << s.gallery.size() << "\n";
    } else if (*c_srv) {
      cmd_serve(input, model, host, port, std::cerr);
    }
  } catch (const Error& e) {
    std::cerr << "error: " << (dynamic_cast<const StageError*>(&e) ? "" : e.kind() + ": ") << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
