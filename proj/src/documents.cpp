#include "sketchopt/documents.hpp"

#include "sketchopt/errors.hpp"
#include "sketchopt/objective.hpp"

#include <openssl/evp.h>

#include <chrono>
#include <cmath>
#include <ctime>
#include <fstream>
#include <iomanip>
#include <limits>
#include <set>
#include <sstream>

namespace sketchopt {

namespace {

constexpr int kFormatVersion = 1;

Json point(Vec2 p) { return Json::array({p.x, p.y}); }

Vec2 to_point(const Json& j) {
  if (!j.is_array() || j.size() != 2) throw SchemaError("expected a point [x, y]");
  return {j.at(0).get<double>(), j.at(1).get<double>()};
}

void expect_format(const Json& j, const std::string& format) {
  if (!j.is_object()) throw SchemaError(format + ": document is not an object");
  if (j.value("format", std::string{}) != format) throw SchemaError("not a " + format + " document");
  if (j.value("version", 0) != kFormatVersion) throw SchemaError(format + ": unsupported version");
}

// Runs a parser, turning library type errors into SchemaError.
template <class F>
auto parsing(const std::string& what, F&& f) -> decltype(f()) {
  try {
    return f();
  } catch (const SchemaError&) {
    throw;
  } catch (const Json::exception& e) {
    throw SchemaError(what + ": " + e.what());
  } catch (const std::out_of_range& e) {
    throw SchemaError(what + ": " + e.what());
  }
}

Json number_or_null(double v) { return std::isfinite(v) ? Json(v) : Json(nullptr); }

Json individual_to_json(const Individual& ind) {
  Json o;
  o["genome"] = ind.genome;
  o["feasible"] = !ind.infeasible;
  o["objectives"] = ind.infeasible ? Json(nullptr) : Json(ind.objectives);
  o["rank"] = ind.rank;
  o["crowding"] = number_or_null(ind.crowding);
  return o;
}

Individual individual_from_json(const Json& j) {
  Individual ind;
  ind.genome = j.at("genome").get<std::vector<double>>();
  ind.infeasible = !j.at("feasible").get<bool>();
  if (!ind.infeasible) ind.objectives = j.at("objectives").get<std::vector<double>>();
  ind.rank = j.at("rank").get<int>();
  const Json& c = j.at("crowding");
  ind.crowding = c.is_null() ? std::numeric_limits<double>::infinity() : c.get<double>();
  return ind;
}

}  // namespace

Json scene_to_json(const VectorScene& scene, const std::string& source_sha256) {
  Json j;
  j["format"] = "sketchopt.scene";
  j["version"] = kFormatVersion;
  j["image_size"] = Json::array({scene.width, scene.height});
  j["luminosity_range"] = scene.luminosity_range;
  j["provenance"] = {{"source", scene.provenance.source},
                     {"source_sha256", source_sha256},
                     {"parameters", scene.provenance.parameters}};
  Json segs = Json::array();
  for (const LineSegment& s : scene.segments)
    segs.push_back({{"p0", point(s.p0)}, {"p1", point(s.p1)}, {"gain", s.gain}, {"width_estimate", s.width_estimate}});
  j["segments"] = std::move(segs);
  return j;
}

VectorScene scene_from_json(const Json& j) {
  return parsing("scene document", [&] {
    expect_format(j, "sketchopt.scene");
    VectorScene s;
    const Json& size = j.at("image_size");
    if (!size.is_array() || size.size() != 2) throw SchemaError("scene document: image_size must be [width, height]");
    s.width = size.at(0).get<int>();
    s.height = size.at(1).get<int>();
    s.luminosity_range = j.at("luminosity_range").get<double>();
    const Json& prov = j.at("provenance");
    s.provenance.source = prov.at("source").get<std::string>();
    s.provenance.parameters = prov.at("parameters").get<std::map<std::string, double>>();
    for (const Json& seg : j.at("segments")) {
      LineSegment ls;
      ls.p0 = to_point(seg.at("p0"));
      ls.p1 = to_point(seg.at("p1"));
      ls.gain = seg.at("gain").get<double>();
      ls.width_estimate = seg.value("width_estimate", 1.0);
      s.segments.push_back(ls);
    }
    return s;
  });
}

std::string scene_source_sha256(const Json& j) {
  return parsing("scene document", [&] { return j.at("provenance").value("source_sha256", std::string{}); });
}

Json variable_to_json(const DesignVariable& v) {
  Json o{{"id", v.id}, {"axis_id", v.axis_id}, {"lo", v.lo}, {"hi", v.hi}};
  if (v.source_stem)
    o["mark"] = {{"stem_p0", point(v.source_stem->first)}, {"stem_p1", point(v.source_stem->second)}};
  else
    o["mark"] = nullptr;
  return o;
}

Json model_to_json(const ModelDocument& m) {
  const ParametricGraph& g = m.graph;
  Json j;
  j["format"] = "sketchopt.model";
  j["version"] = kFormatVersion;
  j["source"] = {{"file", m.source}, {"sha256", m.source_sha256}, {"width", m.width}, {"height", m.height}};
  j["snap_tol"] = g.snap_tol;
  j["collinear_tol"] = g.collinear_tol;
  Json nodes = Json::array(), edges = Json::array(), axes = Json::array(), groups = Json::array(), vars = Json::array();
  for (const auto& [id, p] : g.nodes) nodes.push_back({{"id", id}, {"x", p.x}, {"y", p.y}});
  for (const auto& [id, e] : g.edges) edges.push_back({{"id", id}, {"a", e.a}, {"b", e.b}, {"kind", to_string(e.kind)}});
  for (const auto& [id, a] : g.axes)
    axes.push_back({{"id", id},
                    {"direction", point(a.direction)},
                    {"anchor", point(a.anchor)},
                    {"node_ids", a.node_ids},
                    {"edge_ids", a.edge_ids}});
  for (const auto& [id, gr] : g.groups) groups.push_back({{"id", id}, {"criterion", gr.criterion}, {"node_ids", gr.node_ids}});
  for (const DesignVariable& v : m.variables) vars.push_back(variable_to_json(v));
  j["nodes"] = std::move(nodes);
  j["edges"] = std::move(edges);
  j["axes"] = std::move(axes);
  j["groups"] = std::move(groups);
  j["variables"] = std::move(vars);
  Json base = Json::object();
  for (const DesignVariable& v : m.variables) base[std::to_string(v.id)] = 0.0;
  j["base_assignment"] = std::move(base);
  j["warnings"] = m.warnings;
  return j;
}

ModelDocument model_from_json(const Json& j) {
  return parsing("model document", [&] {
    expect_format(j, "sketchopt.model");
    ModelDocument m;
    const Json& src = j.at("source");
    m.source = src.at("file").get<std::string>();
    m.source_sha256 = src.at("sha256").get<std::string>();
    m.width = src.at("width").get<int>();
    m.height = src.at("height").get<int>();
    ParametricGraph& g = m.graph;
    g.snap_tol = j.at("snap_tol").get<double>();
    g.collinear_tol = j.at("collinear_tol").get<double>();
    for (const Json& n : j.at("nodes")) g.nodes[n.at("id").get<int>()] = {n.at("x").get<double>(), n.at("y").get<double>()};
    for (const Json& e : j.at("edges")) {
      Edge ed{e.at("a").get<int>(), e.at("b").get<int>(), element_kind_from_string(e.at("kind").get<std::string>())};
      if (!g.nodes.count(ed.a) || !g.nodes.count(ed.b)) throw SchemaError("model document: edge references a missing node");
      g.edges[e.at("id").get<int>()] = ed;
    }
    for (const Json& a : j.at("axes")) {
      WallAxis ax;
      ax.direction = to_point(a.at("direction"));
      ax.anchor = to_point(a.at("anchor"));
      ax.node_ids = a.at("node_ids").get<std::vector<int>>();
      ax.edge_ids = a.at("edge_ids").get<std::vector<int>>();
      if (ax.node_ids.size() < 2) throw SchemaError("model document: axis with fewer than two nodes");
      for (int v : ax.node_ids)
        if (!g.nodes.count(v)) throw SchemaError("model document: axis references a missing node");
      g.axes[a.at("id").get<int>()] = std::move(ax);
    }
    for (const Json& gr : j.at("groups"))
      g.groups[gr.at("id").get<int>()] = {gr.at("criterion").get<std::string>(), gr.at("node_ids").get<std::vector<int>>()};
    for (const Json& v : j.at("variables")) {
      DesignVariable dv;
      dv.id = v.at("id").get<int>();
      dv.axis_id = v.at("axis_id").get<int>();
      dv.lo = v.at("lo").get<double>();
      dv.hi = v.at("hi").get<double>();
      if (!g.axes.count(dv.axis_id)) throw SchemaError("model document: variable bound to a missing axis");
      if (!(dv.lo <= dv.hi)) throw SchemaError("model document: variable range is inverted");
      const Json& mark = v.at("mark");
      if (!mark.is_null()) dv.source_stem = std::pair{to_point(mark.at("stem_p0")), to_point(mark.at("stem_p1"))};
      m.variables.push_back(dv);
    }
    m.warnings = j.value("warnings", std::vector<std::string>{});
    return m;
  });
}

Json opt_to_json(const OptConfig& c) {
  Json j;
  j["population_size"] = c.population_size;
  j["generations"] = c.generations;
  j["crossover_prob"] = c.crossover_prob;
  j["mutation_prob"] = c.mutation_prob ? Json(*c.mutation_prob) : Json(nullptr);
  j["eta_c"] = c.eta_c;
  j["eta_m"] = c.eta_m;
  j["seed"] = c.seed;
  j["objectives"] = c.objectives;
  j["stiffness_exponent"] = c.stiffness_exponent;
  j["area_target"] = c.area_target;
  return j;
}

OptConfig opt_from_json(const Json& j) {
  OptConfig c = parsing("optimization config", [&] {
    if (!j.is_object()) throw SchemaError("optimization config: document is not an object");
    static const std::set<std::string> known{"population_size", "generations", "crossover_prob", "mutation_prob",
                                             "eta_c", "eta_m", "seed", "objectives", "stiffness_exponent",
                                             "area_target"};
    for (const auto& [key, value] : j.items())
      if (!known.count(key)) throw SchemaError("optimization config: unknown field '" + key + "'");
    OptConfig c;
    c.population_size = j.value("population_size", c.population_size);
    c.generations = j.value("generations", c.generations);
    c.crossover_prob = j.value("crossover_prob", c.crossover_prob);
    if (j.contains("mutation_prob") && !j.at("mutation_prob").is_null()) c.mutation_prob = j.at("mutation_prob").get<double>();
    c.eta_c = j.value("eta_c", c.eta_c);
    c.eta_m = j.value("eta_m", c.eta_m);
    c.seed = j.value("seed", c.seed);
    c.objectives = j.value("objectives", c.objectives);
    c.stiffness_exponent = j.value("stiffness_exponent", c.stiffness_exponent);
    c.area_target = j.value("area_target", c.area_target);
    return c;
  });
  c.validate();
  make_registry(c.objectives);  // rejects unknown objective names
  return c;
}

Json layout_to_json(const FloorplanLayout& layout) {
  Json polylines = Json::array();
  for (const auto& pl : layout.polylines) {
    Json pts = Json::array();
    for (const Vec2& p : pl) pts.push_back(point(p));
    polylines.push_back(std::move(pts));
  }
  Json nodes = Json::array();
  for (const auto& [id, p] : layout.node_positions) nodes.push_back({{"id", id}, {"x", p.x}, {"y", p.y}});
  return {{"polylines", std::move(polylines)}, {"nodes", std::move(nodes)}};
}

Json session_to_json(const SessionDocument& s) {
  Json j;
  j["format"] = "sketchopt.session";
  j["version"] = kFormatVersion;
  j["provenance"] = {{"source", s.provenance.source},
                     {"source_sha256", s.provenance.source_sha256},
                     {"tool_version", s.provenance.tool_version},
                     {"seed", s.provenance.seed},
                     {"created", s.provenance.created}};
  j["model"] = model_to_json(s.model);
  Json vars = Json::array();
  for (const DesignVariable& v : s.model.variables) vars.push_back(variable_to_json(v));
  j["variables"] = std::move(vars);
  j["config"] = opt_to_json(s.config);
  j["objectives"] = s.objectives;
  Json gens = Json::array();
  for (const GenerationRecord& g : s.result.history) {
    Json pop = Json::array();
    for (const Individual& ind : g.population) pop.push_back(individual_to_json(ind));
    gens.push_back({{"index", g.index}, {"hypervolume", g.hypervolume}, {"population", std::move(pop)}});
  }
  j["generations"] = std::move(gens);
  Json front = Json::array();
  for (const Individual& ind : s.result.front.members) front.push_back(individual_to_json(ind));
  j["front"] = std::move(front);
  j["reference_point"] = s.result.front.reference_point;
  j["hypervolume_history"] = s.result.front.hypervolume_history;
  return j;
}

SessionDocument session_from_json(const Json& j) {
  return parsing("session document", [&] {
    expect_format(j, "sketchopt.session");
    SessionDocument s;
    const Json& p = j.at("provenance");
    s.provenance.source = p.at("source").get<std::string>();
    s.provenance.source_sha256 = p.at("source_sha256").get<std::string>();
    s.provenance.tool_version = p.at("tool_version").get<std::string>();
    s.provenance.seed = p.at("seed").get<std::uint64_t>();
    s.provenance.created = p.at("created").get<std::string>();
    s.model = model_from_json(j.at("model"));
    s.config = opt_from_json(j.at("config"));
    s.objectives = j.at("objectives").get<std::vector<std::string>>();
    for (const Json& g : j.at("generations")) {
      GenerationRecord rec;
      rec.index = g.at("index").get<int>();
      rec.hypervolume = g.at("hypervolume").get<double>();
      for (const Json& ind : g.at("population")) rec.population.push_back(individual_from_json(ind));
      s.result.history.push_back(std::move(rec));
    }
    for (const Json& ind : j.at("front")) s.result.front.members.push_back(individual_from_json(ind));
    s.result.front.reference_point = j.at("reference_point").get<std::vector<double>>();
    s.result.front.hypervolume_history = j.at("hypervolume_history").get<std::vector<double>>();
    return s;
  });
}

Json read_json_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot read " + path.string());
  try {
    return Json::parse(in);
  } catch (const Json::parse_error& e) {
    throw SchemaError(path.string() + " is not valid JSON: " + e.what());
  }
}

void write_text_file(const std::filesystem::path& path, const std::string& text) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write " + path.string());
  out << text;
  if (!out) throw IoError("failed writing " + path.string());
}

void write_json_file(const std::filesystem::path& path, const Json& j) { write_text_file(path, j.dump(2) + "\n"); }

std::string sha256_hex(const std::string& bytes) {
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (EVP_Digest(bytes.data(), bytes.size(), digest, &len, EVP_sha256(), nullptr) != 1)
    throw IoError("sha256 failed");
  std::ostringstream os;
  for (unsigned int i = 0; i < len; ++i) os << std::hex << std::setw(2) << std::setfill('0') << static_cast<int>(digest[i]);
  return os.str();
}

std::string sha256_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot read " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return sha256_hex(buf.str());
}

std::string utc_timestamp() {
  const std::time_t t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&t, &tm);
  std::ostringstream os;
  os << std::put_time(&tm, "%Y-%m-%dT%H:%M:%SZ");
  return os.str();
}

}  // namespace sketchopt
