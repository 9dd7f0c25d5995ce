#include "sketchopt/objective.hpp"

#include "sketchopt/errors.hpp"

#include <algorithm>
#include <cmath>

namespace sketchopt {

StructuralModel build_structural_model(const FloorplanLayout& layout) {
  StructuralModel m;
  for (const auto& [id, p] : layout.node_positions) m.columns.push_back(p);
  for (const auto& pl : layout.polylines) {
    for (std::size_t i = 0; i + 1 < pl.size(); ++i) {
      const Vec2 a = pl[i];
      const Vec2 b = pl[i + 1];
      m.beams.push_back({a, b, BeamLevel::top});
      m.beams.push_back({a, b, BeamLevel::bottom});
      m.panels.push_back({a, b, distance(a, b)});
    }
  }
  return m;
}

double stress_proxy(const StructuralModel& model) {
  double s = 0.0;
  for (const Beam& b : model.beams) {
    const double l = b.length();
    s += l * l;
  }
  return s;
}

double torsion_proxy(const StructuralModel& model, double stiffness_exponent) {
  double wsum = 0.0;
  Vec2 cm;
  for (const WallPanel& p : model.panels) {
    wsum += p.length;
    cm += (p.p0 + p.p1) * (0.5 * p.length);
  }
  if (!(wsum > 0.0)) return 0.0;
  cm = cm / wsum;

  double kx = 0.0, kxx = 0.0, ky = 0.0, kyy = 0.0;
  for (const WallPanel& p : model.panels) {
    if (!(p.length > 0.0)) continue;
    const Vec2 d = (p.p1 - p.p0) / p.length;
    const double k = std::pow(p.length, stiffness_exponent);
    const Vec2 mid = (p.p0 + p.p1) * 0.5;
    // Against x loads the panel works with its y extent, and vice versa.
    const double rx = k * d.y * d.y;
    const double ry = k * d.x * d.x;
    kx += rx;
    kxx += rx * mid.x;
    ky += ry;
    kyy += ry * mid.y;
  }
  const Vec2 cr{kx > 0.0 ? kxx / kx : cm.x, ky > 0.0 ? kyy / ky : cm.y};
  return distance(cr, cm);
}

double convex_hull_area(std::vector<Vec2> pts) {
  std::sort(pts.begin(), pts.end(), [](Vec2 a, Vec2 b) { return a.x < b.x || (a.x == b.x && a.y < b.y); });
  pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
  if (pts.size() < 3) return 0.0;
  // Andrew's monotone chain.
  std::vector<Vec2> hull(2 * pts.size());
  std::size_t k = 0;
  for (const Vec2& p : pts) {
    while (k >= 2 && cross(hull[k - 1] - hull[k - 2], p - hull[k - 2]) <= 0.0) --k;
    hull[k++] = p;
  }
  for (std::size_t i = pts.size() - 1, t = k + 1; i-- > 0;) {
    while (k >= t && cross(hull[k - 1] - hull[k - 2], pts[i] - hull[k - 2]) <= 0.0) --k;
    hull[k++] = pts[i];
  }
  hull.resize(k - 1);
  double a = 0.0;
  for (std::size_t i = 0; i < hull.size(); ++i) a += cross(hull[i], hull[(i + 1) % hull.size()]);
  return std::abs(a) / 2.0;
}

double area_deviation(const FloorplanLayout& layout, double target) {
  std::vector<Vec2> pts;
  for (const auto& [id, p] : layout.node_positions) pts.push_back(p);
  return std::abs(convex_hull_area(std::move(pts)) - target);
}

ObjectiveRegistry make_registry(const std::vector<std::string>& names, const ObjectiveOptions& options) {
  if (names.empty()) throw ConfigError("objective list is empty");
  ObjectiveRegistry reg;
  for (const std::string& name : names) {
    if (name == "stress") {
      reg.push_back({name, [](const FloorplanLayout&, const StructuralModel& m) { return stress_proxy(m); }});
    } else if (name == "torsion") {
      const double e = options.stiffness_exponent;
      reg.push_back({name, [e](const FloorplanLayout&, const StructuralModel& m) { return torsion_proxy(m, e); }});
    } else if (name == "area_deviation") {
      const double target = options.area_target;
      reg.push_back({name, [target](const FloorplanLayout& l, const StructuralModel&) { return area_deviation(l, target); }});
    } else {
      throw ConfigError("unknown objective '" + name + "'");
    }
  }
  return reg;
}

ObjectiveVector evaluate_layout(const FloorplanLayout& layout, const ObjectiveRegistry& registry) {
  if (registry.empty()) throw ConfigError("objective registry is empty");
  ObjectiveVector out;
  const StructuralModel model = build_structural_model(layout);
  for (const Objective& obj : registry) {
    out.labels.push_back(obj.name);
    double v = 0.0;
    try {
      v = obj.evaluate(layout, model);
    } catch (const std::exception& e) {
      throw ObjectiveError("objective '" + obj.name + "' failed: " + e.what());
    }
    if (!std::isfinite(v)) throw ObjectiveError("objective '" + obj.name + "' returned a non-finite value");
    out.values.push_back(v);
  }
  return out;
}

ObjectiveVector evaluate_objectives(const ParametricGraph& graph, const std::vector<DesignVariable>& variables,
                                    const Assignment& assignment, const ObjectiveRegistry& registry) {
  if (registry.empty()) throw ConfigError("objective registry is empty");
  ParametricGraph moved;
  try {
    moved = transform(graph, assignment, variables);
  } catch (const DegenerateLayoutError& e) {
    ObjectiveVector out;
    for (const Objective& obj : registry) out.labels.push_back(obj.name);
    out.infeasible = true;
    out.reason = e.what();
    return out;
  }
  return evaluate_layout(layout_of(moved), registry);
}

}  // namespace sketchopt
