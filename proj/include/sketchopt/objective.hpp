#pragma once

#include "sketchopt/parametrizer.hpp"

#include <functional>
#include <string>
#include <vector>

namespace sketchopt {

enum class BeamLevel { top, bottom };

struct Beam {
  Vec2 p0;
  Vec2 p1;
  BeamLevel level = BeamLevel::top;
  double length() const { return distance(p0, p1); }
};

struct WallPanel {
  Vec2 p0;
  Vec2 p1;
  double length = 0.0;
};

/// Columns at every node, a top and bottom beam along every wall edge, and one
/// panel per wall edge.
struct StructuralModel {
  std::vector<Vec2> columns;
  std::vector<Beam> beams;
  std::vector<WallPanel> panels;
};

/// Wall edges are the consecutive point pairs of each polyline.
StructuralModel build_structural_model(const FloorplanLayout& layout);

/// Sum of squared beam lengths: a uniform-load bending moment surrogate.
double stress_proxy(const StructuralModel& model);

/// Distance between the length-weighted panel centroid (center of mass) and
/// the center of rigidity, with panel stiffness L^exponent. A panel at angle
/// t resists x with weight sin^2 t and y with weight cos^2 t. A direction no
/// panel resists takes the center-of-mass coordinate.
double torsion_proxy(const StructuralModel& model, double stiffness_exponent = 3.0);

/// |convex hull area of the layout nodes - target|.
double area_deviation(const FloorplanLayout& layout, double target);

double convex_hull_area(std::vector<Vec2> points);

struct ObjectiveOptions {
  double stiffness_exponent = 3.0;
  double area_target = 0.0;
};

struct Objective {
  std::string name;
  std::function<double(const FloorplanLayout&, const StructuralModel&)> evaluate;
};

using ObjectiveRegistry = std::vector<Objective>;

/// Known names: "stress", "torsion", "area_deviation". Unknown or empty -> ConfigError.
ObjectiveRegistry make_registry(const std::vector<std::string>& names, const ObjectiveOptions& options = {});

struct ObjectiveVector {
  std::vector<double> values;  // minimization sense, empty when infeasible
  std::vector<std::string> labels;
  bool infeasible = false;
  std::string reason;
};

/// Instantiate and evaluate every registered objective in order. Degenerate
/// layouts come back flagged infeasible; a failing or non-finite objective
/// raises ObjectiveError naming it. RangeError propagates.
ObjectiveVector evaluate_objectives(const ParametricGraph& graph, const std::vector<DesignVariable>& variables,
                                    const Assignment& assignment, const ObjectiveRegistry& registry);

ObjectiveVector evaluate_layout(const FloorplanLayout& layout, const ObjectiveRegistry& registry);

}  // namespace sketchopt
