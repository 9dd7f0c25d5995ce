#pragma once

#include "sketchopt/geometry.hpp"
#include "sketchopt/vectorizer.hpp"

#include <map>
#include <optional>
#include <string>
#include <vector>

namespace sketchopt {

enum class ElementKind { wall };

std::string to_string(ElementKind kind);
ElementKind element_kind_from_string(const std::string& s);

struct Edge {
  int a = 0;
  int b = 0;
  ElementKind kind = ElementKind::wall;
};

struct WallAxis {
  Vec2 direction;             // unit, canonical (leading nonzero component positive)
  std::vector<int> node_ids;  // strictly increasing projection on `direction`
  std::vector<int> edge_ids;
  Vec2 anchor;                // a point on the axis line

  /// Translation direction of the axis variable: the direction turned a
  /// quarter counterclockwise as seen on the y-down sketch, (d.y, -d.x).
  /// A vertical axis therefore moves toward +x and a horizontal one toward -y.
  Vec2 normal() const { return {direction.y, -direction.x}; }
};

enum class GroupCriterion { by_axis, by_connectivity, by_adjacent_nodes };

struct Grouping {
  GroupCriterion criterion = GroupCriterion::by_axis;
  double radius = 0.0;  // by_adjacent_nodes only

  /// "by_axis", "by_connectivity" or "by_adjacent_nodes(<r>)".
  static Grouping parse(const std::string& s);
  std::string tag() const;
};

struct Group {
  std::string criterion;  // Grouping::tag()
  std::vector<int> node_ids;
};

struct ParametricGraph {
  std::map<int, Vec2> nodes;
  std::map<int, Edge> edges;
  std::map<int, WallAxis> axes;
  std::map<int, Group> groups;
  double snap_tol = 4.0;
  double collinear_tol = 1e-6;

  const WallAxis& axis(int id) const;
  /// Edge ids incident to each node.
  std::map<int, std::vector<int>> incidence() const;
};

struct BuildParams {
  double snap_tol = 4.0;
};

/// Planarize a scene into nodes and wall edges: endpoints within snap_tol
/// fuse at their centroid, endpoints touching another segment's interior
/// split it (T-junctions), and proper crossings split both segments.
/// Every edge starts as its own axis.
ParametricGraph build_graph(const VectorScene& scene, const BuildParams& params = {});

/// Fuse maximal chains of edges that share nodes and agree in direction
/// within angle_tol into wall axes. Member nodes are moved onto the fitted
/// axis lines (onto the line intersection for nodes shared by two axes).
ParametricGraph merge_collinear(const ParametricGraph& graph, double angle_tol = deg2rad(5.0),
                                double collinear_tol = 1e-6);

ParametricGraph group_elements(const ParametricGraph& graph, const Grouping& grouping);

/// The axis node array, including junction nodes of crossing axes, ordered
/// by projection on the axis direction.
std::vector<int> collect_axis_nodes(const ParametricGraph& graph, int axis_id);

/// Slide an axis along its normal by `delta`. Incident edges stretch; the
/// topology is unchanged. Throws DegenerateLayoutError when the result would
/// collapse or invert an edge, bring two nodes within snap_tol, or create a
/// crossing between edges that share no node.
ParametricGraph apply_translation(const ParametricGraph& graph, int axis_id, double delta);

/// Reason the geometry is degenerate, or nullopt. `reference` supplies the
/// edge directions that must not reverse.
std::optional<std::string> degeneracy(const ParametricGraph& graph, const ParametricGraph* reference = nullptr);

struct DesignVariable {
  int id = 0;
  int axis_id = 0;
  double lo = 0.0;
  double hi = 0.0;
  /// Annotation stem this variable came from; absent for manual variables.
  std::optional<std::pair<Vec2, Vec2>> source_stem;
};

using Assignment = std::map<int, double>;  // variable id -> value

struct FloorplanLayout {
  std::vector<std::vector<Vec2>> polylines;  // one per axis, in axis-id order
  std::map<int, Vec2> node_positions;
};

/// Apply every assigned variable in ascending id order and emit the layout.
/// Unassigned variables stay at 0. Throws RangeError for values outside a
/// variable's range or ids that name no variable.
FloorplanLayout instantiate(const ParametricGraph& graph, const Assignment& assignment,
                            const std::vector<DesignVariable>& variables);

/// Graph after applying the assignment; instantiate() emits its polylines.
ParametricGraph transform(const ParametricGraph& graph, const Assignment& assignment,
                          const std::vector<DesignVariable>& variables);

FloorplanLayout layout_of(const ParametricGraph& graph);

/// Invariant checks; each returns human-readable violations (empty = ok).
std::vector<std::string> check_graph(const ParametricGraph& graph);
std::vector<std::string> check_layout(const ParametricGraph& base, const ParametricGraph& moved,
                                      const FloorplanLayout& layout);

}  // namespace sketchopt
