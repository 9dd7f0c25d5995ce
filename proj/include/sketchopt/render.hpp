#pragma once

#include "sketchopt/parametrizer.hpp"

#include <string>
#include <vector>

namespace sketchopt {

/// Shortest decimal text that reads back as the same double.
std::string format_number(double v);

struct RenderRequest {
  const ParametricGraph* graph = nullptr;  // base graph
  const std::vector<DesignVariable>* variables = nullptr;
  Assignment assignment;
  int width = 0;  // sketch extent; 0 derives it from the geometry
  int height = 0;
  std::string title;
};

/// SVG 1.1 document of the instantiated layout: wall polylines (stroke width
/// 2), columns as circles at every node, and each variable's range as a
/// dashed double arrow across its axis. Coordinates are sketch pixels; the
/// drawing group flips y so the plan reads y-up. Throws RangeError and
/// DegenerateLayoutError like instantiate().
std::string render_svg(const RenderRequest& request);

}  // namespace sketchopt
