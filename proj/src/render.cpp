#include "sketchopt/render.hpp"

#include "sketchopt/errors.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <sstream>

namespace sketchopt {

std::string format_number(double v) {
  if (v == 0.0) return "0";
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

namespace {

std::string xml_escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      default: out += c;
    }
  }
  return out;
}

std::string pt(Vec2 p) { return format_number(p.x) + "," + format_number(p.y); }

}  // namespace

std::string render_svg(const RenderRequest& req) {
  if (!req.graph || !req.variables) throw ParamError("render needs a graph and its variables");
  const ParametricGraph moved = transform(*req.graph, req.assignment, *req.variables);
  const FloorplanLayout layout = layout_of(moved);

  int width = req.width, height = req.height;
  if (width <= 0 || height <= 0) {
    double mx = 1.0, my = 1.0;
    for (const auto& [id, p] : layout.node_positions) {
      mx = std::max(mx, p.x);
      my = std::max(my, p.y);
    }
    width = static_cast<int>(std::ceil(mx)) + 20;
    height = static_cast<int>(std::ceil(my)) + 20;
  }

  std::ostringstream os;
  os << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
     << "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\"" << width << "\" height=\"" << height
     << "\" viewBox=\"0 0 " << width << " " << height << "\">\n";
  if (!req.title.empty()) os << "  <title>" << xml_escape(req.title) << "</title>\n";
  os << "  <defs>\n"
     << "    <marker id=\"arrow\" viewBox=\"0 0 10 10\" refX=\"10\" refY=\"5\" markerWidth=\"6\" markerHeight=\"6\" "
        "orient=\"auto-start-reverse\"><path d=\"M0,0 L10,5 L0,10 z\" fill=\"#c0392b\"/></marker>\n"
     << "  </defs>\n"
     << "  <rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n"
     // Sketch pixels are y-down; flip so the plan reads y-up.
     << "  <g id=\"plan\" transform=\"translate(0," << height << ") scale(1,-1)\">\n";

  os << "    <g id=\"walls\" fill=\"none\" stroke=\"black\" stroke-width=\"2\" stroke-linecap=\"square\">\n";
  std::size_t k = 0;
  for (const auto& [aid, ax] : moved.axes) {
    os << "      <polyline class=\"wall\" data-axis=\"" << aid << "\" points=\"";
    const auto& pl = layout.polylines[k++];
    for (std::size_t i = 0; i < pl.size(); ++i) os << (i ? " " : "") << pt(pl[i]);
    os << "\"/>\n";
  }
  os << "    </g>\n";

  os << "    <g id=\"columns\" fill=\"#2c3e50\">\n";
  for (const auto& [id, p] : layout.node_positions)
    os << "      <circle class=\"column\" data-node=\"" << id << "\" cx=\"" << format_number(p.x) << "\" cy=\""
       << format_number(p.y) << "\" r=\"4\"/>\n";
  os << "    </g>\n";

  os << "    <g id=\"ranges\" stroke=\"#c0392b\" stroke-width=\"1.5\" stroke-dasharray=\"6 4\" fill=\"none\">\n";
  for (const DesignVariable& v : *req.variables) {
    const WallAxis& ax = moved.axis(v.axis_id);
    const Vec2 mid = (moved.nodes.at(ax.node_ids.front()) + moved.nodes.at(ax.node_ids.back())) * 0.5;
    const auto it = req.assignment.find(v.id);
    const double value = it == req.assignment.end() ? 0.0 : it->second;
    // The arrow spans the variable's whole range around the drawn position.
    const Vec2 a = mid + ax.normal() * (v.lo - value);
    const Vec2 b = mid + ax.normal() * (v.hi - value);
    os << "      <line class=\"range\" data-variable=\"" << v.id << "\" x1=\"" << format_number(a.x) << "\" y1=\""
       << format_number(a.y) << "\" x2=\"" << format_number(b.x) << "\" y2=\"" << format_number(b.y)
       << "\" marker-start=\"url(#arrow)\" marker-end=\"url(#arrow)\"/>\n";
  }
  os << "    </g>\n  </g>\n</svg>\n";
  return os.str();
}

}  // namespace sketchopt
