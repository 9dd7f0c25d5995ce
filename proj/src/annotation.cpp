#include "sketchopt/annotation.hpp"

#include "sketchopt/errors.hpp"

#include <algorithm>
#include <numeric>
#include <optional>
#include <set>
#include <sstream>
#include <tuple>

namespace sketchopt {

namespace {

std::string fmt_num(double v) {
  std::ostringstream os;
  os << v;
  return os.str();
}

std::string fmt_point(Vec2 p) {
  std::ostringstream os;
  os << "(" << p.x << ", " << p.y << ")";
  return os.str();
}

bool perpendicular(const LineSegment& a, const LineSegment& b, double tol_deg) {
  return angle_between_lines(a.angle(), b.angle()) >= deg2rad(90.0 - tol_deg);
}

// Attachment distance of a cap to a stem end, or nullopt if the cap cannot
// serve as that end's cap.
std::optional<double> cap_attachment(const LineSegment& stem, Vec2 end, const LineSegment& cap,
                                     const AnnotationParams& p) {
  if (!perpendicular(stem, cap, p.perpendicular_tol_deg)) return std::nullopt;
  if (!(cap.length() < p.max_cap_ratio * stem.length())) return std::nullopt;
  double t = 0.0;
  const double d = point_segment_distance(end, cap.p0, cap.p1, &t);
  if (d > p.attach_tol || t < p.cap_middle_lo || t > p.cap_middle_hi) return std::nullopt;
  return d;
}

std::vector<std::size_t> by_length_desc(const std::vector<LineSegment>& segs) {
  std::vector<std::size_t> order(segs.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return segs[a].length() > segs[b].length(); });
  return order;
}

VectorScene with_segments(const VectorScene& like, std::vector<LineSegment> segs) {
  VectorScene out = like;
  out.segments = std::move(segs);
  return out;
}

}  // namespace

SplitResult split_annotation_strokes(const VectorScene& scene, const AnnotationParams& params) {
  const auto& segs = scene.segments;
  const std::size_t n = segs.size();
  std::vector<int> owner(n, -1);  // mark index owning each segment

  // A cap's free ends touch nothing but the cap itself.
  auto cap_is_free = [&](std::size_t cap, std::size_t stem) {
    for (Vec2 e : {segs[cap].p0, segs[cap].p1})
      for (std::size_t k = 0; k < n; ++k) {
        if (k == cap || k == stem) continue;
        if (point_segment_distance(e, segs[k].p0, segs[k].p1) <= params.attach_tol) return false;
      }
    return true;
  };

  std::vector<std::array<std::size_t, 3>> triples;
  for (std::size_t s : by_length_desc(segs)) {
    if (owner[s] >= 0) continue;
    std::array<std::optional<std::size_t>, 2> cap;
    std::array<double, 2> best{};
    const std::array<Vec2, 2> ends{segs[s].p0, segs[s].p1};
    for (int e = 0; e < 2; ++e) {
      for (std::size_t c = 0; c < n; ++c) {
        if (c == s || owner[c] >= 0) continue;
        const auto d = cap_attachment(segs[s], ends[static_cast<std::size_t>(e)], segs[c], params);
        if (!d || (cap[static_cast<std::size_t>(e)] && *d >= best[static_cast<std::size_t>(e)])) continue;
        if (!cap_is_free(c, s)) continue;
        cap[static_cast<std::size_t>(e)] = c;
        best[static_cast<std::size_t>(e)] = *d;
      }
    }
    if (!cap[0] || !cap[1] || *cap[0] == *cap[1]) continue;
    const int id = static_cast<int>(triples.size());
    triples.push_back({s, *cap[0], *cap[1]});
    owner[s] = owner[*cap[0]] = owner[*cap[1]] = id;
  }

  std::vector<LineSegment> layout, marks;
  for (std::size_t i = 0; i < n; ++i)
    if (owner[i] < 0) layout.push_back(segs[i]);
  for (const auto& t : triples)
    for (std::size_t i : t) marks.push_back(segs[i]);
  return {with_segments(scene, std::move(layout)), with_segments(scene, std::move(marks))};
}

DetectResult detect_annotations(const VectorScene& marks_raw, const AnnotationParams& params) {
  const auto& segs = marks_raw.segments;
  const std::size_t n = segs.size();
  std::vector<bool> used(n, false);
  DetectResult out;

  for (std::size_t s : by_length_desc(segs)) {
    if (used[s]) continue;
    used[s] = true;
    const LineSegment& stem = segs[s];
    const std::array<Vec2, 2> ends{stem.p0, stem.p1};
    // Loose grouping: the nearest shorter stroke at each end. Whether it is a
    // proper cap is checked afterwards so malformed marks can be reported.
    std::array<std::optional<std::size_t>, 2> cap;
    for (int e = 0; e < 2; ++e) {
      double best = params.attach_tol;
      for (std::size_t c = 0; c < n; ++c) {
        if (used[c] || segs[c].length() >= stem.length()) continue;
        const double d = point_segment_distance(ends[static_cast<std::size_t>(e)], segs[c].p0, segs[c].p1);
        if (d <= best) {
          best = d;
          cap[static_cast<std::size_t>(e)] = c;
        }
      }
      if (cap[static_cast<std::size_t>(e)]) used[*cap[static_cast<std::size_t>(e)]] = true;
    }
    const std::string where = "stroke " + fmt_point(stem.p0) + "-" + fmt_point(stem.p1);
    const int found = (cap[0] ? 1 : 0) + (cap[1] ? 1 : 0);
    if (found < 2) {
      out.warnings.push_back("discarded mark at " + where + ": " + std::to_string(found) + " of 2 caps");
      continue;
    }
    bool ok = true;
    for (int e = 0; e < 2 && ok; ++e) {
      if (!cap_attachment(stem, ends[static_cast<std::size_t>(e)], segs[*cap[static_cast<std::size_t>(e)]], params)) {
        out.warnings.push_back("discarded mark at " + where + ": cap " + std::to_string(e) +
                               " is not a short perpendicular bar across the stem end");
        ok = false;
      }
    }
    if (!ok) continue;
    AnnotationMark m;
    m.stem_p0 = stem.p0;
    m.stem_p1 = stem.p1;
    m.caps = {segs[*cap[0]], segs[*cap[1]]};
    out.marks.push_back(m);
  }
  return out;
}

double axis_distance(const ParametricGraph& graph, int axis_id, Vec2 p) {
  const WallAxis& ax = graph.axis(axis_id);
  return point_segment_distance(p, graph.nodes.at(ax.node_ids.front()), graph.nodes.at(ax.node_ids.back()));
}

BindResult bind_annotations(const ParametricGraph& graph, const std::vector<AnnotationMark>& marks,
                            const BindParams& params) {
  if (!(params.search_radius > 0.0)) throw ParamError("search_radius must be positive");
  BindResult out;
  // (distance, mark index, axis id), taken nearest first.
  std::vector<std::tuple<double, std::size_t, int>> pairs;
  for (std::size_t m = 0; m < marks.size(); ++m) {
    const double stem_angle = line_angle(marks[m].direction());
    for (const auto& [aid, ax] : graph.axes) {
      if (angle_between_lines(line_angle(ax.normal()), stem_angle) > deg2rad(params.parallel_tol_deg)) continue;
      const double d = axis_distance(graph, aid, marks[m].center());
      if (d <= params.search_radius) pairs.emplace_back(d, m, aid);
    }
  }
  std::sort(pairs.begin(), pairs.end());
  std::vector<int> bound(marks.size(), -1);
  std::set<int> taken;
  for (const auto& [d, m, aid] : pairs) {
    if (bound[m] >= 0 || taken.count(aid)) continue;
    bound[m] = aid;
    taken.insert(aid);
  }
  for (std::size_t m = 0; m < marks.size(); ++m) {
    if (bound[m] < 0) {
      out.warnings.push_back("unbound mark at " + fmt_point(marks[m].center()) + ": no wall axis across the stem within " +
                             fmt_num(params.search_radius) + " px");
      continue;
    }
    DesignVariable v;
    v.id = static_cast<int>(out.variables.size());
    v.axis_id = bound[m];
    const double half = marks[m].length() / 2.0;
    v.lo = -half;
    v.hi = half;
    v.source_stem = std::pair{marks[m].stem_p0, marks[m].stem_p1};
    out.variables.push_back(v);
  }
  return out;
}

}  // namespace sketchopt
