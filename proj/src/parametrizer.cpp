#include "sketchopt/parametrizer.hpp"

#include "sketchopt/errors.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>
#include <sstream>

namespace sketchopt {

namespace {

class UnionFind {
public:
  explicit UnionFind(std::size_t n) : parent_(n) { std::iota(parent_.begin(), parent_.end(), std::size_t{0}); }
  std::size_t find(std::size_t i) {
    while (parent_[i] != i) i = parent_[i] = parent_[parent_[i]];
    return i;
  }
  // The smaller index becomes the root, so cluster order follows input order.
  void unite(std::size_t a, std::size_t b) {
    a = find(a);
    b = find(b);
    if (a == b) return;
    if (b < a) std::swap(a, b);
    parent_[b] = a;
  }

private:
  std::vector<std::size_t> parent_;
};

// Parameters of the proper intersection of [a0,a1] and [b0,b1], both strictly
// inside (0,1), or nullopt.
std::optional<std::pair<double, double>> proper_intersection(Vec2 a0, Vec2 a1, Vec2 b0, Vec2 b1) {
  const Vec2 r = a1 - a0;
  const Vec2 s = b1 - b0;
  const double den = cross(r, s);
  if (den == 0.0) return std::nullopt;
  const double t = cross(b0 - a0, s) / den;
  const double u = cross(b0 - a0, r) / den;
  if (t <= 0.0 || t >= 1.0 || u <= 0.0 || u >= 1.0) return std::nullopt;
  return std::pair{t, u};
}

// Working representation while planarizing.
struct Planar {
  std::vector<Vec2> pts;
  std::vector<std::pair<int, int>> edges;
};

// Fuse nodes closer than tol at their centroid; drop loops and duplicates.
bool fuse_close_nodes(Planar& g, double tol) {
  const std::size_t n = g.pts.size();
  UnionFind uf(n);
  bool any = false;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j)
      if (distance(g.pts[i], g.pts[j]) <= tol) {
        uf.unite(i, j);
        any = true;
      }
  if (!any) return false;
  std::vector<int> remap(n, -1);
  std::vector<Vec2> sum;
  std::vector<int> count;
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t r = uf.find(i);
    if (remap[r] < 0) {
      remap[r] = static_cast<int>(sum.size());
      sum.push_back({});
      count.push_back(0);
    }
    remap[i] = remap[r];
    sum[static_cast<std::size_t>(remap[i])] += g.pts[i];
    ++count[static_cast<std::size_t>(remap[i])];
  }
  g.pts.clear();
  for (std::size_t k = 0; k < sum.size(); ++k) g.pts.push_back(sum[k] / count[k]);
  std::set<std::pair<int, int>> seen;
  std::vector<std::pair<int, int>> edges;
  for (auto [a, b] : g.edges) {
    a = remap[static_cast<std::size_t>(a)];
    b = remap[static_cast<std::size_t>(b)];
    if (a == b) continue;
    if (seen.insert(std::minmax(a, b)).second) edges.push_back({a, b});
  }
  g.edges = std::move(edges);
  return true;
}

// Split one edge at a node lying on its interior (T-junction); the node is
// projected onto the edge. Returns after the first split.
bool split_one_t_junction(Planar& g, double tol) {
  for (std::size_t n = 0; n < g.pts.size(); ++n) {
    for (std::size_t e = 0; e < g.edges.size(); ++e) {
      const auto [a, b] = g.edges[e];
      if (a == static_cast<int>(n) || b == static_cast<int>(n)) continue;
      const Vec2 pa = g.pts[static_cast<std::size_t>(a)];
      const Vec2 pb = g.pts[static_cast<std::size_t>(b)];
      double t = 0.0;
      if (point_segment_distance(g.pts[n], pa, pb, &t) > tol) continue;
      if (distance(g.pts[n], pa) <= tol || distance(g.pts[n], pb) <= tol) continue;
      g.pts[n] = pa + (pb - pa) * t;
      g.edges[e] = {a, static_cast<int>(n)};
      g.edges.push_back({static_cast<int>(n), b});
      return true;
    }
  }
  return false;
}

bool split_one_crossing(Planar& g, double tol) {
  for (std::size_t i = 0; i < g.edges.size(); ++i) {
    for (std::size_t j = i + 1; j < g.edges.size(); ++j) {
      const auto [a, b] = g.edges[i];
      const auto [c, d] = g.edges[j];
      if (a == c || a == d || b == c || b == d) continue;
      const Vec2 pa = g.pts[static_cast<std::size_t>(a)], pb = g.pts[static_cast<std::size_t>(b)];
      const Vec2 pc = g.pts[static_cast<std::size_t>(c)], pd = g.pts[static_cast<std::size_t>(d)];
      const auto hit = proper_intersection(pa, pb, pc, pd);
      if (!hit) continue;
      const Vec2 x = pa + (pb - pa) * hit->first;
      // Near an endpoint this is a T-junction; the T rule handles it.
      if (std::min({distance(x, pa), distance(x, pb), distance(x, pc), distance(x, pd)}) <= tol) continue;
      const int m = static_cast<int>(g.pts.size());
      g.pts.push_back(x);
      g.edges[i] = {a, m};
      g.edges[j] = {c, m};
      g.edges.push_back({m, b});
      g.edges.push_back({m, d});
      return true;
    }
  }
  return false;
}

WallAxis singleton_axis(const ParametricGraph& g, int edge_id) {
  const Edge& e = g.edges.at(edge_id);
  const Vec2 pa = g.nodes.at(e.a);
  const Vec2 pb = g.nodes.at(e.b);
  WallAxis ax;
  ax.direction = canonical_direction(normalized(pb - pa));
  ax.edge_ids = {edge_id};
  ax.node_ids = dot(pa, ax.direction) < dot(pb, ax.direction) ? std::vector<int>{e.a, e.b} : std::vector<int>{e.b, e.a};
  ax.anchor = g.nodes.at(ax.node_ids.front());
  return ax;
}

void sort_axis_nodes(const ParametricGraph& g, WallAxis& ax) {
  std::stable_sort(ax.node_ids.begin(), ax.node_ids.end(), [&](int a, int b) {
    return dot(g.nodes.at(a), ax.direction) < dot(g.nodes.at(b), ax.direction);
  });
}

// Directions within 1e-4 rad of an image axis become exact. Besides absorbing
// round-off, this keeps a nearly vertical traced wall from getting direction
// (eps, -1) and with it a normal pointing the opposite way from its neighbors.
Vec2 clean_direction(Vec2 d) {
  constexpr double kAxisSnap = 1e-4;
  if (std::abs(d.y) < kAxisSnap * std::abs(d.x)) return {1.0, 0.0};
  if (std::abs(d.x) < kAxisSnap * std::abs(d.y)) return {0.0, 1.0};
  return canonical_direction(d);
}

bool segments_touch_or_cross(Vec2 a0, Vec2 a1, Vec2 b0, Vec2 b1) { return proper_intersection(a0, a1, b0, b1).has_value(); }

}  // namespace

std::string to_string(ElementKind kind) {
  switch (kind) {
    case ElementKind::wall:
      return "wall";
  }
  return "wall";
}

ElementKind element_kind_from_string(const std::string& s) {
  if (s == "wall") return ElementKind::wall;
  throw SchemaError("unknown element kind '" + s + "'");
}

Grouping Grouping::parse(const std::string& s) {
  if (s == "by_axis") return {GroupCriterion::by_axis, 0.0};
  if (s == "by_connectivity") return {GroupCriterion::by_connectivity, 0.0};
  const std::string prefix = "by_adjacent_nodes(";
  if (s.rfind(prefix, 0) == 0 && s.size() > prefix.size() + 1 && s.back() == ')') {
    const std::string arg = s.substr(prefix.size(), s.size() - prefix.size() - 1);
    std::size_t used = 0;
    double r = 0.0;
    try {
      r = std::stod(arg, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used == arg.size() && std::isfinite(r) && r > 0.0) return {GroupCriterion::by_adjacent_nodes, r};
  }
  throw ParamError("unknown grouping criterion '" + s + "'");
}

std::string Grouping::tag() const {
  switch (criterion) {
    case GroupCriterion::by_axis:
      return "by_axis";
    case GroupCriterion::by_connectivity:
      return "by_connectivity";
    case GroupCriterion::by_adjacent_nodes: {
      std::ostringstream os;
      os << "by_adjacent_nodes(" << radius << ")";
      return os.str();
    }
  }
  return "";
}

const WallAxis& ParametricGraph::axis(int id) const {
  auto it = axes.find(id);
  if (it == axes.end()) throw NotFoundError("no axis with id " + std::to_string(id));
  return it->second;
}

std::map<int, std::vector<int>> ParametricGraph::incidence() const {
  std::map<int, std::vector<int>> inc;
  for (const auto& [id, n] : nodes) inc[id];
  for (const auto& [id, e] : edges) {
    inc[e.a].push_back(id);
    inc[e.b].push_back(id);
  }
  return inc;
}

ParametricGraph build_graph(const VectorScene& scene, const BuildParams& params) {
  if (scene.segments.empty()) throw EmptySceneError("scene has no segments");
  if (!(params.snap_tol > 0.0) || !std::isfinite(params.snap_tol)) throw ParamError("snap_tol must be positive");
  const double tol = params.snap_tol;

  Planar g;
  for (const LineSegment& s : scene.segments) {
    const int a = static_cast<int>(g.pts.size());
    g.pts.push_back(s.p0);
    g.pts.push_back(s.p1);
    g.edges.push_back({a, a + 1});
  }
  fuse_close_nodes(g, tol);
  // Each pass either splits an edge or fuses nodes; the cap only guards
  // against pathological input oscillating under projection.
  for (int pass = 0; pass < 100000; ++pass) {
    if (split_one_t_junction(g, tol) || split_one_crossing(g, tol)) {
      fuse_close_nodes(g, tol);
      continue;
    }
    if (fuse_close_nodes(g, tol)) continue;
    break;
  }
  if (g.edges.empty()) throw EmptySceneError("every segment is shorter than the snap tolerance");

  // Renumber densely, nodes in first-use order.
  ParametricGraph out;
  out.snap_tol = tol;
  std::vector<int> id(g.pts.size(), -1);
  int next = 0;
  for (const auto& [a, b] : g.edges)
    for (int v : {a, b})
      if (id[static_cast<std::size_t>(v)] < 0) {
        id[static_cast<std::size_t>(v)] = next++;
        out.nodes[id[static_cast<std::size_t>(v)]] = g.pts[static_cast<std::size_t>(v)];
      }
  int eid = 0;
  for (const auto& [a, b] : g.edges) out.edges[eid++] = {id[static_cast<std::size_t>(a)], id[static_cast<std::size_t>(b)], ElementKind::wall};
  for (const auto& [e, edge] : out.edges) out.axes[e] = singleton_axis(out, e);
  return out;
}

ParametricGraph merge_collinear(const ParametricGraph& graph, double angle_tol, double collinear_tol) {
  if (!(angle_tol >= 0.0) || !(collinear_tol > 0.0)) throw ParamError("invalid merge tolerances");
  ParametricGraph out = graph;
  out.collinear_tol = collinear_tol;
  out.axes.clear();
  if (graph.edges.empty()) return out;

  std::vector<int> edge_ids;
  std::map<int, std::size_t> slot;
  for (const auto& [id, e] : graph.edges) {
    slot[id] = edge_ids.size();
    edge_ids.push_back(id);
  }
  UnionFind uf(edge_ids.size());
  const auto inc = graph.incidence();
  for (const auto& [node, es] : inc) {
    const Vec2 p = graph.nodes.at(node);
    auto away = [&](int e) {
      const Edge& ed = graph.edges.at(e);
      return normalized(graph.nodes.at(ed.a == node ? ed.b : ed.a) - p);
    };
    for (std::size_t i = 0; i < es.size(); ++i) {
      for (std::size_t j = i + 1; j < es.size(); ++j) {
        const Vec2 u = away(es[i]);
        const Vec2 v = away(es[j]);
        // Continuations leave the shared node in opposite directions.
        if (dot(u, v) >= 0.0) continue;
        if (angle_between_lines(line_angle(u), line_angle(v)) > angle_tol) continue;
        uf.unite(slot[es[i]], slot[es[j]]);
      }
    }
  }

  std::map<std::size_t, std::vector<int>> chains;  // root -> edge ids, root is the smallest slot
  for (std::size_t k = 0; k < edge_ids.size(); ++k) chains[uf.find(k)].push_back(edge_ids[k]);

  // Fit each chain: doubled-angle mean direction, length-weighted offset.
  struct Line {
    Vec2 d;
    Vec2 n;
    double c;
  };
  std::vector<Line> lines;
  std::vector<std::vector<int>> chain_edges;
  for (const auto& [root, es] : chains) {
    double sx = 0.0, sy = 0.0, wsum = 0.0;
    for (int e : es) {
      const Vec2 v = graph.nodes.at(graph.edges.at(e).b) - graph.nodes.at(graph.edges.at(e).a);
      const double len = norm(v);
      const double th = 2.0 * line_angle(v);
      sx += len * std::cos(th);
      sy += len * std::sin(th);
      wsum += len;
    }
    const double th = 0.5 * std::atan2(sy, sx);
    Line ln;
    ln.d = es.size() == 1 ? clean_direction(normalized(graph.nodes.at(graph.edges.at(es[0]).b) -
                                                       graph.nodes.at(graph.edges.at(es[0]).a)))
                          : clean_direction({std::cos(th), std::sin(th)});
    ln.n = {ln.d.y, -ln.d.x};
    double c = 0.0;
    for (int e : es) {
      const Vec2 pa = graph.nodes.at(graph.edges.at(e).a);
      const Vec2 pb = graph.nodes.at(graph.edges.at(e).b);
      c += distance(pa, pb) * dot(ln.n, (pa + pb) * 0.5);
    }
    ln.c = c / wsum;
    lines.push_back(ln);
    chain_edges.push_back(es);
  }

  // Straighten: nodes on one axis are projected onto it, nodes on two
  // non-parallel axes go to the line intersection.
  std::map<int, std::vector<std::size_t>> node_axes;
  for (std::size_t k = 0; k < chain_edges.size(); ++k)
    for (int e : chain_edges[k])
      for (int v : {graph.edges.at(e).a, graph.edges.at(e).b}) {
        auto& list = node_axes[v];
        if (std::find(list.begin(), list.end(), k) == list.end()) list.push_back(k);
      }
  for (const auto& [node, ks] : node_axes) {
    Vec2& p = out.nodes.at(node);
    const Line& l0 = lines[ks[0]];
    std::optional<std::size_t> other;
    double best = angle_tol;
    for (std::size_t i = 1; i < ks.size(); ++i) {
      const double a = angle_between_lines(line_angle(l0.d), line_angle(lines[ks[i]].d));
      if (a > best) {
        best = a;
        other = ks[i];
      }
    }
    Vec2 target;
    if (other) {
      const Line& l1 = lines[*other];
      // n0.x = c0, n1.x = c1
      const double det = cross(l0.n, l1.n);
      target = {(l0.c * l1.n.y - l1.c * l0.n.y) / det, (l0.n.x * l1.c - l1.n.x * l0.c) / det};
    } else {
      target = p + l0.n * (l0.c - dot(l0.n, p));
    }
    const double scale = 1.0 + std::max(std::abs(p.x), std::abs(p.y));
    if (distance(target, p) > 1e-12 * scale) p = target;
  }

  int aid = 0;
  for (std::size_t k = 0; k < chain_edges.size(); ++k) {
    WallAxis ax;
    ax.direction = lines[k].d;
    ax.edge_ids = chain_edges[k];
    std::sort(ax.edge_ids.begin(), ax.edge_ids.end());
    std::set<int> nodes;
    for (int e : ax.edge_ids) {
      nodes.insert(out.edges.at(e).a);
      nodes.insert(out.edges.at(e).b);
    }
    ax.node_ids.assign(nodes.begin(), nodes.end());
    sort_axis_nodes(out, ax);
    ax.anchor = out.nodes.at(ax.node_ids.front());
    out.axes[aid++] = std::move(ax);
  }
  return out;
}

ParametricGraph group_elements(const ParametricGraph& graph, const Grouping& grouping) {
  ParametricGraph out = graph;
  out.groups.clear();
  const std::string tag = grouping.tag();
  int gid = 0;
  switch (grouping.criterion) {
    case GroupCriterion::by_axis:
      for (const auto& [id, ax] : graph.axes) out.groups[gid++] = {tag, ax.node_ids};
      break;
    case GroupCriterion::by_connectivity:
    case GroupCriterion::by_adjacent_nodes: {
      std::vector<int> ids;
      std::map<int, std::size_t> slot;
      for (const auto& [id, p] : graph.nodes) {
        slot[id] = ids.size();
        ids.push_back(id);
      }
      UnionFind uf(ids.size());
      if (grouping.criterion == GroupCriterion::by_connectivity) {
        for (const auto& [id, e] : graph.edges) uf.unite(slot.at(e.a), slot.at(e.b));
      } else {
        if (!(grouping.radius > 0.0)) throw ParamError("by_adjacent_nodes needs a positive radius");
        for (std::size_t i = 0; i < ids.size(); ++i)
          for (std::size_t j = i + 1; j < ids.size(); ++j)
            if (distance(graph.nodes.at(ids[i]), graph.nodes.at(ids[j])) <= grouping.radius) uf.unite(i, j);
      }
      std::map<std::size_t, std::vector<int>> comps;
      for (std::size_t i = 0; i < ids.size(); ++i) comps[uf.find(i)].push_back(ids[i]);
      for (auto& [root, members] : comps) out.groups[gid++] = {tag, std::move(members)};
      break;
    }
  }
  return out;
}

std::vector<int> collect_axis_nodes(const ParametricGraph& graph, int axis_id) {
  const WallAxis& ax = graph.axis(axis_id);
  std::vector<int> ids = ax.node_ids;
  // Junctions contributed by crossing axes are nodes of this axis's edges
  // once the graph is planarized; pick up any that touch the axis line anyway.
  const Vec2 n = ax.normal();
  const double c = dot(n, ax.anchor);
  const double lo = dot(graph.nodes.at(ids.front()), ax.direction);
  const double hi = dot(graph.nodes.at(ids.back()), ax.direction);
  for (const auto& [oid, other] : graph.axes) {
    if (oid == axis_id) continue;
    for (int v : other.node_ids) {
      if (std::find(ids.begin(), ids.end(), v) != ids.end()) continue;
      const Vec2 p = graph.nodes.at(v);
      const double s = dot(p, ax.direction);
      if (std::abs(dot(n, p) - c) <= graph.collinear_tol && s >= lo && s <= hi) ids.push_back(v);
    }
  }
  std::stable_sort(ids.begin(), ids.end(), [&](int a, int b) {
    return dot(graph.nodes.at(a), ax.direction) < dot(graph.nodes.at(b), ax.direction);
  });
  return ids;
}

std::optional<std::string> degeneracy(const ParametricGraph& graph, const ParametricGraph* reference) {
  const double tol = graph.snap_tol;
  auto pos = [&](const ParametricGraph& g, int v) { return g.nodes.at(v); };

  for (const auto& [id, e] : graph.edges) {
    const Vec2 v = pos(graph, e.b) - pos(graph, e.a);
    if (norm(v) < tol) return "edge " + std::to_string(id) + " collapses below the snap tolerance";
    if (reference) {
      const Edge& r = reference->edges.at(id);
      if (dot(v, pos(*reference, r.b) - pos(*reference, r.a)) <= 0.0) return "edge " + std::to_string(id) + " reverses";
    }
  }

  std::vector<int> ids;
  for (const auto& [id, p] : graph.nodes) ids.push_back(id);
  for (std::size_t i = 0; i < ids.size(); ++i)
    for (std::size_t j = i + 1; j < ids.size(); ++j) {
      if (distance(pos(graph, ids[i]), pos(graph, ids[j])) >= tol) continue;
      if (reference && distance(pos(*reference, ids[i]), pos(*reference, ids[j])) < tol) continue;
      return "nodes " + std::to_string(ids[i]) + " and " + std::to_string(ids[j]) + " coincide";
    }

  // A node reaching into a foreign edge, or two foreign edges crossing,
  // would be a new junction: the topology would change.
  for (const auto& [eid, e] : graph.edges) {
    const Vec2 a = pos(graph, e.a), b = pos(graph, e.b);
    for (int v : ids) {
      if (v == e.a || v == e.b) continue;
      if (point_segment_distance(pos(graph, v), a, b) >= tol) continue;
      if (reference && point_segment_distance(pos(*reference, v), pos(*reference, e.a), pos(*reference, e.b)) < tol)
        continue;
      return "node " + std::to_string(v) + " touches edge " + std::to_string(eid);
    }
  }
  for (auto i = graph.edges.begin(); i != graph.edges.end(); ++i) {
    for (auto j = std::next(i); j != graph.edges.end(); ++j) {
      const Edge& e = i->second;
      const Edge& f = j->second;
      if (e.a == f.a || e.a == f.b || e.b == f.a || e.b == f.b) continue;
      if (!segments_touch_or_cross(pos(graph, e.a), pos(graph, e.b), pos(graph, f.a), pos(graph, f.b))) continue;
      return "edges " + std::to_string(i->first) + " and " + std::to_string(j->first) + " cross";
    }
  }
  return std::nullopt;
}

ParametricGraph apply_translation(const ParametricGraph& graph, int axis_id, double delta) {
  const WallAxis& ax = graph.axis(axis_id);
  if (!std::isfinite(delta)) throw ParamError("translation must be finite");
  ParametricGraph out = graph;
  if (delta == 0.0) return out;
  const Vec2 shift = ax.normal() * delta;
  std::set<int> moved(ax.node_ids.begin(), ax.node_ids.end());
  for (int v : moved) out.nodes.at(v) += shift;
  for (auto& [id, a] : out.axes) {
    const bool touched = std::any_of(a.node_ids.begin(), a.node_ids.end(), [&](int v) { return moved.count(v) > 0; });
    if (touched) a.anchor = out.nodes.at(a.node_ids.front());
  }
  if (auto why = degeneracy(out, &graph)) throw DegenerateLayoutError(*why);
  return out;
}

ParametricGraph transform(const ParametricGraph& graph, const Assignment& assignment,
                          const std::vector<DesignVariable>& variables) {
  std::map<int, const DesignVariable*> by_id;
  for (const DesignVariable& v : variables) by_id[v.id] = &v;
  for (const auto& [id, value] : assignment) {
    auto it = by_id.find(id);
    if (it == by_id.end()) throw RangeError("assignment names unknown variable " + std::to_string(id));
    const DesignVariable& v = *it->second;
    if (!std::isfinite(value) || value < v.lo || value > v.hi) {
      std::ostringstream os;
      os << "variable " << id << " = " << value << " outside [" << v.lo << ", " << v.hi << "]";
      throw RangeError(os.str());
    }
  }
  ParametricGraph g = graph;
  for (const auto& [id, v] : by_id) {
    auto it = assignment.find(id);
    if (it == assignment.end() || it->second == 0.0) continue;
    g = apply_translation(g, v->axis_id, it->second);
  }
  return g;
}

FloorplanLayout layout_of(const ParametricGraph& graph) {
  FloorplanLayout layout;
  layout.node_positions = graph.nodes;
  for (const auto& [id, ax] : graph.axes) {
    std::vector<Vec2> pts;
    for (int v : ax.node_ids) pts.push_back(graph.nodes.at(v));
    layout.polylines.push_back(std::move(pts));
  }
  return layout;
}

FloorplanLayout instantiate(const ParametricGraph& graph, const Assignment& assignment,
                            const std::vector<DesignVariable>& variables) {
  return layout_of(transform(graph, assignment, variables));
}

std::vector<std::string> check_graph(const ParametricGraph& g) {
  std::vector<std::string> bad;
  std::map<int, int> degree;
  for (const auto& [id, e] : g.edges) {
    if (!g.nodes.count(e.a) || !g.nodes.count(e.b)) bad.push_back("edge " + std::to_string(id) + " references a missing node");
    if (e.a == e.b) bad.push_back("edge " + std::to_string(id) + " is a loop");
    ++degree[e.a];
    ++degree[e.b];
  }
  if (!bad.empty()) return bad;
  for (auto i = g.nodes.begin(); i != g.nodes.end(); ++i) {
    if (!degree.count(i->first)) bad.push_back("node " + std::to_string(i->first) + " is an orphan");
    for (auto j = std::next(i); j != g.nodes.end(); ++j)
      if (distance(i->second, j->second) < g.snap_tol)
        bad.push_back("nodes " + std::to_string(i->first) + " and " + std::to_string(j->first) + " closer than snap_tol");
  }
  std::map<int, int> owner;
  for (const auto& [aid, ax] : g.axes) {
    const std::string tag = "axis " + std::to_string(aid);
    for (int e : ax.edge_ids) {
      if (!g.edges.count(e)) bad.push_back(tag + " references missing edge " + std::to_string(e));
      else if (!owner.emplace(e, aid).second) bad.push_back("edge " + std::to_string(e) + " belongs to two axes");
    }
    if (std::abs(norm(ax.direction) - 1.0) > 1e-9 || !(canonical_direction(ax.direction) == ax.direction))
      bad.push_back(tag + " direction is not canonical unit");
    const Vec2 n = ax.normal();
    const double c = dot(n, ax.anchor);
    double prev = -INFINITY;
    for (int v : ax.node_ids) {
      if (!g.nodes.count(v)) {
        bad.push_back(tag + " references missing node " + std::to_string(v));
        continue;
      }
      const Vec2 p = g.nodes.at(v);
      if (std::abs(dot(n, p) - c) > g.collinear_tol) bad.push_back(tag + " node " + std::to_string(v) + " off the axis line");
      const double s = dot(p, ax.direction);
      if (!(s > prev)) bad.push_back(tag + " node order not strictly increasing");
      prev = s;
    }
    std::set<std::pair<int, int>> member;
    for (int e : ax.edge_ids)
      if (g.edges.count(e)) member.insert(std::minmax(g.edges.at(e).a, g.edges.at(e).b));
    for (std::size_t k = 0; k + 1 < ax.node_ids.size(); ++k)
      if (!member.count(std::minmax(ax.node_ids[k], ax.node_ids[k + 1])))
        bad.push_back(tag + " is not continuous between consecutive nodes");
  }
  for (const auto& [id, e] : g.edges)
    if (!owner.count(id)) bad.push_back("edge " + std::to_string(id) + " belongs to no axis");
  return bad;
}

std::vector<std::string> check_layout(const ParametricGraph& base, const ParametricGraph& moved,
                                      const FloorplanLayout& layout) {
  std::vector<std::string> bad;
  if (base.edges.size() != moved.edges.size()) bad.push_back("edge count changed");
  for (const auto& [id, e] : base.edges) {
    auto it = moved.edges.find(id);
    if (it == moved.edges.end() || std::minmax(it->second.a, it->second.b) != std::minmax(e.a, e.b))
      bad.push_back("edge " + std::to_string(id) + " changed adjacency");
  }
  for (const auto& [aid, ax] : moved.axes) {
    const Vec2 n = ax.normal();
    const double c = dot(n, moved.nodes.at(ax.node_ids.front()));
    for (int v : ax.node_ids)
      if (std::abs(dot(n, moved.nodes.at(v)) - c) > 1e-9 * (1.0 + std::abs(c)))
        bad.push_back("axis " + std::to_string(aid) + " lost collinearity");
  }
  std::map<int, int> degree;
  for (const auto& [id, e] : base.edges) {
    ++degree[e.a];
    ++degree[e.b];
  }
  // Polyline ends must land on another polyline unless the base node was free.
  std::map<int, int> axis_of_end;
  for (std::size_t k = 0; k < layout.polylines.size(); ++k) {
    const auto& pl = layout.polylines[k];
    if (pl.size() < 2) {
      bad.push_back("polyline " + std::to_string(k) + " has fewer than two points");
      continue;
    }
    for (const Vec2& end : {pl.front(), pl.back()}) {
      bool free_end = false;
      for (const auto& [id, p] : moved.nodes)
        if (distance(p, end) <= 1e-9 && degree[id] == 1) free_end = true;
      if (free_end) continue;
      bool attached = false;
      for (std::size_t j = 0; j < layout.polylines.size() && !attached; ++j) {
        if (j == k) continue;
        for (const Vec2& q : layout.polylines[j])
          if (distance(q, end) <= 1e-9) attached = true;
      }
      if (!attached) bad.push_back("polyline " + std::to_string(k) + " has a dangling end");
    }
  }
  return bad;
}

}  // namespace sketchopt
