#pragma once

#include "sketchopt/annotation.hpp"
#include "sketchopt/parametrizer.hpp"
#include "sketchopt/synth.hpp"
#include "sketchopt/vectorizer.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

namespace sketchopt::testing {

inline LineSegment seg(double x0, double y0, double x1, double y1) { return {{x0, y0}, {x1, y1}, 1.0, 1.0}; }

inline VectorScene scene_of(std::vector<LineSegment> segments, int width = 64, int height = 64) {
  VectorScene s;
  s.segments = std::move(segments);
  s.width = width;
  s.height = height;
  s.luminosity_range = 1.0;
  return s;
}

inline VectorScene square_scene(double side = 10.0) {
  return scene_of({seg(0, 0, side, 0), seg(side, 0, side, side), seg(side, side, 0, side), seg(0, side, 0, 0)});
}

inline ParametricGraph merged(const VectorScene& scene, double snap_tol = 4.0) {
  BuildParams bp;
  bp.snap_tol = snap_tol;
  return merge_collinear(build_graph(scene, bp));
}

/// Id of the axis whose line is x = c (vertical) or y = c (horizontal).
inline int axis_at(const ParametricGraph& g, bool vertical, double c, double tol = 1e-9) {
  for (const auto& [id, ax] : g.axes) {
    const bool v = std::abs(ax.direction.x) < 1e-12;
    const bool h = std::abs(ax.direction.y) < 1e-12;
    if (vertical && v && std::abs(ax.anchor.x - c) <= tol) return id;
    if (!vertical && h && std::abs(ax.anchor.y - c) <= tol) return id;
  }
  throw std::runtime_error("no axis at " + std::to_string(c));
}

inline int node_at(const ParametricGraph& g, Vec2 p, double tol = 1e-9) {
  for (const auto& [id, q] : g.nodes)
    if (distance(p, q) <= tol) return id;
  throw std::runtime_error("no node there");
}

/// Edge adjacency as sorted node pairs keyed by edge id.
inline std::vector<std::pair<int, std::pair<int, int>>> adjacency(const ParametricGraph& g) {
  std::vector<std::pair<int, std::pair<int, int>>> out;
  for (const auto& [id, e] : g.edges) out.push_back({id, {std::min(e.a, e.b), std::max(e.a, e.b)}});
  return out;
}

inline VectorScene wall_scene(const synth::Plan& plan) {
  synth::Plan walls = plan;
  walls.marks.clear();
  return synth::to_scene(walls);
}

// Ground-truth matching for the vectorizer corpus.
struct RecallTally {
  int walls = 0;
  int hits = 0;
  int segments = 0;
  int spurious = 0;
  double recall() const { return walls ? static_cast<double>(hits) / walls : 1.0; }
  double spurious_rate() const { return segments ? static_cast<double>(spurious) / segments : 0.0; }
};

inline bool recovers(const LineSegment& s, const synth::Stroke& w, double endpoint_tol = 2.0, double angle_tol_deg = 1.0) {
  const double e1 = std::max(distance(s.p0, w.a), distance(s.p1, w.b));
  const double e2 = std::max(distance(s.p0, w.b), distance(s.p1, w.a));
  const double ang = rad2deg(angle_between_lines(s.angle(), line_angle(w.b - w.a)));
  return std::min(e1, e2) <= endpoint_tol && ang <= angle_tol_deg;
}

inline bool lies_on_some_wall(const LineSegment& s, const std::vector<synth::Stroke>& walls, double tol = 2.0) {
  for (const synth::Stroke& w : walls)
    if (std::max(point_segment_distance(s.p0, w.a, w.b), point_segment_distance(s.p1, w.a, w.b)) <= tol) return true;
  return false;
}

inline void tally(RecallTally& t, const synth::Plan& plan, const VectorScene& scene, double min_length) {
  for (const synth::Stroke& w : plan.walls) {
    ++t.walls;
    t.hits += std::any_of(scene.segments.begin(), scene.segments.end(),
                          [&](const LineSegment& s) { return recovers(s, w); });
  }
  for (const LineSegment& s : scene.segments) {
    if (s.length() <= min_length) continue;
    ++t.segments;
    t.spurious += !lies_on_some_wall(s, plan.walls);
  }
}

/// Add up to n I-marks to a plan, each straddling a distinct wall away from
/// every other wall and mark. Returns the walls marked, in mark order.
inline std::vector<std::size_t> add_marks(synth::Plan& plan, int n, std::mt19937_64& rng, double min_len = 16.0,
                                          double max_len = 32.0, double cap_ratio = 0.35) {
  auto uni = [&](double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng); };
  std::vector<std::size_t> order(plan.walls.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::shuffle(order.begin(), order.end(), rng);
  std::vector<std::size_t> marked;
  for (std::size_t wi : order) {
    if (static_cast<int>(marked.size()) >= n) break;
    const synth::Stroke& w = plan.walls[wi];
    const Vec2 u = normalized(w.b - w.a);
    const Vec2 nrm{-u.y, u.x};
    for (int attempt = 0; attempt < 30; ++attempt) {
      const double len = std::round(uni(min_len, max_len));
      const Vec2 c = w.a + (w.b - w.a) * uni(0.2, 0.8) + nrm * uni(-4.0, 4.0);
      synth::Mark m{c - nrm * (0.5 * len), c + nrm * (0.5 * len), std::round(cap_ratio * len), 1, 0.9};
      bool clear = true;
      for (const synth::Stroke& s : m.strokes()) {
        for (std::size_t oi = 0; oi < plan.walls.size() && clear; ++oi) {
          if (oi == wi) continue;
          const synth::Stroke& o = plan.walls[oi];
          for (double t = 0.0; t <= 1.0 + 1e-12 && clear; t += 0.125)
            clear = point_segment_distance(s.a + (s.b - s.a) * t, o.a, o.b) > 12.0;
        }
        // Caps stay clear of the host wall so they never read as wall pieces.
        if (s.a != m.stem_p0 || s.b != m.stem_p1)
          clear = clear && std::min(point_segment_distance(s.a, w.a, w.b), point_segment_distance(s.b, w.a, w.b)) > 4.0;
      }
      for (const synth::Mark& o : plan.marks) clear = clear && distance(o.stem_p0 + o.stem_p1, m.stem_p0 + m.stem_p1) > 160.0;
      if (!clear) continue;
      plan.marks.push_back(m);
      marked.push_back(wi);
      break;
    }
  }
  return marked;
}

inline std::filesystem::path data_dir() { return SKETCHOPT_DATA_DIR; }

inline std::filesystem::path scratch_dir(const std::string& name) {
  const auto dir = std::filesystem::temp_directory_path() / ("sketchopt_test_" + name);
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

}  // namespace sketchopt::testing
