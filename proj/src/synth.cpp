#include "sketchopt/synth.hpp"

#include <algorithm>
#include <cmath>
#include <optional>

namespace sketchopt::synth {

std::vector<Stroke> Mark::strokes() const {
  const Vec2 u = normalized(stem_p1 - stem_p0);
  const Vec2 n{-u.y, u.x};
  const Vec2 h = n * (0.5 * cap_length);
  return {{stem_p0, stem_p1, width, contrast},
          {stem_p0 - h, stem_p0 + h, width, contrast},
          {stem_p1 - h, stem_p1 + h, width, contrast}};
}

namespace {

struct Room {
  double x0, y0, x1, y1;
};

// Centerline coordinate for a stroke of the given width: even widths sit
// between pixel centers.
double stroke_coord(int pixel, int width) { return pixel + (width % 2 == 0 ? 0.5 : 0.0); }

}  // namespace

Plan random_orthogonal_plan(std::mt19937_64& rng, const PlanOptions& opt) {
  auto uni = [&](double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng); };
  auto uint = [&](int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng); };

  Plan plan;
  plan.width = opt.width;
  plan.height = opt.height;
  const int target = uint(opt.min_walls, opt.max_walls);

  const int w_out = uint(opt.min_stroke, opt.max_stroke);
  const double x0 = stroke_coord(uint(30, opt.width / 8), w_out);
  const double y0 = stroke_coord(uint(30, opt.height / 8), w_out);
  const double x1 = stroke_coord(opt.width - uint(30, opt.width / 8), w_out);
  const double y1 = stroke_coord(opt.height - uint(30, opt.height / 8), w_out);
  auto contrast = [&]() { return uni(opt.min_contrast, opt.max_contrast); };
  plan.walls.push_back({{x0, y0}, {x1, y0}, w_out, 1.0});
  plan.walls.push_back({{x1, y0}, {x1, y1}, w_out, contrast()});
  plan.walls.push_back({{x0, y1}, {x1, y1}, w_out, contrast()});
  plan.walls.push_back({{x0, y0}, {x0, y1}, w_out, contrast()});

  std::vector<Room> rooms{{x0, y0, x1, y1}};
  while (static_cast<int>(plan.walls.size()) < target) {
    std::vector<std::size_t> splittable;
    for (std::size_t i = 0; i < rooms.size(); ++i) {
      const Room& r = rooms[i];
      if (std::max(r.x1 - r.x0, r.y1 - r.y0) >= 2.0 * opt.min_spacing + 2.0) splittable.push_back(i);
    }
    if (splittable.empty()) break;
    const std::size_t pick = splittable[static_cast<std::size_t>(uint(0, static_cast<int>(splittable.size()) - 1))];
    const Room r = rooms[pick];
    const double rw = r.x1 - r.x0;
    const double rh = r.y1 - r.y0;
    const bool can_v = rw >= 2.0 * opt.min_spacing + 2.0;
    const bool can_h = rh >= 2.0 * opt.min_spacing + 2.0;
    const bool vertical = can_v && (!can_h || uni(0.0, rw + rh) < rw);
    const int w = uint(opt.min_stroke, opt.max_stroke);
    // A split line within a few pixels of a parallel wall would make the two
    // centerlines indistinguishable (or collinear and abutting), which leaves
    // the ground truth ambiguous. Such draws are retried.
    auto clear_of_parallel = [&](double c) {
      for (const Stroke& o : plan.walls) {
        const bool o_vertical = o.a.x == o.b.x;
        if (o_vertical == vertical && std::abs((vertical ? o.a.x : o.a.y) - c) < 8.0) return false;
      }
      return true;
    };
    std::optional<double> coord;
    for (int attempt = 0; attempt < 20 && !coord; ++attempt) {
      const double lo = (vertical ? r.x0 : r.y0) + opt.min_spacing;
      const double hi = (vertical ? r.x1 : r.y1) - opt.min_spacing;
      const double c = stroke_coord(static_cast<int>(std::floor(uni(lo, hi))), w);
      if (clear_of_parallel(c)) coord = c;
    }
    if (!coord) {
      // Keep the room out of further draws.
      rooms[pick] = {r.x0, r.y0, r.x0 + 2.0 * opt.min_spacing, r.y0 + 2.0 * opt.min_spacing};
      continue;
    }
    Stroke s;
    s.width = w;
    s.contrast = contrast();
    if (vertical) {
      const double x = *coord;
      s.a = {x, r.y0};
      s.b = {x, r.y1};
      rooms[pick] = {r.x0, r.y0, x, r.y1};
      rooms.push_back({x, r.y0, r.x1, r.y1});
    } else {
      const double y = *coord;
      s.a = {r.x0, y};
      s.b = {r.x1, y};
      rooms[pick] = {r.x0, r.y0, r.x1, y};
      rooms.push_back({r.x0, y, r.x1, r.y1});
    }
    plan.walls.push_back(s);
  }
  return plan;
}

void draw_strokes(std::vector<double>& pixels, int width, int height, const std::vector<Stroke>& strokes,
                  const RenderOptions& opt) {
  const double scale = opt.background - opt.ink;
  for (const Stroke& s : strokes) {
    const double len = distance(s.a, s.b);
    if (len <= 0.0) continue;
    const Vec2 u = (s.b - s.a) / len;
    const double hw = 0.5 * s.width;
    const double value = opt.background - s.contrast * scale;
    const int xmin = std::max(0, static_cast<int>(std::floor(std::min(s.a.x, s.b.x) - hw - 1)));
    const int xmax = std::min(width - 1, static_cast<int>(std::ceil(std::max(s.a.x, s.b.x) + hw + 1)));
    const int ymin = std::max(0, static_cast<int>(std::floor(std::min(s.a.y, s.b.y) - hw - 1)));
    const int ymax = std::min(height - 1, static_cast<int>(std::ceil(std::max(s.a.y, s.b.y) + hw + 1)));
    for (int y = ymin; y <= ymax; ++y) {
      for (int x = xmin; x <= xmax; ++x) {
        const Vec2 c{static_cast<double>(x), static_cast<double>(y)};
        const double along = dot(c - s.a, u);
        const double across = cross(u, c - s.a);
        if (std::abs(across) < hw - 1e-9 && along > -hw + 1e-9 && along < len + hw - 1e-9) {
          double& px = pixels[static_cast<std::size_t>(y) * width + x];
          px = std::min(px, value);
        }
      }
    }
  }
}

RasterImage rasterize(const Plan& plan, const RenderOptions& opt) {
  std::vector<double> px(static_cast<std::size_t>(plan.width) * plan.height, opt.background);
  std::vector<Stroke> strokes = plan.walls;
  for (const Mark& m : plan.marks) {
    auto ms = m.strokes();
    strokes.insert(strokes.end(), ms.begin(), ms.end());
  }
  draw_strokes(px, plan.width, plan.height, strokes, opt);
  if (opt.noise_fraction > 0.0) {
    std::mt19937_64 rng(opt.noise_seed);
    std::normal_distribution<double> noise(0.0, opt.noise_fraction * (opt.background - opt.ink));
    for (double& v : px) v = std::clamp(v + noise(rng), 0.0, 1.0);
  }
  return RasterImage(plan.width, plan.height, std::move(px));
}

VectorScene to_scene(const Plan& plan) {
  VectorScene scene;
  scene.width = plan.width;
  scene.height = plan.height;
  scene.luminosity_range = 1.0;
  scene.provenance.source = "synthetic";
  for (const Stroke& s : plan.walls) scene.segments.push_back({s.a, s.b, s.contrast, static_cast<double>(s.width)});
  for (const Mark& m : plan.marks)
    for (const Stroke& s : m.strokes()) scene.segments.push_back({s.a, s.b, s.contrast, static_cast<double>(s.width)});
  return scene;
}

Plan case_study_plan() {
  Plan p;
  p.width = 512;
  p.height = 512;
  const int w = 3;
  const double c = 0.9;
  const double left = 56, right = 456, top = 56, bottom = 356;
  p.walls = {
      {{left, top}, {right, top}, w, c},
      {{right, top}, {right, bottom}, w, c},
      {{left, bottom}, {right, bottom}, w, c},
      {{left, top}, {left, bottom}, w, c},
      {{170, top}, {170, bottom}, w, c},
      {{330, top}, {330, bottom}, w, c},
      {{left, 230}, {right, 230}, w, c},
  };
  p.marks = {
      {{140, 26}, {200, 26}, 24.0, 2, c},
      {{300, 26}, {360, 26}, 24.0, 2, c},
      {{482, 195}, {482, 265}, 24.0, 2, c},
  };
  return p;
}

}  // namespace sketchopt::synth
