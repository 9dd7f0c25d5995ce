#pragma once

#include "sketchopt/geometry.hpp"
#include "sketchopt/raster.hpp"
#include "sketchopt/vectorizer.hpp"

#include <cstdint>
#include <random>
#include <vector>

namespace sketchopt::synth {

/// A drawn stroke: centerline endpoints plus rendering attributes. Contrast is
/// the fraction of the image's nominal luminosity range the stroke darkens.
struct Stroke {
  Vec2 a;
  Vec2 b;
  int width = 1;
  double contrast = 1.0;
};

/// I-shaped annotation: a stem with a centered perpendicular cap at each end.
struct Mark {
  Vec2 stem_p0;
  Vec2 stem_p1;
  double cap_length = 20.0;
  int width = 2;
  double contrast = 0.9;

  std::vector<Stroke> strokes() const;
};

struct Plan {
  int width = 0;
  int height = 0;
  std::vector<Stroke> walls;
  std::vector<Mark> marks;
};

struct PlanOptions {
  int width = 1024;
  int height = 1024;
  int min_walls = 5;
  int max_walls = 25;
  double min_spacing = 50.0;
  double min_contrast = 0.011;
  double max_contrast = 1.0;
  int min_stroke = 1;
  int max_stroke = 3;
};

/// Guillotine-partitioned rectangle: an outer box plus walls spanning rooms
/// wall-to-wall. The first wall is drawn at full contrast.
Plan random_orthogonal_plan(std::mt19937_64& rng, const PlanOptions& opt = {});

struct RenderOptions {
  double background = 0.985;
  double ink = 0.005;           // intensity of a contrast-1 stroke
  double noise_fraction = 0.0;  // Gaussian sigma as a fraction of (background - ink)
  std::uint64_t noise_seed = 1;
};

RasterImage rasterize(const Plan& plan, const RenderOptions& opt = {});
/// Draw strokes onto an existing raster (darkest value wins).
void draw_strokes(std::vector<double>& pixels, int width, int height, const std::vector<Stroke>& strokes,
                  const RenderOptions& opt);

/// Exact vector scene of the plan's walls and mark strokes.
VectorScene to_scene(const Plan& plan);

/// Three-room-band plan with two interior vertical walls and one interior
/// horizontal wall, each annotated with an I-mark; none centered as drawn.
Plan case_study_plan();

}  // namespace sketchopt::synth
