#pragma once

#include "sketchopt/geometry.hpp"
#include "sketchopt/raster.hpp"

#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <vector>

namespace sketchopt {

/// Oriented line filter bank. The kernel is a center strip (`strip_length`
/// samples along the orientation, unit weight) flanked by two strips of
/// weight `-flank_weight` at +/- `flank_offset` pixels across it. Dark lines
/// on a light background respond positively.
struct DetectorParams {
  int orientations = 16;
  double threshold_fraction = 5e-4;
  int strip_length = 21;
  double flank_offset = 2.0;
  double flank_weight = 0.5;
};

/// Best oriented response of one pyramid level, in that level's pixel grid.
struct LevelResponse {
  int width = 0;
  int height = 0;
  std::vector<double> gain;         // fraction of the level-0 luminosity range, >= 0
  std::vector<double> orientation;  // radians in [0, pi)

  double gain_at(int x, int y) const { return gain[static_cast<std::size_t>(y) * width + x]; }
  double orientation_at(int x, int y) const { return orientation[static_cast<std::size_t>(y) * width + x]; }
};

struct LinearityField {
  std::vector<LevelResponse> levels;
  int width = 0;   // native
  int height = 0;  // native
  double luminosity_range = 0.0;
  double threshold = 0.0;  // gain units
  /// Robust estimate of the per-pixel response noise at level 0, gain units.
  double noise_gain = 0.0;
};

/// True when `gain` exceeds `threshold`; a relative 1e-9 allowance absorbs
/// round-off for features sitting exactly at the threshold contrast.
inline bool exceeds_threshold(double gain, double threshold) {
  return threshold > 0.0 && gain > threshold * (1.0 - 1e-9);
}

struct NodeResponse {
  Vec2 position;
  double orientation = 0.0;  // [0, pi)
  double gain = 0.0;
  std::vector<double> level_weights;
};

/// Native-resolution merged field. Level weights are stored for linear nodes only.
class ResponseField {
public:
  ResponseField() = default;
  ResponseField(int width, int height, int level_count, double luminosity_range, double threshold,
                double noise_gain);

  int width() const noexcept { return width_; }
  int height() const noexcept { return height_; }
  int level_count() const noexcept { return level_count_; }
  double luminosity_range() const noexcept { return luminosity_range_; }
  double threshold() const noexcept { return threshold_; }
  double noise_gain() const noexcept { return noise_gain_; }

  double gain(int x, int y) const { return gain_[index(x, y)]; }
  double orientation(int x, int y) const { return orientation_[index(x, y)]; }
  /// Level-0 response. Coarse levels bleed across nearby junctions and past
  /// stroke sides, so tracing localizes and orients with the finest level.
  double fine_gain(int x, int y) const { return fine_gain_[index(x, y)]; }
  double fine_orientation(int x, int y) const { return fine_orientation_[index(x, y)]; }
  bool linear(int x, int y) const { return exceeds_threshold(gain(x, y), threshold_); }
  NodeResponse node(int x, int y) const;
  std::size_t linear_count() const noexcept { return weights_.size() / static_cast<std::size_t>(level_count_); }

  void set(int x, int y, double gain, double orientation, std::span<const double> level_weights);
  void set_fine(int x, int y, double gain, double orientation) {
    fine_gain_[index(x, y)] = gain;
    fine_orientation_[index(x, y)] = orientation;
  }

private:
  std::size_t index(int x, int y) const { return static_cast<std::size_t>(y) * width_ + x; }

  int width_ = 0;
  int height_ = 0;
  int level_count_ = 0;
  double luminosity_range_ = 0.0;
  double threshold_ = 0.0;
  double noise_gain_ = 0.0;
  std::vector<double> gain_;
  std::vector<double> orientation_;
  std::vector<double> fine_gain_;
  std::vector<double> fine_orientation_;
  std::vector<std::int32_t> weight_slot_;
  std::vector<double> weights_;
};

struct LevelSample {
  double gain = 0.0;
  double orientation = 0.0;
};

struct MergedSample {
  double gain = 0.0;
  double orientation = 0.0;
  std::vector<double> level_weights;
};

/// Combine one node's per-level responses. Levels whose gain does not exceed
/// `threshold` are ignored; the rest are weighted by gain and their
/// orientations averaged on doubled angles.
MergedSample merge_node(std::span<const LevelSample> levels, double threshold);

LinearityField detect_linearity(const ResolutionStack& stack, const DetectorParams& params = {});
ResponseField merge_resolutions(const LinearityField& field);

struct LineSegment {
  Vec2 p0;
  Vec2 p1;
  double gain = 0.0;
  double width_estimate = 1.0;

  double length() const { return distance(p0, p1); }
  Vec2 midpoint() const { return (p0 + p1) * 0.5; }
  double angle() const { return line_angle(p1 - p0); }
};

struct SceneProvenance {
  std::string source;
  std::map<std::string, double> parameters;
};

struct VectorScene {
  std::vector<LineSegment> segments;
  int width = 0;
  int height = 0;
  double luminosity_range = 0.0;
  SceneProvenance provenance;
};

struct TracerParams {
  double angle_tol_deg = 10.0;
  double offset_tol = 1.5;
  double min_length = 8.0;
  /// Consecutive empty slices bridged while walking (junctions, crossings).
  int max_gap = 4;
  /// Seeds need level-0 gain above noise_factor * noise_gain; chain members
  /// need member_factor * noise_gain.
  double noise_factor = 8.0;
  double member_factor = 3.0;
  /// Seeds must be ridge maxima within this many pixels across their orientation.
  int nms_radius = 3;
  /// End slices weaker than this fraction of the segment's median gain are trimmed.
  double end_fraction = 0.5;
  /// A segment lying mostly within `echo_distance` of a stronger one and below
  /// `echo_gain_ratio` of its gain is a filter echo of it and dropped.
  double echo_distance = 16.0;
  double echo_gain_ratio = 0.5;
  /// Endpoints this close to a crossing line are moved onto it.
  double junction_reach = 12.0;
};

VectorScene trace_segments(const ResponseField& field, const TracerParams& params = {});

/// Rotate near-axis-aligned segments about their midpoint onto 0 or 90 degrees.
VectorScene snap_orthogonal(const VectorScene& scene, double tol_deg);

struct VectorizeParams {
  int levels = kDefaultPyramidLevels;
  DetectorParams detector;
  TracerParams tracer;
  double snap_deg = 5.0;  // negative disables snapping
};

/// raster -> pyramid -> detection -> merge -> tracing -> snapping.
VectorScene vectorize(const RasterImage& img, const VectorizeParams& params = {});

}  // namespace sketchopt
