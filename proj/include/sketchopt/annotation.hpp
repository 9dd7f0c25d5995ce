#pragma once

#include "sketchopt/parametrizer.hpp"
#include "sketchopt/vectorizer.hpp"

#include <array>
#include <string>
#include <utility>
#include <vector>

namespace sketchopt {

/// An I-shaped mark: a stem with a short perpendicular cap at each end.
struct AnnotationMark {
  Vec2 stem_p0;
  Vec2 stem_p1;
  std::array<LineSegment, 2> caps;  // caps[0] at stem_p0, caps[1] at stem_p1

  double length() const { return distance(stem_p0, stem_p1); }
  Vec2 center() const { return (stem_p0 + stem_p1) * 0.5; }
  Vec2 direction() const { return canonical_direction(normalized(stem_p1 - stem_p0)); }
};

struct AnnotationParams {
  double perpendicular_tol_deg = 15.0;
  /// Stem ends must lie this close to their cap.
  double attach_tol = 3.0;
  double max_cap_ratio = 0.5;
  /// The stem meets each cap away from the cap's ends, which tells an I
  /// from the corner of an L.
  double cap_middle_lo = 0.2;
  double cap_middle_hi = 0.8;
};

struct BindParams {
  double search_radius = 40.0;
  double parallel_tol_deg = 15.0;
};

struct SplitResult {
  VectorScene layout;
  VectorScene marks_raw;
};

/// Move I-pattern triples out of the layout. Stems are tried longest first and
/// each segment joins at most one mark.
SplitResult split_annotation_strokes(const VectorScene& scene, const AnnotationParams& params = {});

struct DetectResult {
  std::vector<AnnotationMark> marks;
  std::vector<std::string> warnings;
};

/// Group mark strokes into marks, discarding (with a warning) groups that are
/// not well-formed I shapes.
DetectResult detect_annotations(const VectorScene& marks_raw, const AnnotationParams& params = {});

struct BindResult {
  std::vector<DesignVariable> variables;
  std::vector<std::string> warnings;
};

/// Bind marks to wall axes whose normal runs along the stem. Pairs are taken
/// nearest first, so each axis carries at most one variable and each mark
/// binds at most once. Ranges are centered on the drawn position, [-L/2, L/2].
BindResult bind_annotations(const ParametricGraph& graph, const std::vector<AnnotationMark>& marks,
                            const BindParams& params = {});

/// Distance from a point to the extent of an axis (first to last node).
double axis_distance(const ParametricGraph& graph, int axis_id, Vec2 p);

}  // namespace sketchopt
