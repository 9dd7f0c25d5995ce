#include "sketchopt/annotation.hpp"
#include "sketchopt/errors.hpp"
#include "support.hpp"

#include <doctest.h>

#include <set>

using namespace sketchopt;
using namespace sketchopt::testing;

namespace {

// Stem from a to b with centered perpendicular caps of the given length.
std::vector<LineSegment> i_mark(Vec2 a, Vec2 b, double cap) {
  const Vec2 u = normalized(b - a);
  const Vec2 h = Vec2{-u.y, u.x} * (0.5 * cap);
  return {{a, b, 1, 1}, {a - h, a + h, 1, 1}, {b - h, b + h, 1, 1}};
}

AnnotationMark mark_of(Vec2 a, Vec2 b, double cap) {
  const std::vector<LineSegment> s = i_mark(a, b, cap);
  return {a, b, {s[1], s[2]}};
}

VectorScene with(VectorScene scene, const std::vector<LineSegment>& extra) {
  scene.segments.insert(scene.segments.end(), extra.begin(), extra.end());
  return scene;
}

BindResult bind_scene(const VectorScene& scene) {
  const SplitResult parts = split_annotation_strokes(scene);
  const ParametricGraph g = merged(parts.layout);
  return bind_annotations(g, detect_annotations(parts.marks_raw).marks);
}

}  // namespace

TEST_CASE("an I triple next to a square moves to the mark strokes") {
  const VectorScene scene = with(square_scene(100), i_mark({90, 50}, {110, 50}, 8));
  const SplitResult r = split_annotation_strokes(scene);
  CHECK(r.layout.segments.size() == 4);
  CHECK(r.marks_raw.segments.size() == 3);
}

TEST_CASE("a scene without cap pairs has no mark strokes") {
  const SplitResult r = split_annotation_strokes(square_scene(100));
  CHECK(r.marks_raw.segments.empty());
  CHECK(r.layout.segments.size() == 4);
  // An L corner is not an I: the stem meets the cap at its end.
  const SplitResult l = split_annotation_strokes(scene_of({seg(0, 0, 30, 0), seg(0, 0, 0, 8), seg(30, 0, 30, 8)}));
  CHECK(l.marks_raw.segments.empty());
}

TEST_CASE("the longer stem wins a shared cap") {
  std::vector<LineSegment> segs = i_mark({0, 0}, {30, 0}, 8);  // stem, shared cap at x=0, cap at x=30
  segs.push_back(seg(0, 0, -20, 0));
  segs.push_back(seg(-20, -4, -20, 4));
  const SplitResult r = split_annotation_strokes(scene_of(segs));
  REQUIRE(r.marks_raw.segments.size() == 3);
  CHECK(r.marks_raw.segments[0].length() == 30.0);
  REQUIRE(r.layout.segments.size() == 2);
  CHECK(r.layout.segments[0].length() == 20.0);
  const DetectResult d = detect_annotations(r.marks_raw);
  REQUIRE(d.marks.size() == 1);
  CHECK(d.marks[0].length() == 30.0);
}

TEST_CASE("mark geometry") {
  const DetectResult d = detect_annotations(scene_of(i_mark({8, 5}, {14, 5}, 2)));
  REQUIRE(d.marks.size() == 1);
  CHECK(d.warnings.empty());
  const AnnotationMark& m = d.marks[0];
  CHECK(m.length() == 6.0);
  CHECK(m.center() == Vec2{11, 5});
  CHECK(m.direction() == Vec2{1, 0});
  // A stem drawn right to left has the same canonical direction.
  CHECK(detect_annotations(scene_of(i_mark({14, 5}, {8, 5}, 2))).marks[0].direction() == Vec2{1, 0});
}

TEST_CASE("a stem with one cap is discarded with a warning") {
  std::vector<LineSegment> s = i_mark({8, 5}, {40, 5}, 8);
  s.pop_back();
  const DetectResult d = detect_annotations(scene_of(s));
  CHECK(d.marks.empty());
  CHECK(d.warnings.size() == 1);
}

TEST_CASE("perpendicularity tolerance is 15 degrees") {
  auto at = [](double stem_deg, double cap_deg) {
    const Vec2 a{50, 50};
    const Vec2 b = a + Vec2{std::cos(deg2rad(stem_deg)), std::sin(deg2rad(stem_deg))} * 40.0;
    const Vec2 h = Vec2{std::cos(deg2rad(cap_deg)), std::sin(deg2rad(cap_deg))} * 5.0;
    return scene_of({{a, b, 1, 1}, {a - h, a + h, 1, 1}, {b - h, b + h, 1, 1}}, 128, 128);
  };
  CHECK(detect_annotations(at(91, 1)).marks.size() == 1);
  CHECK(split_annotation_strokes(at(91, 1)).marks_raw.segments.size() == 3);
  CHECK(detect_annotations(at(90, 14)).marks.size() == 1);
  CHECK(detect_annotations(at(90, 20)).marks.empty());
  CHECK(split_annotation_strokes(at(90, 20)).marks_raw.segments.empty());
}

TEST_CASE("caps must be shorter than half the stem") {
  CHECK(detect_annotations(scene_of(i_mark({0, 0}, {20, 0}, 9.9))).marks.size() == 1);
  CHECK(detect_annotations(scene_of(i_mark({0, 0}, {20, 0}, 10.0))).marks.empty());
}

TEST_CASE("a mark across a wall binds to it with a centered range") {
  const ParametricGraph g = merged(scene_of({seg(10, 0, 10, 10)}));
  const BindResult b = bind_annotations(g, {mark_of({8, 5}, {14, 5}, 2)});
  REQUIRE(b.variables.size() == 1);
  CHECK(b.variables[0].id == 0);
  CHECK(b.variables[0].axis_id == g.axes.begin()->first);
  CHECK(b.variables[0].lo == -3.0);
  CHECK(b.variables[0].hi == 3.0);
  REQUIRE(b.variables[0].source_stem);
  CHECK(b.variables[0].source_stem->first == Vec2{8, 5});
}

TEST_CASE("a mark parallel to the nearest wall stays unbound") {
  const ParametricGraph g = merged(scene_of({seg(10, 0, 10, 40)}));
  const BindResult b = bind_annotations(g, {mark_of({14, 10}, {14, 30}, 6)});
  CHECK(b.variables.empty());
  CHECK(b.warnings.size() == 1);
}

TEST_CASE("marks beyond the search radius stay unbound") {
  const ParametricGraph g = merged(scene_of({seg(10, 0, 10, 10)}));
  CHECK(bind_annotations(g, {mark_of({8, 55}, {14, 55}, 2)}).variables.empty());
  BindParams wide;
  wide.search_radius = 60;
  CHECK(bind_annotations(g, {mark_of({8, 55}, {14, 55}, 2)}, wide).variables.size() == 1);
  wide.search_radius = 0;
  CHECK_THROWS_AS(bind_annotations(g, {}, wide), ParamError);
}

TEST_CASE("the closest mark takes a contested axis") {
  const ParametricGraph g = merged(scene_of({seg(10, 0, 10, 100)}));
  const BindResult b = bind_annotations(g, {mark_of({0, 20}, {16, 20}, 4), mark_of({10, 70}, {26, 70}, 4)});
  REQUIRE(b.variables.size() == 1);
  CHECK(b.variables[0].source_stem->first == Vec2{0, 20});  // center 2 px away versus 8
  CHECK(b.warnings.size() == 1);
}

TEST_CASE("the case-study sketch binds three distinct walls") {
  const BindResult b = bind_scene(synth::to_scene(synth::case_study_plan()));
  REQUIRE(b.variables.size() == 3);
  const ParametricGraph g = merged(split_annotation_strokes(synth::to_scene(synth::case_study_plan())).layout);
  std::set<int> axes;
  for (const DesignVariable& v : b.variables) {
    axes.insert(v.axis_id);
    CHECK(v.hi - v.lo == doctest::Approx(v.source_stem ? distance(v.source_stem->first, v.source_stem->second) : 0));
  }
  CHECK(axes.size() == 3);
  CHECK(axes == std::set<int>{axis_at(g, true, 170), axis_at(g, true, 330), axis_at(g, false, 230)});
}

TEST_CASE("binding is translation equivariant") {
  const VectorScene base = synth::to_scene(synth::case_study_plan());
  const BindResult ref = bind_scene(base);
  for (Vec2 t : {Vec2{37.5, -12.25}, Vec2{-100, 300}, Vec2{0.125, 0.5}}) {
    VectorScene moved = base;
    for (LineSegment& s : moved.segments) {
      s.p0 += t;
      s.p1 += t;
    }
    const BindResult b = bind_scene(moved);
    REQUIRE(b.variables.size() == ref.variables.size());
    for (std::size_t i = 0; i < b.variables.size(); ++i) {
      CHECK(b.variables[i].axis_id == ref.variables[i].axis_id);
      CHECK(b.variables[i].hi - b.variables[i].lo == doctest::Approx(ref.variables[i].hi - ref.variables[i].lo));
    }
  }
}

TEST_CASE("generated scenes with n marks bind n variables on distinct axes") {
  std::mt19937_64 rng(77);
  for (int trial = 0; trial < 20; ++trial) {
    synth::Plan plan = synth::random_orthogonal_plan(rng);
    const int n = trial % 11;
    const std::vector<std::size_t> marked = add_marks(plan, n, rng);
    const SplitResult parts = split_annotation_strokes(synth::to_scene(plan));
    const DetectResult d = detect_annotations(parts.marks_raw);
    CHECK(d.marks.size() == marked.size());
    const BindResult b = bind_annotations(merged(parts.layout), d.marks);
    CHECK(b.variables.size() == marked.size());
    std::set<int> axes;
    for (const DesignVariable& v : b.variables) {
      axes.insert(v.axis_id);
      CHECK(v.lo < 0.0);
      CHECK(v.hi > 0.0);
    }
    CHECK(axes.size() == b.variables.size());
  }
}
