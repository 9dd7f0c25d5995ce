#include "sketchopt/vectorizer.hpp"

#include "sketchopt/errors.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <iterator>
#include <map>
#include <optional>
#include <tuple>

namespace sketchopt {

namespace {

struct Member {
  int x;
  int y;
  double gain;  // level 0
};

/// Running second moments of member pixel positions.
class LineFit {
public:
  void add(double x, double y) {
    ++n_;
    sx_ += x;
    sy_ += y;
    sxx_ += x * x;
    sxy_ += x * y;
    syy_ += y * y;
  }
  Vec2 centroid() const { return {sx_ / n_, sy_ / n_}; }
  /// Principal direction, oriented to agree with `hint`.
  Vec2 direction(Vec2 hint) const {
    if (n_ < 2) return hint;
    const Vec2 m = centroid();
    const double cxx = sxx_ / n_ - m.x * m.x;
    const double cxy = sxy_ / n_ - m.x * m.y;
    const double cyy = syy_ / n_ - m.y * m.y;
    if (cxx + cyy <= 0.0) return hint;
    const double a = 0.5 * std::atan2(2.0 * cxy, cxx - cyy);
    Vec2 d{std::cos(a), std::sin(a)};
    return dot(d, hint) < 0.0 ? d * -1.0 : d;
  }

private:
  double n_ = 0;
  double sx_ = 0, sy_ = 0, sxx_ = 0, sxy_ = 0, syy_ = 0;
};

class Tracer {
public:
  Tracer(const ResponseField& f, const TracerParams& p)
      : f_(f),
        p_(p),
        angle_tol_(deg2rad(p.angle_tol_deg)),
        seed_threshold_(std::max(f.threshold(), p.noise_factor * f.noise_gain())),
        member_threshold_(std::max(f.threshold(), p.member_factor * f.noise_gain())),
        consumed_(static_cast<std::size_t>(f.width()) * f.height(), 0) {}

  std::vector<LineSegment> run() {
    std::vector<LineSegment> out;
    for (const auto& [neg_gain, y, x] : seeds()) {
      if (consumed_[idx(x, y)]) continue;
      std::vector<Member> members = grow(x, y);
      if (auto seg = finish(members)) out.push_back(*seg);
    }
    return out;
  }

private:
  std::size_t idx(int x, int y) const { return static_cast<std::size_t>(y) * f_.width() + x; }
  bool inside(int x, int y) const { return x >= 0 && y >= 0 && x < f_.width() && y < f_.height(); }

  double fine_or_zero(int x, int y) const { return inside(x, y) ? f_.fine_gain(x, y) : 0.0; }

  // Seeds: linear nodes whose level-0 gain clears the seed threshold and peaks
  // within nms_radius across its own orientation. The radius covers the flank
  // offset so oblique strips grazing a wide stroke's side never seed. Ordered by descending gain, then (y, x).
  std::vector<std::tuple<double, int, int>> seeds() const {
    std::vector<std::tuple<double, int, int>> s;
    for (int y = 0; y < f_.height(); ++y) {
      for (int x = 0; x < f_.width(); ++x) {
        const double g = f_.fine_gain(x, y);
        if (!exceeds_threshold(g, seed_threshold_)) continue;
        const double th = f_.fine_orientation(x, y);
        const Vec2 n{-std::sin(th), std::cos(th)};
        const double eps = 1e-9 * g;
        bool peak = true;
        bool strict = false;
        for (int r = 1; r <= p_.nms_radius && peak; ++r) {
          for (double sg : {-1.0, 1.0}) {
            const double gn = fine_or_zero(x + static_cast<int>(std::lround(sg * r * n.x)),
                                           y + static_cast<int>(std::lround(sg * r * n.y)));
            if (g + eps < gn) peak = false;
            if (g > gn + eps) strict = true;
          }
        }
        if (!peak || !strict) continue;  // strict excludes flat plateaus
        s.emplace_back(-g, y, x);
      }
    }
    std::sort(s.begin(), s.end());
    return s;
  }

  bool joinable(int x, int y, double line_theta) const {
    return inside(x, y) && !consumed_[idx(x, y)] &&
           exceeds_threshold(f_.fine_gain(x, y), member_threshold_) &&
           angle_between_lines(f_.fine_orientation(x, y), line_theta) < angle_tol_;
  }

  std::vector<Member> grow(int sx, int sy) {
    const Vec2 seed{static_cast<double>(sx), static_cast<double>(sy)};
    const double th0 = f_.fine_orientation(sx, sy);
    const Vec2 u0{std::cos(th0), std::sin(th0)};
    std::vector<Member> members{{sx, sy, f_.fine_gain(sx, sy)}};
    consumed_[idx(sx, sy)] = 1;
    LineFit fit;
    fit.add(sx, sy);
    double reach[2] = {0.0, 0.0};

    for (int side = 0; side < 2; ++side) {
      const double sgn = side == 0 ? 1.0 : -1.0;
      int gap = 0;
      for (int t = 1;; ++t) {
        // Short chains keep the seed orientation; longer ones follow the fit.
        const bool settled = reach[0] + reach[1] >= 6.0;
        const Vec2 u = settled ? fit.direction(u0) : u0;
        const Vec2 m = settled ? fit.centroid() : seed;
        const Vec2 us = u * sgn;
        const Vec2 q0 = seed + us * t;
        const Vec2 q = m + u * dot(q0 - m, u);
        if (q.x < -2 || q.y < -2 || q.x > f_.width() + 1 || q.y > f_.height() + 1) break;
        const double line_theta = line_angle(u);
        const int cx = static_cast<int>(std::lround(q.x));
        const int cy = static_cast<int>(std::lround(q.y));
        bool joined = false;
        for (int dy = -2; dy <= 2; ++dy) {
          for (int dx = -2; dx <= 2; ++dx) {
            const int x = cx + dx;
            const int y = cy + dy;
            const Vec2 c{static_cast<double>(x), static_cast<double>(y)};
            const double a = dot(c - seed, us);
            if (a < t - 0.5 || a >= t + 0.5) continue;
            if (std::abs(cross(u, c - m)) >= p_.offset_tol) continue;
            if (!joinable(x, y, line_theta)) continue;
            consumed_[idx(x, y)] = 1;
            members.push_back({x, y, f_.fine_gain(x, y)});
            fit.add(x, y);
            joined = true;
          }
        }
        if (joined) {
          gap = 0;
          reach[side] = t;
        } else if (++gap > p_.max_gap) {
          break;
        }
      }
    }
    return members;
  }

  std::optional<LineSegment> finish(const std::vector<Member>& members) const {
    if (members.size() < 2) return std::nullopt;
    const double th0 = f_.fine_orientation(members.front().x, members.front().y);
    const Vec2 hint{std::cos(th0), std::sin(th0)};
    LineFit fit;
    for (const Member& mb : members) fit.add(mb.x, mb.y);
    Vec2 m = fit.centroid();
    Vec2 u = fit.direction(hint);

    // Slice members along the axis; trim weak end slices (filter tails that
    // extend past the stroke ends).
    std::map<long, double> slice_peak;
    for (const Member& mb : members) {
      const long k = std::lround(dot(Vec2{double(mb.x), double(mb.y)} - m, u));
      auto [it, fresh] = slice_peak.try_emplace(k, mb.gain);
      if (!fresh) it->second = std::max(it->second, mb.gain);
    }
    std::vector<double> peaks;
    for (const auto& [k, g] : slice_peak) peaks.push_back(g);
    std::sort(peaks.begin(), peaks.end());
    const double plateau = peaks[static_cast<std::size_t>(0.9 * (peaks.size() - 1))];
    const double cut = p_.end_fraction * plateau;
    auto lo = slice_peak.begin();
    while (lo != slice_peak.end() && lo->second < cut) ++lo;
    if (lo == slice_peak.end()) return std::nullopt;
    auto hi = std::prev(slice_peak.end());
    while (hi != lo && hi->second < cut) --hi;
    const long kmin = lo->first;
    const long kmax = hi->first;

    LineFit kept;
    double gain_sum = 0.0;
    std::size_t count = 0;
    for (const Member& mb : members) {
      const long k = std::lround(dot(Vec2{double(mb.x), double(mb.y)} - m, u));
      if (k < kmin || k > kmax) continue;
      kept.add(mb.x, mb.y);
      gain_sum += mb.gain;
      ++count;
    }
    if (count < 2) return std::nullopt;
    const Vec2 m2 = kept.centroid();
    const Vec2 u2 = kept.direction(u);
    double amin = 0.0;
    double amax = 0.0;
    bool first = true;
    for (const Member& mb : members) {
      const Vec2 c{double(mb.x), double(mb.y)};
      const long k = std::lround(dot(c - m, u));
      if (k < kmin || k > kmax) continue;
      const double a = dot(c - m2, u2);
      if (first || a < amin) amin = a;
      if (first || a > amax) amax = a;
      first = false;
    }
    LineSegment seg;
    seg.p0 = m2 + u2 * amin;
    seg.p1 = m2 + u2 * amax;
    seg.gain = gain_sum / static_cast<double>(count);
    seg.width_estimate = static_cast<double>(count) / static_cast<double>(kmax - kmin + 1);
    if (seg.length() < p_.min_length) return std::nullopt;
    // A strong seed dragging a chain of weak members (noise, a neighbour's
    // sidelobes) is not a stroke.
    if (!exceeds_threshold(seg.gain, seed_threshold_)) return std::nullopt;
    return seg;
  }

  const ResponseField& f_;
  const TracerParams& p_;
  double angle_tol_;
  double seed_threshold_;
  double member_threshold_;
  std::vector<std::uint8_t> consumed_;
};

// Weaker segments lying mostly within `echo_distance` of a stronger one.
// These are filter responses to the stronger stroke: parallel echoes from
// coarse levels and oblique strips clipping its ends and junctions.
std::vector<LineSegment> drop_shadows(std::vector<LineSegment> segs, const TracerParams& p) {
  std::vector<std::size_t> order(segs.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return segs[a].gain > segs[b].gain; });
  std::vector<bool> keep(segs.size(), true);
  for (std::size_t oi = 0; oi < order.size(); ++oi) {
    const LineSegment& b = segs[order[oi]];
    const int steps = std::max(2, static_cast<int>(std::ceil(b.length())));
    for (std::size_t oj = 0; oj < oi; ++oj) {
      if (!keep[order[oj]]) continue;
      const LineSegment& a = segs[order[oj]];
      if (!(b.gain < p.echo_gain_ratio * a.gain)) continue;
      int near = 0;
      for (int i = 0; i <= steps; ++i) {
        const Vec2 q = b.p0 + (b.p1 - b.p0) * (static_cast<double>(i) / steps);
        if (point_segment_distance(q, a.p0, a.p1) <= p.echo_distance) ++near;
      }
      if (2 * near < steps + 1) continue;
      keep[order[oi]] = false;
      break;
    }
  }
  std::vector<LineSegment> out;
  for (std::size_t i = 0; i < segs.size(); ++i)
    if (keep[i]) out.push_back(segs[i]);
  return out;
}

// The detector response fades within half a strip of a junction, so walks
// stop short of it. Move each endpoint onto the nearest crossing line when
// that crossing lies within `junction_reach` of the end along the segment
// and within `junction_reach` of the other segment's extent.
void close_junctions(std::vector<LineSegment>& segs, const TracerParams& p) {
  const double min_angle = deg2rad(30.0);
  const std::vector<LineSegment> orig = segs;
  for (std::size_t i = 0; i < segs.size(); ++i) {
    const LineSegment& s = orig[i];
    const Vec2 u = normalized(s.p1 - s.p0);
    const double len = s.length();
    for (int end = 0; end < 2; ++end) {
      double best = p.junction_reach;
      std::optional<Vec2> target;
      for (std::size_t j = 0; j < orig.size(); ++j) {
        if (j == i) continue;
        const LineSegment& o = orig[j];
        if (angle_between_lines(s.angle(), o.angle()) < min_angle) continue;
        const Vec2 v = normalized(o.p1 - o.p0);
        const double den = cross(u, v);
        // s.p0 + u a = o.p0 + v b
        const double a = cross(o.p0 - s.p0, v) / den;
        const double b = cross(o.p0 - s.p0, u) / den;
        if (b < -p.junction_reach || b > o.length() + p.junction_reach) continue;
        const double shift = end == 0 ? -a : a - len;  // > 0 extends the segment
        if (std::abs(shift) >= best) continue;
        if (end == 0 ? a >= 0.5 * len : a <= 0.5 * len) continue;
        best = std::abs(shift);
        target = s.p0 + u * a;
      }
      if (target) (end == 0 ? segs[i].p0 : segs[i].p1) = *target;
    }
  }
}

// Walks break where a crossing stroke swamps the response; once both pieces
// are closed onto the crossing they are collinear and abutting, and rejoin.
std::vector<LineSegment> join_collinear(std::vector<LineSegment> segs, const TracerParams& p) {
  const double max_angle = deg2rad(2.0);
  for (bool changed = true; changed;) {
    changed = false;
    for (std::size_t i = 0; i < segs.size() && !changed; ++i) {
      for (std::size_t j = i + 1; j < segs.size() && !changed; ++j) {
        const LineSegment& a = segs[i].length() >= segs[j].length() ? segs[i] : segs[j];
        const LineSegment& b = &a == &segs[i] ? segs[j] : segs[i];
        if (angle_between_lines(a.angle(), b.angle()) >= max_angle) continue;
        const Vec2 u = normalized(a.p1 - a.p0);
        if (std::abs(cross(u, b.p0 - a.p0)) > p.offset_tol || std::abs(cross(u, b.p1 - a.p0)) > p.offset_tol) continue;
        const double t0 = dot(b.p0 - a.p0, u);
        const double t1 = dot(b.p1 - a.p0, u);
        const double gap = std::max(std::min(t0, t1) - a.length(), -std::max(t0, t1));
        if (gap > p.junction_reach) continue;
        const double la = a.length();
        const double lb = b.length();
        LineSegment m;
        const double lo = std::min({0.0, t0, t1});
        const double hi = std::max({la, t0, t1});
        // Keep the longer piece's line; b's offset is within offset_tol.
        m.p0 = a.p0 + u * lo;
        m.p1 = a.p0 + u * hi;
        m.gain = (a.gain * la + b.gain * lb) / (la + lb);
        m.width_estimate = (a.width_estimate * la + b.width_estimate * lb) / (la + lb);
        segs[i] = m;
        segs.erase(segs.begin() + static_cast<std::ptrdiff_t>(j));
        changed = true;
      }
    }
  }
  return segs;
}

}  // namespace

VectorScene trace_segments(const ResponseField& field, const TracerParams& params) {
  if (!(params.angle_tol_deg > 0.0) || !(params.offset_tol > 0.0) || params.max_gap < 0)
    throw ParamError("invalid tracer parameters");
  VectorScene scene;
  scene.width = field.width();
  scene.height = field.height();
  scene.luminosity_range = field.luminosity_range();
  scene.segments = drop_shadows(Tracer(field, params).run(), params);
  close_junctions(scene.segments, params);
  scene.segments = join_collinear(std::move(scene.segments), params);
  auto& pp = scene.provenance.parameters;
  pp["angle_tol_deg"] = params.angle_tol_deg;
  pp["offset_tol"] = params.offset_tol;
  pp["min_length"] = params.min_length;
  pp["max_gap"] = params.max_gap;
  pp["noise_factor"] = params.noise_factor;
  pp["member_factor"] = params.member_factor;
  pp["junction_reach"] = params.junction_reach;
  return scene;
}

VectorScene snap_orthogonal(const VectorScene& scene, double tol_deg) {
  if (!(tol_deg >= 0.0 && tol_deg < 45.0)) throw ParamError("snap tolerance must be in [0, 45) degrees");
  VectorScene out = scene;
  const double tol = deg2rad(tol_deg);
  for (LineSegment& s : out.segments) {
    const double a = s.angle();
    const Vec2 mid = s.midpoint();
    const double half = 0.5 * s.length();
    if (angle_between_lines(a, 0.0) <= tol) {
      const double sx = s.p1.x >= s.p0.x ? 1.0 : -1.0;
      s.p0 = {mid.x - sx * half, mid.y};
      s.p1 = {mid.x + sx * half, mid.y};
    } else if (angle_between_lines(a, std::numbers::pi / 2) <= tol) {
      const double sy = s.p1.y >= s.p0.y ? 1.0 : -1.0;
      s.p0 = {mid.x, mid.y - sy * half};
      s.p1 = {mid.x, mid.y + sy * half};
    }
  }
  out.provenance.parameters["snap_deg"] = tol_deg;
  return out;
}

}  // namespace sketchopt
