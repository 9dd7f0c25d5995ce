#include "sketchopt/vectorizer.hpp"

#include "sketchopt/errors.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>

namespace sketchopt {

namespace {

constexpr double kPi = std::numbers::pi;

struct Tap {
  int dx;
  int dy;
  double w;
};

// Bilinear taps for sampling at fractional offsets, merged by integer offset.
class TapAccumulator {
public:
  void add(double ox, double oy, double weight) {
    auto snap = [](double v) {
      const double r = std::round(v);
      return std::abs(v - r) < 1e-9 ? r : v;
    };
    ox = snap(ox);
    oy = snap(oy);
    const double fx = std::floor(ox);
    const double fy = std::floor(oy);
    const double ax = ox - fx;
    const double ay = oy - fy;
    const int ix = static_cast<int>(fx);
    const int iy = static_cast<int>(fy);
    put(ix, iy, weight * (1 - ax) * (1 - ay));
    put(ix + 1, iy, weight * ax * (1 - ay));
    put(ix, iy + 1, weight * (1 - ax) * ay);
    put(ix + 1, iy + 1, weight * ax * ay);
  }
  std::vector<Tap> taps() const {
    std::vector<Tap> out;
    for (const auto& [k, w] : w_)
      if (w != 0.0) out.push_back({k.first, k.second, w});
    return out;
  }

private:
  void put(int x, int y, double w) {
    if (w != 0.0) w_[{x, y}] += w;
  }
  std::map<std::pair<int, int>, double> w_;
};

struct OrientationKernel {
  std::vector<Tap> strip;  // center strip sum
  std::vector<Tap> flank;  // samples of the strip sum at the two flank offsets
};

OrientationKernel make_kernel(double theta, const DetectorParams& p) {
  const Vec2 d{std::cos(theta), std::sin(theta)};
  const Vec2 n{-d.y, d.x};
  const int half = p.strip_length / 2;
  TapAccumulator strip;
  for (int t = -half; t <= half; ++t) strip.add(t * d.x, t * d.y, 1.0);
  TapAccumulator flank;
  flank.add(p.flank_offset * n.x, p.flank_offset * n.y, p.flank_weight);
  flank.add(-p.flank_offset * n.x, -p.flank_offset * n.y, p.flank_weight);
  return {strip.taps(), flank.taps()};
}

int tap_reach(const std::vector<Tap>& taps) {
  int r = 0;
  for (const Tap& t : taps) r = std::max({r, std::abs(t.dx), std::abs(t.dy)});
  return r;
}

/// Mirrored copy of `img` with `margin` extra pixels on every side.
struct Padded {
  int margin;
  int width;
  int height;
  std::vector<double> data;
  const double* row(int y) const { return data.data() + static_cast<std::size_t>(y + margin) * width + margin; }
};

// Reflection about the edge pixel. Replicating the edge instead would weight a
// single noisy pixel many times and fake ridges along the border.
int reflect(int i, int n) {
  if (n == 1) return 0;
  const int period = 2 * (n - 1);
  i %= period;
  if (i < 0) i += period;
  return i < n ? i : period - i;
}

Padded pad(const RasterImage& img, int margin) {
  Padded p{margin, img.width() + 2 * margin, img.height() + 2 * margin, {}};
  p.data.resize(static_cast<std::size_t>(p.width) * p.height);
  for (int y = 0; y < p.height; ++y) {
    const int sy = reflect(y - margin, img.height());
    for (int x = 0; x < p.width; ++x) {
      const int sx = reflect(x - margin, img.width());
      p.data[static_cast<std::size_t>(y) * p.width + x] = img.at(sx, sy);
    }
  }
  return p;
}

constexpr int kBandRows = 16;

// dst[x] = sum over taps of w * rows[t][x], summed in tap order per pixel.
// Blocks keep the partial sums in registers instead of re-walking dst per tap.
void accumulate_taps(const std::vector<Tap>& taps, const std::vector<const double*>& rows, double* dst, int n) {
  constexpr int kBlock = 16;
  const std::size_t nt = taps.size();
  int x = 0;
  for (; x + kBlock <= n; x += kBlock) {
    double acc[kBlock] = {};
    for (std::size_t t = 0; t < nt; ++t) {
      const double wt = taps[t].w;
      const double* s = rows[t] + x;
      for (int i = 0; i < kBlock; ++i) acc[i] += wt * s[i];
    }
    std::copy(acc, acc + kBlock, dst + x);
  }
  for (; x < n; ++x) {
    double acc = 0.0;
    for (std::size_t t = 0; t < nt; ++t) acc += taps[t].w * rows[t][x];
    dst[x] = acc;
  }
}

LevelResponse compute_level(const RasterImage& img, const std::vector<OrientationKernel>& kernels,
                            const DetectorParams& p, double range) {
  const int w = img.width();
  const int h = img.height();
  const int norient = static_cast<int>(kernels.size());

  int strip_reach = 0;
  int flank_reach = 0;
  for (const auto& k : kernels) {
    strip_reach = std::max(strip_reach, tap_reach(k.strip));
    flank_reach = std::max(flank_reach, tap_reach(k.flank));
  }
  const Padded src = pad(img, strip_reach + flank_reach + 1);
  const double norm = range > 0.0 ? 1.0 / (p.strip_length * range) : 0.0;

  LevelResponse out;
  out.width = w;
  out.height = h;
  out.gain.assign(static_cast<std::size_t>(w) * h, 0.0);
  out.orientation.assign(static_cast<std::size_t>(w) * h, 0.0);
  if (norm == 0.0) return out;

  // Strip sums cover the band plus the flank reach on every side.
  const int sw = w + 2 * flank_reach;
  std::vector<double> strip_sum;
  std::vector<double> resp;  // [orientation][band row][x]
  std::vector<const double*> rows;
  std::vector<double> best_row(static_cast<std::size_t>(w));
  std::vector<int> best_idx(static_cast<std::size_t>(w));
  for (int y0 = 0; y0 < h; y0 += kBandRows) {
    const int y1 = std::min(h, y0 + kBandRows);
    const int bh = y1 - y0;
    const int sh = bh + 2 * flank_reach;
    strip_sum.assign(static_cast<std::size_t>(sw) * sh, 0.0);
    resp.assign(static_cast<std::size_t>(norient) * bh * w, 0.0);

    for (int j = 0; j < norient; ++j) {
      const OrientationKernel& k = kernels[static_cast<std::size_t>(j)];
      std::fill(strip_sum.begin(), strip_sum.end(), 0.0);
      for (int sy = 0; sy < sh; ++sy) {
        double* dst = strip_sum.data() + static_cast<std::size_t>(sy) * sw;
        const int y = y0 + sy - flank_reach;
        rows.clear();
        for (const Tap& t : k.strip) rows.push_back(src.row(y + t.dy) + t.dx - flank_reach);
        accumulate_taps(k.strip, rows, dst, sw);
      }
      double* r = resp.data() + static_cast<std::size_t>(j) * bh * w;
      for (int by = 0; by < bh; ++by) {
        double* dst = r + static_cast<std::size_t>(by) * w;
        const double* center = strip_sum.data() + static_cast<std::size_t>(by + flank_reach) * sw + flank_reach;
        for (int x = 0; x < w; ++x) dst[x] = -center[x];
        for (const Tap& t : k.flank) {
          const double* s = center + static_cast<std::ptrdiff_t>(t.dy) * sw + t.dx;
          const double wt = t.w;
          for (int x = 0; x < w; ++x) dst[x] += wt * s[x];
        }
      }
    }

    // Row-wise argmax over orientations; ties keep the lowest index.
    for (int by = 0; by < bh; ++by) {
      const std::size_t plane = static_cast<std::size_t>(bh) * w;
      const double* row0 = resp.data() + static_cast<std::size_t>(by) * w;
      std::copy(row0, row0 + w, best_row.begin());
      std::fill(best_idx.begin(), best_idx.end(), 0);
      for (int j = 1; j < norient; ++j) {
        const double* rj = row0 + j * plane;
        for (int x = 0; x < w; ++x) {
          if (rj[x] > best_row[static_cast<std::size_t>(x)]) {
            best_row[static_cast<std::size_t>(x)] = rj[x];
            best_idx[static_cast<std::size_t>(x)] = j;
          }
        }
      }
      for (int x = 0; x < w; ++x) {
        const int best = best_idx[static_cast<std::size_t>(x)];
        const double best_r = best_row[static_cast<std::size_t>(x)];
        const std::size_t idx = static_cast<std::size_t>(y0 + by) * w + x;
        if (best_r <= 0.0) continue;
        auto at = [&](int j) {
          if (j < 0) j += norient;
          if (j >= norient) j -= norient;
          return row0[static_cast<std::size_t>(j) * plane + x];
        };
        // Parabolic refinement over the circular orientation axis.
        const double rm = at(best - 1);
        const double rp = at(best + 1);
        const double den = rm - 2.0 * best_r + rp;
        double offset = den < 0.0 ? 0.5 * (rm - rp) / den : 0.0;
        offset = std::clamp(offset, -0.5, 0.5);
        double theta = (best + offset) * kPi / norient;
        if (theta < 0.0) theta += kPi;
        if (theta >= kPi) theta -= kPi;
        out.gain[idx] = best_r * norm;
        out.orientation[idx] = theta;
      }
    }
  }
  return out;
}

double estimate_noise_sigma(const RasterImage& img) {
  if (img.width() < 2) return 0.0;
  std::vector<double> diffs;
  diffs.reserve(static_cast<std::size_t>(img.width() - 1) * img.height());
  for (int y = 0; y < img.height(); ++y)
    for (int x = 0; x + 1 < img.width(); ++x) diffs.push_back(std::abs(img.at(x + 1, y) - img.at(x, y)));
  auto mid = diffs.begin() + static_cast<std::ptrdiff_t>(diffs.size() / 2);
  std::nth_element(diffs.begin(), mid, diffs.end());
  // MAD of a difference of two iid samples -> per-pixel sigma.
  return *mid / (0.6744897501960817 * std::numbers::sqrt2);
}

}  // namespace

ResponseField::ResponseField(int width, int height, int level_count, double luminosity_range, double threshold,
                             double noise_gain)
    : width_(width),
      height_(height),
      level_count_(level_count),
      luminosity_range_(luminosity_range),
      threshold_(threshold),
      noise_gain_(noise_gain),
      gain_(static_cast<std::size_t>(width) * height, 0.0),
      orientation_(static_cast<std::size_t>(width) * height, 0.0),
      fine_gain_(static_cast<std::size_t>(width) * height, 0.0),
      fine_orientation_(static_cast<std::size_t>(width) * height, 0.0),
      weight_slot_(static_cast<std::size_t>(width) * height, -1) {}

void ResponseField::set(int x, int y, double gain, double orientation, std::span<const double> level_weights) {
  const std::size_t i = index(x, y);
  gain_[i] = gain;
  orientation_[i] = orientation;
  if (!exceeds_threshold(gain, threshold_)) return;
  if (level_weights.size() != static_cast<std::size_t>(level_count_))
    throw ParamError("level weight count does not match the field");
  if (weight_slot_[i] < 0) {
    weight_slot_[i] = static_cast<std::int32_t>(weights_.size() / level_count_);
    weights_.insert(weights_.end(), level_weights.begin(), level_weights.end());
  } else {
    std::copy(level_weights.begin(), level_weights.end(),
              weights_.begin() + static_cast<std::ptrdiff_t>(weight_slot_[i]) * level_count_);
  }
}

NodeResponse ResponseField::node(int x, int y) const {
  const std::size_t i = index(x, y);
  NodeResponse n;
  n.position = {static_cast<double>(x), static_cast<double>(y)};
  n.gain = gain_[i];
  n.orientation = orientation_[i];
  n.level_weights.assign(static_cast<std::size_t>(level_count_), 0.0);
  if (weight_slot_[i] >= 0) {
    auto first = weights_.begin() + static_cast<std::ptrdiff_t>(weight_slot_[i]) * level_count_;
    std::copy(first, first + level_count_, n.level_weights.begin());
  }
  return n;
}

namespace {

// Allocation-free core of merge_node; `weights` has one slot per level.
bool merge_levels(std::span<const LevelSample> levels, double threshold, double* weights, double& gain,
                  double& orientation) {
  double total = 0.0;
  std::size_t ref = levels.size();
  for (std::size_t k = 0; k < levels.size(); ++k) {
    weights[k] = 0.0;
    if (!exceeds_threshold(levels[k].gain, threshold)) continue;
    total += levels[k].gain;
    if (ref == levels.size() || levels[k].gain > levels[ref].gain) ref = k;
  }
  gain = 0.0;
  orientation = 0.0;
  if (ref == levels.size()) return false;

  // Doubled-angle mean taken relative to the strongest level, so equal
  // orientations reproduce it without round-off.
  const double theta_ref = levels[ref].orientation;
  double sx = 0.0;
  double sy = 0.0;
  for (std::size_t k = 0; k < levels.size(); ++k) {
    if (!exceeds_threshold(levels[k].gain, threshold)) continue;
    const double w = levels[k].gain / total;
    weights[k] = w;
    if (k == ref) {
      sx += w * levels[k].gain;
      continue;
    }
    const double phi = 2.0 * (levels[k].orientation - theta_ref);
    sx += w * levels[k].gain * std::cos(phi);
    sy += w * levels[k].gain * std::sin(phi);
  }
  gain = sy == 0.0 ? std::abs(sx) : std::hypot(sx, sy);
  double theta = theta_ref + 0.5 * std::atan2(sy, sx);
  if (theta < 0.0) theta += kPi;
  if (theta >= kPi) theta -= kPi;
  orientation = theta;
  return true;
}

}  // namespace

MergedSample merge_node(std::span<const LevelSample> levels, double threshold) {
  MergedSample m;
  m.level_weights.assign(levels.size(), 0.0);
  merge_levels(levels, threshold, m.level_weights.data(), m.gain, m.orientation);
  return m;
}

LinearityField detect_linearity(const ResolutionStack& stack, const DetectorParams& params) {
  if (params.orientations < 4) throw ParamError("detector needs at least 4 orientations");
  if (!(params.threshold_fraction > 0.0)) throw ParamError("threshold_fraction must be positive");
  if (params.strip_length < 3 || params.strip_length % 2 == 0) throw ParamError("strip_length must be odd and >= 3");
  if (!(params.flank_offset > 0.0) || !(params.flank_weight > 0.0)) throw ParamError("flank offset/weight must be positive");
  if (stack.levels.empty()) throw ParamError("empty resolution stack");

  const RasterImage& base = stack.levels.front();
  LinearityField field;
  field.width = base.width();
  field.height = base.height();
  field.luminosity_range = overall_luminosity(base);
  field.threshold = params.threshold_fraction;

  std::vector<OrientationKernel> kernels;
  for (int j = 0; j < params.orientations; ++j) kernels.push_back(make_kernel(j * kPi / params.orientations, params));

  for (const RasterImage& level : stack.levels)
    field.levels.push_back(compute_level(level, kernels, params, field.luminosity_range));

  if (field.luminosity_range > 0.0) {
    const double len = params.strip_length;
    const double kernel_norm = std::sqrt(len + 2.0 * params.flank_weight * params.flank_weight * len);
    field.noise_gain = estimate_noise_sigma(base) * kernel_norm / (params.strip_length * field.luminosity_range);
  }
  return field;
}

ResponseField merge_resolutions(const LinearityField& field) {
  const int nlev = static_cast<int>(field.levels.size());
  if (nlev == 0) throw ParamError("no levels to merge");
  ResponseField out(field.width, field.height, nlev, field.luminosity_range, field.threshold, field.noise_gain);

  // Coarse levels are resampled as doubled-angle vectors (g cos 2t, g sin 2t)
  // of their linear nodes, bilinearly at native pixel centers.
  struct VecLevel {
    int w, h;
    std::vector<double> cx, cy;
  };
  std::vector<VecLevel> vec(static_cast<std::size_t>(nlev));
  for (int k = 1; k < nlev; ++k) {
    const LevelResponse& lv = field.levels[static_cast<std::size_t>(k)];
    VecLevel& v = vec[static_cast<std::size_t>(k)];
    v.w = lv.width;
    v.h = lv.height;
    v.cx.assign(lv.gain.size(), 0.0);
    v.cy.assign(lv.gain.size(), 0.0);
    for (std::size_t i = 0; i < lv.gain.size(); ++i) {
      if (!exceeds_threshold(lv.gain[i], field.threshold)) continue;
      v.cx[i] = lv.gain[i] * std::cos(2.0 * lv.orientation[i]);
      v.cy[i] = lv.gain[i] * std::sin(2.0 * lv.orientation[i]);
    }
  }

  std::vector<LevelSample> samples(static_cast<std::size_t>(nlev));
  std::vector<double> weights(static_cast<std::size_t>(nlev));
  const LevelResponse& l0 = field.levels.front();
  for (int y = 0; y < field.height; ++y) {
    for (int x = 0; x < field.width; ++x) {
      samples[0] = {l0.gain_at(x, y), l0.orientation_at(x, y)};
      out.set_fine(x, y, samples[0].gain, samples[0].orientation);
      bool any = exceeds_threshold(samples[0].gain, field.threshold);
      for (int k = 1; k < nlev; ++k) {
        const VecLevel& v = vec[static_cast<std::size_t>(k)];
        const double scale = std::ldexp(1.0, -k);
        const double u = std::clamp((x + 0.5) * scale - 0.5, 0.0, v.w - 1.0);
        const double t = std::clamp((y + 0.5) * scale - 0.5, 0.0, v.h - 1.0);
        const int ix = std::min(static_cast<int>(u), v.w - 1);
        const int iy = std::min(static_cast<int>(t), v.h - 1);
        const int ix1 = std::min(ix + 1, v.w - 1);
        const int iy1 = std::min(iy + 1, v.h - 1);
        const double ax = u - ix;
        const double ay = t - iy;
        auto lerp2 = [&](const std::vector<double>& c) {
          const double a = c[static_cast<std::size_t>(iy) * v.w + ix] * (1 - ax) + c[static_cast<std::size_t>(iy) * v.w + ix1] * ax;
          const double b = c[static_cast<std::size_t>(iy1) * v.w + ix] * (1 - ax) + c[static_cast<std::size_t>(iy1) * v.w + ix1] * ax;
          return a * (1 - ay) + b * ay;
        };
        const double cx = lerp2(v.cx);
        const double cy = lerp2(v.cy);
        const double g = std::hypot(cx, cy);
        samples[static_cast<std::size_t>(k)] = {g, 0.0};
        if (exceeds_threshold(g, field.threshold)) {
          double th = 0.5 * std::atan2(cy, cx);
          if (th < 0.0) th += kPi;
          samples[static_cast<std::size_t>(k)].orientation = th;
          any = true;
        }
      }
      if (!any) continue;
      double g = 0.0;
      double th = 0.0;
      merge_levels(samples, field.threshold, weights.data(), g, th);
      out.set(x, y, g, th, weights);
    }
  }
  return out;
}

VectorScene vectorize(const RasterImage& img, const VectorizeParams& params) {
  const ResolutionStack stack = build_pyramid(img, params.levels);
  const LinearityField field = detect_linearity(stack, params.detector);
  const ResponseField merged = merge_resolutions(field);
  VectorScene scene = trace_segments(merged, params.tracer);
  if (params.snap_deg >= 0.0) scene = snap_orthogonal(scene, params.snap_deg);
  auto& pp = scene.provenance.parameters;
  pp["levels"] = params.levels;
  pp["orientations"] = params.detector.orientations;
  pp["threshold_fraction"] = params.detector.threshold_fraction;
  pp["strip_length"] = params.detector.strip_length;
  pp["snap_deg"] = params.snap_deg;
  return scene;
}

}  // namespace sketchopt
