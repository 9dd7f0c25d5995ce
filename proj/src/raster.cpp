#include "sketchopt/raster.hpp"

#include "sketchopt/errors.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

namespace sketchopt {

RasterImage::RasterImage(int width, int height, std::vector<double> intensity, int source_depth)
    : width_(width), height_(height), source_depth_(source_depth), intensity_(std::move(intensity)) {
  if (width < 1 || height < 1) throw FormatError("raster has zero dimension");
  if (intensity_.size() != static_cast<std::size_t>(width) * height)
    throw ParamError("raster intensity length does not match " + std::to_string(width) + "x" +
                     std::to_string(height));
  for (double v : intensity_) {
    if (!(v >= 0.0 && v <= 1.0)) throw ParamError("raster intensity outside [0,1]");
  }
}

RasterImage RasterImage::filled(int width, int height, double value) {
  if (width < 1 || height < 1) throw FormatError("raster has zero dimension");
  return RasterImage(width, height,
                     std::vector<double>(static_cast<std::size_t>(width) * height, value));
}

double RasterImage::min() const { return *std::min_element(intensity_.begin(), intensity_.end()); }
double RasterImage::max() const { return *std::max_element(intensity_.begin(), intensity_.end()); }
double RasterImage::mean() const {
  return std::accumulate(intensity_.begin(), intensity_.end(), 0.0) / static_cast<double>(size());
}

namespace {

RasterImage downsample(const RasterImage& src) {
  const int w = src.width();
  const int h = src.height();
  const int cw = (w + 1) / 2;
  const int ch = (h + 1) / 2;
  std::vector<double> out(static_cast<std::size_t>(cw) * ch);
  for (int y = 0; y < ch; ++y) {
    const int y0 = 2 * y;
    const int y1 = std::min(y0 + 1, h - 1);
    for (int x = 0; x < cw; ++x) {
      const int x0 = 2 * x;
      const int x1 = std::min(x0 + 1, w - 1);
      double sum = 0.0;
      int n = 0;
      for (int yy = y0; yy <= y1; ++yy)
        for (int xx = x0; xx <= x1; ++xx) {
          sum += src.at(xx, yy);
          ++n;
        }
      // Clamp guards round-off pushing a mean of 1.0 values past 1.
      out[static_cast<std::size_t>(y) * cw + x] = std::clamp(sum / n, 0.0, 1.0);
    }
  }
  return RasterImage(cw, ch, std::move(out), src.source_depth());
}

}  // namespace

ResolutionStack build_pyramid(const RasterImage& img, int levels) {
  if (levels < 1) throw ParamError("pyramid needs at least one level");
  if (img.width() < 1 || img.height() < 1) throw ParamError("invalid raster");
  ResolutionStack stack;
  stack.levels.reserve(static_cast<std::size_t>(levels));
  stack.levels.push_back(img);
  for (int k = 1; k < levels; ++k) {
    const RasterImage& prev = stack.levels.back();
    if (prev.width() == 1 && prev.height() == 1)
      throw ParamError("pyramid level " + std::to_string(k) + " would be smaller than 1x1");
    stack.levels.push_back(downsample(prev));
  }
  return stack;
}

double overall_luminosity(const RasterImage& img) { return img.max() - img.min(); }

double footprint_weighted_mean(const ResolutionStack& stack, int level) {
  if (level < 0 || level >= stack.level_count()) throw ParamError("no such pyramid level");
  const RasterImage& base = stack.levels.front();
  const RasterImage& lv = stack.levels[static_cast<std::size_t>(level)];
  // Native extent of coarse index i along an axis of native length n.
  auto extent = [level](int i, int n) {
    const long lo = static_cast<long>(i) << level;
    const long hi = std::min<long>(static_cast<long>(i + 1) << level, n);
    return static_cast<double>(hi - lo);
  };
  double sum = 0.0;
  for (int y = 0; y < lv.height(); ++y) {
    const double ey = extent(y, base.height());
    for (int x = 0; x < lv.width(); ++x) sum += lv.at(x, y) * ey * extent(x, base.width());
  }
  return sum / static_cast<double>(base.size());
}

}  // namespace sketchopt
