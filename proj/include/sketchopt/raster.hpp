#pragma once

#include <cstddef>
#include <filesystem>
#include <span>
#include <vector>

namespace sketchopt {

/// Grayscale intensity field in [0,1], row-major, y down.
class RasterImage {
public:
  RasterImage() = default;
  /// Throws FormatError on zero dimensions, ParamError on a size mismatch or
  /// on values outside [0,1].
  RasterImage(int width, int height, std::vector<double> intensity, int source_depth = 64);
  static RasterImage filled(int width, int height, double value);

  int width() const noexcept { return width_; }
  int height() const noexcept { return height_; }
  int source_depth() const noexcept { return source_depth_; }
  std::size_t size() const noexcept { return intensity_.size(); }
  std::span<const double> intensity() const noexcept { return intensity_; }

  double at(int x, int y) const { return intensity_[static_cast<std::size_t>(y) * width_ + x]; }

  double min() const;
  double max() const;
  double mean() const;

private:
  int width_ = 0;
  int height_ = 0;
  int source_depth_ = 64;
  std::vector<double> intensity_;
};

/// Level 0 is the native image; level k+1 is the 2x2 box-filter of level k.
struct ResolutionStack {
  std::vector<RasterImage> levels;
  int level_count() const noexcept { return static_cast<int>(levels.size()); }
};

inline constexpr int kDefaultPyramidLevels = 5;

/// Load PNG (8/16-bit gray, gray+alpha, RGB, RGBA; alpha ignored), PGM (P2/P5)
/// or PFM (Pf/PF). RGB is collapsed with Rec. 709 luminosity weights.
RasterImage load_raster(const std::filesystem::path& path);

/// Canonical debug output: binary P5 PGM with 16-bit big-endian samples.
void save_pgm16(const RasterImage& img, const std::filesystem::path& path);
/// Grayscale float PFM (little-endian, bottom-to-top rows).
void save_pfm(const RasterImage& img, const std::filesystem::path& path);
/// 8- or 16-bit grayscale PNG.
void save_png(const RasterImage& img, const std::filesystem::path& path, int bit_depth = 8);

ResolutionStack build_pyramid(const RasterImage& img, int levels = kDefaultPyramidLevels);

/// Dynamic range max - min; detection thresholds are fractions of it.
double overall_luminosity(const RasterImage& img);

/// Mean of a pyramid level weighted by how many native pixels each level
/// pixel covers. Matches the level-0 mean up to round-off whenever every
/// halving before the last one sees even dimensions (native size divisible by
/// 2^(level-1)); the plain mean only does so when all halvings are even.
double footprint_weighted_mean(const ResolutionStack& stack, int level);

}  // namespace sketchopt
