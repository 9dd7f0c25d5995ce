#include "sketchopt/errors.hpp"
#include "sketchopt/raster.hpp"
#include "sketchopt/synth.hpp"
#include "support.hpp"

#include <doctest.h>
#include <png.h>

#include <fstream>
#include <random>

using namespace sketchopt;
using namespace sketchopt::testing;

namespace {

void write_bytes(const std::filesystem::path& p, const std::string& bytes) {
  std::ofstream out(p, std::ios::binary);
  out << bytes;
}

void write_rgb_png(const std::filesystem::path& p, int w, int h, const std::vector<unsigned char>& rgb) {
  png_image img{};
  img.version = PNG_IMAGE_VERSION;
  img.width = w;
  img.height = h;
  img.format = PNG_FORMAT_RGB;
  REQUIRE(png_image_write_to_file(&img, p.c_str(), 0, rgb.data(), 0, nullptr));
}

RasterImage noise_image(int w, int h, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::vector<double> px(static_cast<std::size_t>(w) * h);
  for (double& v : px) v = u(rng);
  return RasterImage(w, h, std::move(px));
}

}  // namespace

TEST_CASE("8-bit PGM maps 0 and 255 to the ends of the unit range") {
  const auto dir = scratch_dir("raster_pgm8");
  write_bytes(dir / "a.pgm", std::string("P5\n2 1\n255\n") + '\x00' + '\xff');
  const RasterImage img = load_raster(dir / "a.pgm");
  CHECK(img.width() == 2);
  CHECK(img.height() == 1);
  CHECK(img.at(0, 0) == 0.0);
  CHECK(img.at(1, 0) == 1.0);
  CHECK(img.source_depth() == 8);
}

TEST_CASE("ASCII PGM reads like binary") {
  const auto dir = scratch_dir("raster_p2");
  write_bytes(dir / "a.pgm", "P2\n# comment\n2 1\n255\n0 255\n");
  const RasterImage img = load_raster(dir / "a.pgm");
  CHECK(img.at(0, 0) == 0.0);
  CHECK(img.at(1, 0) == 1.0);
}

TEST_CASE("16-bit mid gray scales by 65535") {
  const auto dir = scratch_dir("raster_pgm16");
  std::string bytes = "P5\n2 2\n65535\n";
  for (int i = 0; i < 4; ++i) bytes += std::string{'\x80', '\x00'};
  write_bytes(dir / "g.pgm", bytes);
  const RasterImage img = load_raster(dir / "g.pgm");
  for (double v : img.intensity()) CHECK(v == doctest::Approx(32768.0 / 65535.0).epsilon(1e-15));
  CHECK(img.source_depth() == 16);
}

TEST_CASE("RGB collapses with luminosity weights") {
  const auto dir = scratch_dir("raster_rgb");
  write_rgb_png(dir / "c.png", 3, 1, {255, 0, 0, 0, 255, 0, 0, 0, 255});
  const RasterImage img = load_raster(dir / "c.png");
  CHECK(img.at(0, 0) == doctest::Approx(0.2126).epsilon(1e-12));
  CHECK(img.at(1, 0) == doctest::Approx(0.7152).epsilon(1e-12));
  CHECK(img.at(2, 0) == doctest::Approx(0.0722).epsilon(1e-12));
}

TEST_CASE("load errors") {
  const auto dir = scratch_dir("raster_errors");
  CHECK_THROWS_AS(load_raster(dir / "missing.png"), IoError);
  write_bytes(dir / "junk.png", "not an image at all");
  CHECK_THROWS_AS(load_raster(dir / "junk.png"), FormatError);
  write_bytes(dir / "zero.pgm", "P5\n0 0\n255\n");
  CHECK_THROWS_AS(load_raster(dir / "zero.pgm"), FormatError);
  write_bytes(dir / "short.pgm", "P5\n4 4\n255\nab");
  CHECK_THROWS_AS(load_raster(dir / "short.pgm"), FormatError);
}

TEST_CASE("PGM16, PFM and 16-bit PNG round trips stay within one quantization step") {
  const auto dir = scratch_dir("raster_roundtrip");
  const RasterImage img = noise_image(37, 23, 5);
  save_pgm16(img, dir / "a.pgm");
  save_pfm(img, dir / "a.pfm");
  save_png(img, dir / "a.png", 16);
  const RasterImage pgm = load_raster(dir / "a.pgm");
  const RasterImage pfm = load_raster(dir / "a.pfm");
  const RasterImage png = load_raster(dir / "a.png");
  for (std::size_t i = 0; i < img.size(); ++i) {
    CHECK(std::abs(pgm.intensity()[i] - img.intensity()[i]) <= 1.0 / 65535.0);
    CHECK(std::abs(png.intensity()[i] - img.intensity()[i]) <= 1.0 / 65535.0);
    CHECK(std::abs(pfm.intensity()[i] - img.intensity()[i]) <= 1e-7);
  }
  // A reloaded canonical PGM is a fixed point of the writer.
  save_pgm16(pgm, dir / "b.pgm");
  const RasterImage again = load_raster(dir / "b.pgm");
  CHECK(std::equal(again.intensity().begin(), again.intensity().end(), pgm.intensity().begin()));
}

TEST_CASE("loading is pure") {
  const auto dir = scratch_dir("raster_pure");
  save_png(noise_image(16, 16, 9), dir / "n.png");
  const RasterImage a = load_raster(dir / "n.png");
  const RasterImage b = load_raster(dir / "n.png");
  CHECK(std::equal(a.intensity().begin(), a.intensity().end(), b.intensity().begin()));
}

TEST_CASE("constructor validation") {
  CHECK_THROWS_AS(RasterImage(0, 3, {}), FormatError);
  CHECK_THROWS_AS(RasterImage(2, 2, {0.1, 0.2, 0.3}), ParamError);
  CHECK_THROWS_AS(RasterImage(1, 1, {1.5}), ParamError);
}

TEST_CASE("constant image is a pyramid fixed point") {
  const ResolutionStack s = build_pyramid(RasterImage::filled(4, 4, 0.3), 3);
  REQUIRE(s.level_count() == 3);
  const int sizes[] = {4, 2, 1};
  for (int k = 0; k < 3; ++k) {
    CHECK(s.levels[k].width() == sizes[k]);
    CHECK(s.levels[k].height() == sizes[k]);
    for (double v : s.levels[k].intensity()) CHECK(v == doctest::Approx(0.3).epsilon(1e-15));
  }
}

TEST_CASE("2x2 box filter is the mean") {
  const ResolutionStack s = build_pyramid(RasterImage(2, 2, {0, 1, 0, 1}), 2);
  REQUIRE(s.levels[1].size() == 1);
  CHECK(s.levels[1].at(0, 0) == 0.5);
}

TEST_CASE("odd edges average the available pixels only") {
  const ResolutionStack s = build_pyramid(RasterImage(3, 1, {0.0, 0.2, 0.9}), 2);
  REQUIRE(s.levels[1].width() == 2);
  CHECK(s.levels[1].at(0, 0) == doctest::Approx(0.1));
  CHECK(s.levels[1].at(1, 0) == doctest::Approx(0.9));
}

TEST_CASE("level 0 is the input unchanged") {
  const RasterImage img = noise_image(9, 7, 1);
  const ResolutionStack s = build_pyramid(img, 3);
  CHECK(std::equal(img.intensity().begin(), img.intensity().end(), s.levels[0].intensity().begin()));
}

TEST_CASE("too many levels is a ParamError") {
  CHECK_THROWS_AS(build_pyramid(RasterImage::filled(4, 4, 0.5), 4), ParamError);
  CHECK_THROWS_AS(build_pyramid(RasterImage::filled(4, 4, 0.5), 0), ParamError);
  CHECK_NOTHROW(build_pyramid(RasterImage::filled(1, 1, 0.5), 1));
}

TEST_CASE("pyramid levels conserve the mean of a 3000x3000 noise image") {
  const RasterImage img = noise_image(3000, 3000, 2024);
  const ResolutionStack s = build_pyramid(img, 5);
  // Independent oracle: compensated sum over the native pixels.
  long double sum = 0.0L;
  for (double v : img.intensity()) sum += v;
  const double mean = static_cast<double>(sum / img.size());
  for (int k = 0; k < s.level_count(); ++k) CHECK(std::abs(footprint_weighted_mean(s, k) - mean) <= 1e-6);
}

TEST_CASE("overall luminosity is the dynamic range") {
  CHECK(overall_luminosity(RasterImage(2, 1, {0.1, 0.9})) == doctest::Approx(0.8));
  CHECK(overall_luminosity(RasterImage::filled(5, 5, 0.4)) == 0.0);

  synth::Plan p;
  p.width = 64;
  p.height = 64;
  p.walls = {{{10, 32}, {54, 32}, 3, 0.8}};
  synth::RenderOptions ro;
  ro.background = 1.0;
  ro.ink = 0.0;
  const RasterImage img = synth::rasterize(p, ro);
  double lo = 1.0, hi = 0.0;
  for (double v : img.intensity()) {
    lo = std::min(lo, v);
    hi = std::max(hi, v);
  }
  CHECK(hi == 1.0);
  CHECK(lo == doctest::Approx(0.2));
  CHECK(overall_luminosity(img) == doctest::Approx(0.8));
}
