#include "sketchopt/errors.hpp"
#include "sketchopt/raster.hpp"

#include <png.h>

#include <algorithm>
#include <bit>
#include <cctype>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <iterator>
#include <memory>
#include <sstream>
#include <string>

namespace sketchopt {

namespace {

constexpr double kLumR = 0.2126;
constexpr double kLumG = 0.7152;
constexpr double kLumB = 0.0722;

constexpr std::uint32_t byteswap32(std::uint32_t v) {
  return (v >> 24) | ((v >> 8) & 0xff00u) | ((v << 8) & 0xff0000u) | (v << 24);
}

std::vector<unsigned char> read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open '" + path.string() + "'");
  std::vector<unsigned char> bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  if (in.bad()) throw IoError("read failed for '" + path.string() + "'");
  return bytes;
}

// ---------------------------------------------------------------- PNG

struct PngReadState {
  const std::vector<unsigned char>* bytes;
  std::size_t offset;
};

void png_read_from_memory(png_structp png, png_bytep out, png_size_t count) {
  auto* st = static_cast<PngReadState*>(png_get_io_ptr(png));
  if (st->offset + count > st->bytes->size()) png_error(png, "truncated PNG");  // longjmps
  std::memcpy(out, st->bytes->data() + st->offset, count);
  st->offset += count;
}

// libpng reports errors by longjmp; the helpers below keep only trivially
// destructible locals between setjmp and the libpng calls.
struct PngErrorSink {
  char message[256] = "unknown error";
};

void png_error_fn(png_structp png, png_const_charp msg) {
  auto* sink = static_cast<PngErrorSink*>(png_get_error_ptr(png));
  std::snprintf(sink->message, sizeof(sink->message), "%s", msg);
  png_longjmp(png, 1);
}
void png_warning_fn(png_structp, png_const_charp) {}

struct PngHeader {
  png_uint_32 width = 0;
  png_uint_32 height = 0;
  int depth = 0;
  int channels = 0;
  std::size_t rowbytes = 0;
};

bool png_read_header(png_structp png, png_infop info, PngHeader* hdr) {
  if (setjmp(png_jmpbuf(png))) return false;
  png_read_info(png, info);
  hdr->width = png_get_image_width(png, info);
  hdr->height = png_get_image_height(png, info);
  hdr->depth = png_get_bit_depth(png, info);
  const int color = png_get_color_type(png, info);
  if (color == PNG_COLOR_TYPE_PALETTE) {
    png_set_palette_to_rgb(png);
    hdr->depth = 8;
  }
  if (color == PNG_COLOR_TYPE_GRAY && hdr->depth < 8) {
    png_set_expand_gray_1_2_4_to_8(png);
    hdr->depth = 8;
  }
  if (hdr->depth == 16 && std::endian::native == std::endian::little) png_set_swap(png);
  png_read_update_info(png, info);
  hdr->channels = png_get_channels(png, info);
  hdr->rowbytes = png_get_rowbytes(png, info);
  return true;
}

bool png_read_rows(png_structp png, png_bytepp rows) {
  if (setjmp(png_jmpbuf(png))) return false;
  png_read_image(png, rows);
  return true;
}

RasterImage decode_png(const std::vector<unsigned char>& bytes) {
  PngErrorSink sink;
  png_structp png = png_create_read_struct(PNG_LIBPNG_VER_STRING, &sink, png_error_fn, png_warning_fn);
  if (!png) throw FormatError("PNG: cannot allocate decoder");
  png_infop info = png_create_info_struct(png);
  struct Guard {
    png_structp* p;
    png_infop* i;
    ~Guard() { png_destroy_read_struct(p, i, nullptr); }
  } guard{&png, &info};

  PngReadState state{&bytes, 0};
  png_set_read_fn(png, &state, png_read_from_memory);
  PngHeader hdr;
  if (!png_read_header(png, info, &hdr)) throw FormatError(std::string("PNG: ") + sink.message);
  if (hdr.width == 0 || hdr.height == 0) throw FormatError("PNG has zero dimension");

  std::vector<unsigned char> data(hdr.rowbytes * hdr.height);
  std::vector<png_bytep> rows(hdr.height);
  for (png_uint_32 y = 0; y < hdr.height; ++y) rows[y] = data.data() + y * hdr.rowbytes;
  if (!png_read_rows(png, rows.data())) throw FormatError(std::string("PNG: ") + sink.message);

  const int depth = hdr.depth;
  const int channels = hdr.channels;
  const png_uint_32 w = hdr.width;
  const png_uint_32 h = hdr.height;
  const double scale = depth == 16 ? 65535.0 : 255.0;
  const bool rgb = channels >= 3;
  std::vector<double> out(static_cast<std::size_t>(w) * h);
  for (png_uint_32 y = 0; y < h; ++y) {
    for (png_uint_32 x = 0; x < w; ++x) {
      auto sample = [&](int c) -> double {
        const std::size_t i = static_cast<std::size_t>(x) * channels + c;
        if (depth == 16) {
          std::uint16_t v;
          std::memcpy(&v, rows[y] + 2 * i, 2);
          return v / scale;
        }
        return rows[y][i] / scale;
      };
      const double v = rgb ? kLumR * sample(0) + kLumG * sample(1) + kLumB * sample(2) : sample(0);
      out[static_cast<std::size_t>(y) * w + x] = std::clamp(v, 0.0, 1.0);
    }
  }
  return RasterImage(static_cast<int>(w), static_cast<int>(h), std::move(out), depth);
}

// ---------------------------------------------------------------- PGM

class HeaderReader {
public:
  HeaderReader(const std::vector<unsigned char>& b, std::size_t pos) : b_(b), pos_(pos) {}

  long next_int() {
    skip_space_and_comments();
    if (pos_ >= b_.size() || !std::isdigit(b_[pos_])) throw FormatError("malformed PNM header");
    long v = 0;
    while (pos_ < b_.size() && std::isdigit(b_[pos_])) {
      v = v * 10 + (b_[pos_++] - '0');
      if (v > (1L << 30)) throw FormatError("PNM header value too large");
    }
    return v;
  }
  std::string next_token() {
    skip_space_and_comments();
    std::string t;
    while (pos_ < b_.size() && !std::isspace(b_[pos_])) t.push_back(static_cast<char>(b_[pos_++]));
    if (t.empty()) throw FormatError("malformed header");
    return t;
  }
  // Exactly one whitespace byte separates the header from binary data.
  std::size_t data_start() {
    if (pos_ >= b_.size() || !std::isspace(b_[pos_])) throw FormatError("malformed header end");
    return pos_ + 1;
  }
  std::size_t pos() const { return pos_; }

private:
  void skip_space_and_comments() {
    while (pos_ < b_.size()) {
      if (std::isspace(b_[pos_])) {
        ++pos_;
      } else if (b_[pos_] == '#') {
        while (pos_ < b_.size() && b_[pos_] != '\n') ++pos_;
      } else {
        break;
      }
    }
  }

  const std::vector<unsigned char>& b_;
  std::size_t pos_;
};

int depth_for_maxval(long maxval) {
  int bits = 0;
  while ((1L << bits) - 1 < maxval) ++bits;
  return bits;
}

RasterImage decode_pgm(const std::vector<unsigned char>& bytes) {
  const bool ascii = bytes[1] == '2';
  HeaderReader hr(bytes, 2);
  const long w = hr.next_int();
  const long h = hr.next_int();
  const long maxval = hr.next_int();
  if (w <= 0 || h <= 0) throw FormatError("PGM has zero dimension");
  if (maxval <= 0 || maxval > 65535) throw FormatError("PGM maxval out of range");
  const std::size_t n = static_cast<std::size_t>(w) * static_cast<std::size_t>(h);
  std::vector<double> out(n);
  if (ascii) {
    for (std::size_t i = 0; i < n; ++i) {
      const long v = hr.next_int();
      if (v > maxval) throw FormatError("PGM sample exceeds maxval");
      out[i] = static_cast<double>(v) / maxval;
    }
  } else {
    const std::size_t start = hr.data_start();
    const int bps = maxval > 255 ? 2 : 1;
    if (bytes.size() < start + n * bps) throw FormatError("truncated PGM data");
    for (std::size_t i = 0; i < n; ++i) {
      long v = bps == 2 ? (bytes[start + 2 * i] << 8) | bytes[start + 2 * i + 1] : bytes[start + i];
      if (v > maxval) throw FormatError("PGM sample exceeds maxval");
      out[i] = static_cast<double>(v) / maxval;
    }
  }
  return RasterImage(static_cast<int>(w), static_cast<int>(h), std::move(out), depth_for_maxval(maxval));
}

// ---------------------------------------------------------------- PFM

RasterImage decode_pfm(const std::vector<unsigned char>& bytes) {
  const bool color = bytes[1] == 'F';
  HeaderReader hr(bytes, 2);
  const long w = hr.next_int();
  const long h = hr.next_int();
  const double scale = std::stod(hr.next_token());
  if (w <= 0 || h <= 0) throw FormatError("PFM has zero dimension");
  if (scale == 0.0 || !std::isfinite(scale)) throw FormatError("PFM scale must be nonzero");
  const bool little = scale < 0.0;
  const std::size_t start = hr.data_start();
  const int ch = color ? 3 : 1;
  const std::size_t n = static_cast<std::size_t>(w) * static_cast<std::size_t>(h);
  if (bytes.size() < start + n * ch * 4) throw FormatError("truncated PFM data");

  auto sample = [&](std::size_t i) {
    std::uint32_t u;
    std::memcpy(&u, bytes.data() + start + 4 * i, 4);
    if ((std::endian::native == std::endian::little) != little) u = byteswap32(u);
    float f;
    std::memcpy(&f, &u, 4);
    if (!std::isfinite(f)) throw FormatError("PFM sample is not finite");
    return static_cast<double>(f);
  };

  std::vector<double> out(n);
  for (long row = 0; row < h; ++row) {
    // PFM stores the bottom row first.
    const std::size_t dst = static_cast<std::size_t>(h - 1 - row) * w;
    for (long x = 0; x < w; ++x) {
      const std::size_t i = (static_cast<std::size_t>(row) * w + x) * ch;
      const double v = color ? kLumR * sample(i) + kLumG * sample(i + 1) + kLumB * sample(i + 2) : sample(i);
      out[dst + x] = std::clamp(v, 0.0, 1.0);
    }
  }
  return RasterImage(static_cast<int>(w), static_cast<int>(h), std::move(out), 32);
}

void write_file(const std::filesystem::path& path, const std::string& header, const std::vector<unsigned char>& body) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write '" + path.string() + "'");
  out.write(header.data(), static_cast<std::streamsize>(header.size()));
  out.write(reinterpret_cast<const char*>(body.data()), static_cast<std::streamsize>(body.size()));
  if (!out) throw IoError("write failed for '" + path.string() + "'");
}

}  // namespace

RasterImage load_raster(const std::filesystem::path& path) {
  const auto bytes = read_file(path);
  static constexpr unsigned char kPngSig[8] = {0x89, 'P', 'N', 'G', '\r', '\n', 0x1a, '\n'};
  if (bytes.size() >= 8 && std::equal(std::begin(kPngSig), std::end(kPngSig), bytes.begin()))
    return decode_png(bytes);
  if (bytes.size() >= 3 && bytes[0] == 'P') {
    if (bytes[1] == '2' || bytes[1] == '5') return decode_pgm(bytes);
    if (bytes[1] == 'f' || bytes[1] == 'F') return decode_pfm(bytes);
  }
  throw FormatError("unsupported raster format: '" + path.string() + "'");
}

void save_pgm16(const RasterImage& img, const std::filesystem::path& path) {
  std::vector<unsigned char> body(img.size() * 2);
  const auto v = img.intensity();
  for (std::size_t i = 0; i < v.size(); ++i) {
    const auto q = static_cast<std::uint16_t>(std::lround(v[i] * 65535.0));
    body[2 * i] = static_cast<unsigned char>(q >> 8);
    body[2 * i + 1] = static_cast<unsigned char>(q & 0xff);
  }
  write_file(path, "P5\n" + std::to_string(img.width()) + " " + std::to_string(img.height()) + "\n65535\n", body);
}

void save_pfm(const RasterImage& img, const std::filesystem::path& path) {
  std::vector<unsigned char> body(img.size() * 4);
  const int w = img.width();
  const int h = img.height();
  for (int row = 0; row < h; ++row) {
    const int y = h - 1 - row;
    for (int x = 0; x < w; ++x) {
      float f = static_cast<float>(img.at(x, y));
      std::uint32_t u;
      std::memcpy(&u, &f, 4);
      if constexpr (std::endian::native != std::endian::little) u = byteswap32(u);
      std::memcpy(body.data() + 4 * (static_cast<std::size_t>(row) * w + x), &u, 4);
    }
  }
  write_file(path, "Pf\n" + std::to_string(w) + " " + std::to_string(h) + "\n-1.0\n", body);
}

static bool png_write_all(png_structp png, png_infop info, FILE* fp, png_uint_32 w, png_uint_32 h, int bit_depth,
                   png_bytepp rows) {
  if (setjmp(png_jmpbuf(png))) return false;
  png_init_io(png, fp);
  png_set_IHDR(png, info, w, h, bit_depth, PNG_COLOR_TYPE_GRAY, PNG_INTERLACE_NONE, PNG_COMPRESSION_TYPE_DEFAULT,
               PNG_FILTER_TYPE_DEFAULT);
  png_write_info(png, info);
  png_write_image(png, rows);
  png_write_end(png, nullptr);
  return true;
}

void save_png(const RasterImage& img, const std::filesystem::path& path, int bit_depth) {
  if (bit_depth != 8 && bit_depth != 16) throw ParamError("PNG bit depth must be 8 or 16");
  const int bps = bit_depth / 8;
  const double scale = bit_depth == 16 ? 65535.0 : 255.0;
  const std::size_t stride = static_cast<std::size_t>(img.width()) * bps;
  std::vector<unsigned char> data(stride * img.height());
  std::vector<png_bytep> rows(static_cast<std::size_t>(img.height()));
  for (int y = 0; y < img.height(); ++y) {
    unsigned char* row = data.data() + stride * y;
    rows[static_cast<std::size_t>(y)] = row;
    for (int x = 0; x < img.width(); ++x) {
      const long q = std::lround(img.at(x, y) * scale);
      if (bps == 2) {
        row[2 * x] = static_cast<unsigned char>(q >> 8);  // PNG is big-endian
        row[2 * x + 1] = static_cast<unsigned char>(q & 0xff);
      } else {
        row[x] = static_cast<unsigned char>(q);
      }
    }
  }

  std::unique_ptr<FILE, int (*)(FILE*)> fp(std::fopen(path.string().c_str(), "wb"), &std::fclose);
  if (!fp) throw IoError("cannot write '" + path.string() + "'");
  PngErrorSink sink;
  png_structp png = png_create_write_struct(PNG_LIBPNG_VER_STRING, &sink, png_error_fn, png_warning_fn);
  png_infop info = png_create_info_struct(png);
  struct Guard {
    png_structp* p;
    png_infop* i;
    ~Guard() { png_destroy_write_struct(p, i); }
  } guard{&png, &info};
  if (!png_write_all(png, info, fp.get(), static_cast<png_uint_32>(img.width()),
                     static_cast<png_uint_32>(img.height()), bit_depth, rows.data()))
    throw IoError(std::string("PNG write: ") + sink.message);
}

}  // namespace sketchopt
