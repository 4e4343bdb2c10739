#include "stflow/flow_io.hpp"

#include <png.h>

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <iterator>
#include <numbers>
#include <sstream>

namespace stflow::io {

namespace fs = std::filesystem;

namespace {

static_assert(std::endian::native == std::endian::little || std::endian::native == std::endian::big);

void put_u32_le(std::vector<std::uint8_t>& out, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
}

std::uint32_t get_u32_le(const std::uint8_t* p) {
  return std::uint32_t(p[0]) | (std::uint32_t(p[1]) << 8) | (std::uint32_t(p[2]) << 16) |
         (std::uint32_t(p[3]) << 24);
}

std::vector<std::uint8_t> read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  return std::vector<std::uint8_t>(std::istreambuf_iterator<char>(in), {});
}

std::string lower_extension(const fs::path& p) {
  std::string ext = p.extension().string();
  std::transform(ext.begin(), ext.end(), ext.begin(), [](unsigned char c) { return std::tolower(c); });
  return ext;
}

}  // namespace

void atomic_write(const fs::path& path, const std::vector<std::uint8_t>& bytes) {
  fs::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot write " + tmp.string());
    out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
    if (!out) throw IoError("short write to " + tmp.string());
  }
  std::error_code ec;
  fs::rename(tmp, path, ec);
  if (ec) throw IoError("cannot rename " + tmp.string() + " to " + path.string() + ": " + ec.message());
}

void atomic_write(const fs::path& path, const std::string& text) {
  atomic_write(path, std::vector<std::uint8_t>(text.begin(), text.end()));
}

// ---------------------------------------------------------------------------
// .flo

FlowSlice slice(const FlowComponent& flow, int t) {
  const GridSpec& g = flow.grid();
  if (t < 0 || t >= g.T()) throw InvalidArgument("slice: time index out of range");
  FlowSlice s(g.M(), g.N());
  for (int y = 0; y < g.N(); ++y) {
    for (int x = 0; x < g.M(); ++x) {
      s.u[s.index(x, y)] = static_cast<float>(flow.u1.at(x, y, t));
      s.v[s.index(x, y)] = static_cast<float>(flow.u2.at(x, y, t));
    }
  }
  return s;
}

std::vector<std::uint8_t> encode_flo(const FlowSlice& slice) {
  if (slice.width <= 0 || slice.height <= 0) throw InvalidArgument("encode_flo: empty slice");
  const std::size_t n = std::size_t(slice.width) * slice.height;
  if (slice.u.size() != n || slice.v.size() != n) {
    throw InvalidArgument("encode_flo: channel size does not match dimensions");
  }
  for (std::size_t i = 0; i < n; ++i) {
    if (!std::isfinite(slice.u[i]) || !std::isfinite(slice.v[i])) {
      throw InvalidArgument("encode_flo: non-finite flow value at pixel " + std::to_string(i));
    }
  }
  std::vector<std::uint8_t> out;
  out.reserve(12 + 8 * n);
  for (char c : {'P', 'I', 'E', 'H'}) out.push_back(static_cast<std::uint8_t>(c));
  put_u32_le(out, static_cast<std::uint32_t>(slice.width));
  put_u32_le(out, static_cast<std::uint32_t>(slice.height));
  for (std::size_t i = 0; i < n; ++i) {
    put_u32_le(out, std::bit_cast<std::uint32_t>(slice.u[i]));
    put_u32_le(out, std::bit_cast<std::uint32_t>(slice.v[i]));
  }
  return out;
}

FlowSlice decode_flo(const std::vector<std::uint8_t>& bytes) {
  if (bytes.size() < 12) throw IoError(".flo: truncated header");
  if (std::memcmp(bytes.data(), "PIEH", 4) != 0) throw IoError(".flo: bad magic");
  const std::uint32_t w = get_u32_le(bytes.data() + 4);
  const std::uint32_t h = get_u32_le(bytes.data() + 8);
  if (w == 0 || h == 0 || w > (1u << 16) || h > (1u << 16)) {
    throw IoError(".flo: implausible dimensions " + std::to_string(w) + "x" + std::to_string(h));
  }
  const std::size_t n = std::size_t(w) * h;
  if (bytes.size() < 12 + 8 * n) throw IoError(".flo: truncated data");
  FlowSlice s(static_cast<int>(w), static_cast<int>(h));
  const std::uint8_t* p = bytes.data() + 12;
  for (std::size_t i = 0; i < n; ++i, p += 8) {
    s.u[i] = std::bit_cast<float>(get_u32_le(p));
    s.v[i] = std::bit_cast<float>(get_u32_le(p + 4));
  }
  return s;
}

void write_flo(const FlowSlice& slice, const fs::path& path) { atomic_write(path, encode_flo(slice)); }

FlowSlice read_flo(const fs::path& path) { return decode_flo(read_file(path)); }

// ---------------------------------------------------------------------------
// PGM / PNG

namespace {

GrayImage read_pgm(const fs::path& path) {
  const std::vector<std::uint8_t> bytes = read_file(path);
  std::size_t pos = 0;
  auto skip_space = [&] {
    while (pos < bytes.size()) {
      if (bytes[pos] == '#') {
        while (pos < bytes.size() && bytes[pos] != '\n') ++pos;
      } else if (std::isspace(bytes[pos])) {
        ++pos;
      } else {
        break;
      }
    }
  };
  auto read_int = [&]() -> long {
    skip_space();
    long v = 0;
    bool any = false;
    while (pos < bytes.size() && std::isdigit(bytes[pos])) {
      v = v * 10 + (bytes[pos++] - '0');
      any = true;
      if (v > 1000000) throw IoError(path.string() + ": header value too large");
    }
    if (!any) throw IoError(path.string() + ": malformed PGM header");
    return v;
  };
  if (bytes.size() < 2 || bytes[0] != 'P' || bytes[1] != '5') {
    throw IoError(path.string() + ": not a binary PGM (P5)");
  }
  pos = 2;
  const long w = read_int(), h = read_int(), maxval = read_int();
  ++pos;  // single whitespace before the raster
  if (w <= 0 || h <= 0) throw IoError(path.string() + ": bad PGM dimensions");
  if (maxval <= 0 || maxval > 65535) throw IoError(path.string() + ": unsupported PGM bit depth");
  const int depth = maxval < 256 ? 8 : 16;
  GrayImage img(static_cast<int>(w), static_cast<int>(h), depth);
  const std::size_t n = std::size_t(w) * h;
  const std::size_t bpp = depth == 8 ? 1 : 2;
  if (bytes.size() < pos + n * bpp) throw IoError(path.string() + ": truncated PGM raster");
  for (std::size_t i = 0; i < n; ++i) {
    img.data[i] = depth == 8 ? bytes[pos + i]
                             : static_cast<std::uint16_t>((bytes[pos + 2 * i] << 8) |
                                                          bytes[pos + 2 * i + 1]);
  }
  return img;
}

struct PngReadGuard {
  png_structp png = nullptr;
  png_infop info = nullptr;
  ~PngReadGuard() { png_destroy_read_struct(&png, info ? &info : nullptr, nullptr); }
};

struct PngWriteGuard {
  png_structp png = nullptr;
  png_infop info = nullptr;
  ~PngWriteGuard() { png_destroy_write_struct(&png, info ? &info : nullptr); }
};

struct MemReader {
  const std::vector<std::uint8_t>* bytes;
  std::size_t pos;
};

void png_mem_read(png_structp png, png_bytep out, png_size_t len) {
  auto* r = static_cast<MemReader*>(png_get_io_ptr(png));
  if (r->pos + len > r->bytes->size()) png_error(png, "truncated PNG");
  std::memcpy(out, r->bytes->data() + r->pos, len);
  r->pos += len;
}

void png_mem_write(png_structp png, png_bytep data, png_size_t len) {
  auto* out = static_cast<std::vector<std::uint8_t>*>(png_get_io_ptr(png));
  out->insert(out->end(), data, data + len);
}

void png_mem_flush(png_structp) {}

// Reads all rows; returns (width, height, channels, bit depth, raw rows).
struct RawPng {
  int width = 0, height = 0, channels = 0, depth = 0, color_type = 0;
  std::vector<std::uint8_t> pixels;
};

RawPng decode_png(const fs::path& path) {
  const std::vector<std::uint8_t> bytes = read_file(path);
  if (bytes.size() < 8 || png_sig_cmp(bytes.data(), 0, 8) != 0) {
    throw IoError(path.string() + ": not a PNG file");
  }
  PngReadGuard g;
  g.png = png_create_read_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
  if (!g.png) throw IoError("libpng: cannot create read struct");
  g.info = png_create_info_struct(g.png);
  if (!g.info) throw IoError("libpng: cannot create info struct");
  MemReader reader{&bytes, 0};
  RawPng raw;
  if (setjmp(png_jmpbuf(g.png))) throw IoError(path.string() + ": corrupt PNG");
  png_set_read_fn(g.png, &reader, png_mem_read);
  png_read_info(g.png, g.info);
  raw.width = static_cast<int>(png_get_image_width(g.png, g.info));
  raw.height = static_cast<int>(png_get_image_height(g.png, g.info));
  raw.color_type = png_get_color_type(g.png, g.info);
  raw.depth = png_get_bit_depth(g.png, g.info);
  if (raw.color_type == PNG_COLOR_TYPE_PALETTE) png_set_palette_to_rgb(g.png);
  if (raw.color_type == PNG_COLOR_TYPE_GRAY && raw.depth < 8) png_set_expand_gray_1_2_4_to_8(g.png);
  if (raw.color_type & PNG_COLOR_MASK_ALPHA) png_set_strip_alpha(g.png);
  png_read_update_info(g.png, g.info);
  raw.channels = png_get_channels(g.png, g.info);
  raw.depth = png_get_bit_depth(g.png, g.info);
  const std::size_t rowbytes = png_get_rowbytes(g.png, g.info);
  raw.pixels.resize(rowbytes * raw.height);
  std::vector<png_bytep> rows(raw.height);
  for (int y = 0; y < raw.height; ++y) rows[y] = raw.pixels.data() + y * rowbytes;
  png_read_image(g.png, rows.data());
  png_read_end(g.png, nullptr);
  return raw;
}

GrayImage read_png_gray(const fs::path& path) {
  const RawPng raw = decode_png(path);
  if (raw.channels != 1) throw IoError(path.string() + ": only grayscale PNG input is supported");
  if (raw.depth != 8 && raw.depth != 16) throw IoError(path.string() + ": unsupported bit depth");
  GrayImage img(raw.width, raw.height, raw.depth);
  for (std::size_t i = 0; i < img.data.size(); ++i) {
    img.data[i] = raw.depth == 8 ? raw.pixels[i]
                                 : static_cast<std::uint16_t>((raw.pixels[2 * i] << 8) |
                                                              raw.pixels[2 * i + 1]);
  }
  return img;
}

std::vector<std::uint8_t> encode_png(int width, int height, int color_type, int depth,
                                     const std::vector<std::uint8_t>& packed, int bytes_per_px) {
  std::vector<std::uint8_t> out;
  PngWriteGuard g;
  g.png = png_create_write_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
  if (!g.png) throw IoError("libpng: cannot create write struct");
  g.info = png_create_info_struct(g.png);
  if (!g.info) throw IoError("libpng: cannot create info struct");
  if (setjmp(png_jmpbuf(g.png))) throw IoError("libpng: encoding failed");
  png_set_write_fn(g.png, &out, png_mem_write, png_mem_flush);
  png_set_IHDR(g.png, g.info, width, height, depth, color_type, PNG_INTERLACE_NONE,
               PNG_COMPRESSION_TYPE_DEFAULT, PNG_FILTER_TYPE_DEFAULT);
  png_write_info(g.png, g.info);
  const std::size_t rowbytes = std::size_t(width) * bytes_per_px;
  for (int y = 0; y < height; ++y) {
    png_write_row(g.png, const_cast<png_bytep>(packed.data() + y * rowbytes));
  }
  png_write_end(g.png, nullptr);
  return out;
}

}  // namespace

GrayImage read_gray_image(const fs::path& path) {
  const std::string ext = lower_extension(path);
  if (ext == ".pgm") return read_pgm(path);
  if (ext == ".png") return read_png_gray(path);
  throw IoError(path.string() + ": unsupported image format (expected .pgm or .png)");
}

void write_pgm(const GrayImage& img, const fs::path& path) {
  std::ostringstream header;
  header << "P5\n" << img.width << " " << img.height << "\n" << img.max_value() << "\n";
  const std::string h = header.str();
  std::vector<std::uint8_t> bytes(h.begin(), h.end());
  for (std::uint16_t v : img.data) {
    if (img.bit_depth == 16) bytes.push_back(static_cast<std::uint8_t>(v >> 8));
    bytes.push_back(static_cast<std::uint8_t>(v & 0xff));
  }
  atomic_write(path, bytes);
}

void write_png(const GrayImage& img, const fs::path& path) {
  std::vector<std::uint8_t> packed;
  const int bpp = img.bit_depth == 16 ? 2 : 1;
  packed.reserve(img.data.size() * bpp);
  for (std::uint16_t v : img.data) {
    if (bpp == 2) packed.push_back(static_cast<std::uint8_t>(v >> 8));
    packed.push_back(static_cast<std::uint8_t>(v & 0xff));
  }
  atomic_write(path, encode_png(img.width, img.height, PNG_COLOR_TYPE_GRAY, img.bit_depth, packed, bpp));
}

void write_png(const RgbImage& img, const fs::path& path) {
  atomic_write(path, encode_png(img.width, img.height, PNG_COLOR_TYPE_RGB, 8, img.data, 3));
}

RgbImage read_png_rgb(const fs::path& path) {
  const RawPng raw = decode_png(path);
  if (raw.channels != 3 || raw.depth != 8) throw IoError(path.string() + ": expected 8-bit RGB PNG");
  RgbImage img(raw.width, raw.height);
  img.data = raw.pixels;
  return img;
}

ScalarField3 read_sequence(const std::vector<fs::path>& paths) {
  if (paths.size() < 3) {
    throw InvalidArgument("read_sequence: need at least 3 frames, got " + std::to_string(paths.size()));
  }
  std::vector<GrayImage> frames;
  frames.reserve(paths.size());
  for (const auto& p : paths) {
    frames.push_back(read_gray_image(p));
    if (frames.back().width != frames.front().width || frames.back().height != frames.front().height) {
      throw InvalidArgument("read_sequence: dimension mismatch at " + p.string());
    }
  }
  const GridSpec grid(frames.front().width, frames.front().height, static_cast<int>(frames.size()));
  ScalarField3 f(grid);
  std::uint16_t lo = 65535, hi = 0;
  for (const auto& fr : frames) {
    for (std::uint16_t v : fr.data) {
      lo = std::min(lo, v);
      hi = std::max(hi, v);
    }
  }
  const double range = double(hi) - double(lo);
  std::size_t i = 0;
  for (const auto& fr : frames) {
    for (std::uint16_t v : fr.data) f[i++] = range > 0.0 ? (double(v) - lo) / range : 0.0;
  }
  return f;
}

std::vector<fs::path> list_frames(const fs::path& dir) {
  if (!fs::is_directory(dir)) throw IoError(dir.string() + " is not a directory");
  std::vector<fs::path> out;
  for (const auto& e : fs::directory_iterator(dir)) {
    if (!e.is_regular_file()) continue;
    const std::string ext = lower_extension(e.path());
    if (ext == ".pgm" || ext == ".png") out.push_back(e.path());
  }
  std::sort(out.begin(), out.end());
  return out;
}

std::vector<fs::path> write_sequence(const ScalarField3& f, const fs::path& dir,
                                     const std::string& prefix) {
  fs::create_directories(dir);
  const GridSpec& g = f.grid();
  std::vector<fs::path> out;
  for (int t = 0; t < g.T(); ++t) {
    GrayImage img(g.M(), g.N(), 8);
    for (int s = 0; s < g.N(); ++s) {
      for (int r = 0; r < g.M(); ++r) {
        const double v = std::clamp(f.at(r, s, t), 0.0, 1.0);
        img.data[std::size_t(s) * g.M() + r] = static_cast<std::uint16_t>(std::lround(255.0 * v));
      }
    }
    char name[64];
    std::snprintf(name, sizeof(name), "%s%04d.pgm", prefix.c_str(), t + 1);
    out.push_back(dir / name);
    write_pgm(img, out.back());
  }
  return out;
}

// ---------------------------------------------------------------------------
// Rendering

void hsv_to_rgb8(double h, double s, double v, std::uint8_t rgb[3]) {
  h = h - std::floor(h);
  const double h6 = h * 6.0;
  const int sector = static_cast<int>(h6) % 6;
  const double f = h6 - std::floor(h6);
  const double p = v * (1.0 - s);
  const double q = v * (1.0 - s * f);
  const double t = v * (1.0 - s * (1.0 - f));
  double r = 0, g = 0, b = 0;
  switch (sector) {
    case 0: r = v, g = t, b = p; break;
    case 1: r = q, g = v, b = p; break;
    case 2: r = p, g = v, b = t; break;
    case 3: r = p, g = q, b = v; break;
    case 4: r = t, g = p, b = v; break;
    default: r = v, g = p, b = q; break;
  }
  rgb[0] = static_cast<std::uint8_t>(std::lround(255.0 * r));
  rgb[1] = static_cast<std::uint8_t>(std::lround(255.0 * g));
  rgb[2] = static_cast<std::uint8_t>(std::lround(255.0 * b));
}

RgbImage render_color(const FlowSlice& slice, double max_magnitude) {
  const std::size_t n = std::size_t(slice.width) * slice.height;
  if (max_magnitude <= 0.0) {
    std::vector<double> mags;
    mags.reserve(n);
    for (std::size_t i = 0; i < n; ++i)
      if (!slice.unknown(i)) mags.push_back(slice.magnitude(i));
    if (!mags.empty()) {
      const std::size_t k =
          std::min(mags.size() - 1, static_cast<std::size_t>(std::ceil(0.99 * mags.size())) - 1);
      std::nth_element(mags.begin(), mags.begin() + k, mags.end());
      max_magnitude = mags[k];
    }
  }
  RgbImage img(slice.width, slice.height);
  for (std::size_t i = 0; i < n; ++i) {
    std::uint8_t* px = img.data.data() + 3 * i;
    if (slice.unknown(i)) continue;  // black
    const double mag = slice.magnitude(i);
    const double sat = max_magnitude > 0.0 ? std::min(1.0, mag / max_magnitude) : 0.0;
    double hue = std::atan2(double(slice.v[i]), double(slice.u[i])) / (2.0 * std::numbers::pi);
    if (hue < 0.0) hue += 1.0;
    hsv_to_rgb8(hue, sat, 1.0, px);
  }
  return img;
}

GrayImage render_magnitude(const FlowSlice& slice, double threshold) {
  if (threshold < 0.0) throw InvalidArgument("render_magnitude: threshold must be >= 0");
  const std::size_t n = std::size_t(slice.width) * slice.height;
  double max_mag = 0.0;
  for (std::size_t i = 0; i < n; ++i)
    if (!slice.unknown(i)) max_mag = std::max(max_mag, slice.magnitude(i));
  GrayImage img(slice.width, slice.height, 8);
  for (std::size_t i = 0; i < n; ++i) {
    if (slice.unknown(i)) continue;
    const double mag = slice.magnitude(i);
    if (mag <= threshold || max_mag <= 0.0) continue;
    img.data[i] = static_cast<std::uint16_t>(std::lround(255.0 * mag / max_mag));
  }
  return img;
}

FlowSlice mask_common(const FlowSlice& primary, const FlowSlice& other, double threshold) {
  if (!primary.same_size(other)) throw InvalidArgument("mask_common: size mismatch");
  FlowSlice out = primary;
  for (std::size_t i = 0; i < out.u.size(); ++i) {
    if (primary.magnitude(i) > threshold && other.magnitude(i) > threshold) {
      out.u[i] = 0.0f;
      out.v[i] = 0.0f;
    }
  }
  return out;
}

FlowSlice color_wheel_slice(int size) {
  if (size < 3) throw InvalidArgument("color_wheel_slice: size must be >= 3");
  FlowSlice s(size, size);
  const double c = 0.5 * (size - 1);
  const double radius = 0.5 * (size - 1);
  for (int y = 0; y < size; ++y) {
    for (int x = 0; x < size; ++x) {
      const double dx = (x - c) / radius, dy = (y - c) / radius;
      if (dx * dx + dy * dy > 1.0) continue;
      s.u[s.index(x, y)] = static_cast<float>(dx);
      s.v[s.index(x, y)] = static_cast<float>(dy);
    }
  }
  return s;
}

}  // namespace stflow::io
