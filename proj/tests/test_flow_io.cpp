#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <random>

#include "stflow/flow_io.hpp"

using namespace stflow;
using namespace stflow::io;
namespace fs = std::filesystem;

namespace {

struct TempDir {
  fs::path path;
  TempDir() {
    std::random_device rd;
    path = fs::temp_directory_path() / ("stflow_io_" + std::to_string(rd()));
    fs::create_directories(path);
  }
  ~TempDir() {
    std::error_code ec;
    fs::remove_all(path, ec);
  }
};

void write_raw(const fs::path& p, const std::string& bytes) {
  std::ofstream(p, std::ios::binary) << bytes;
}

GrayImage gray(int w, int h, int depth, std::uint16_t base) {
  GrayImage img(w, h, depth);
  for (std::size_t i = 0; i < img.data.size(); ++i) img.data[i] = std::uint16_t(base + i);
  return img;
}

bool no_tmp_files(const fs::path& dir) {
  for (const auto& e : fs::directory_iterator(dir))
    if (e.path().extension() == ".tmp") return false;
  return true;
}

}  // namespace

TEST_CASE(".flo encoding") {
  FlowSlice s(2, 1);
  s.u = {1.0f, -2.5f};
  s.v = {0.5f, 0.0f};
  const std::vector<std::uint8_t> expect = {'P', 'I', 'E', 'H', 2, 0, 0, 0, 1, 0, 0, 0,
                                            0x00, 0x00, 0x80, 0x3f, 0x00, 0x00, 0x00, 0x3f,
                                            0x00, 0x00, 0x20, 0xc0, 0x00, 0x00, 0x00, 0x00};
  CHECK(encode_flo(s) == expect);

  const FlowSlice back = decode_flo(expect);
  CHECK(back.width == 2);
  CHECK(back.u == s.u);
  CHECK(back.v == s.v);

  FlowSlice big(1, 1);
  big.u[0] = 2e9f;
  CHECK(decode_flo(encode_flo(big)).unknown(0));

  FlowSlice bad(1, 1);
  bad.v[0] = std::numeric_limits<float>::quiet_NaN();
  CHECK_THROWS_AS(encode_flo(bad), InvalidArgument);

  std::vector<std::uint8_t> magic = expect;
  magic[0] = 'X';
  CHECK_THROWS_AS(decode_flo(magic), IoError);
  CHECK_THROWS_AS(decode_flo(std::vector<std::uint8_t>(expect.begin(), expect.end() - 1)), IoError);
  CHECK_THROWS_AS(decode_flo(std::vector<std::uint8_t>(expect.begin(), expect.begin() + 8)), IoError);
}

TEST_CASE(".flo files roundtrip and leave no temporaries") {
  TempDir d;
  std::mt19937 rng(1);
  std::uniform_real_distribution<float> vd(-50.f, 50.f);
  for (int k = 0; k < 20; ++k) {
    FlowSlice s(1 + k % 5, 1 + k % 3);
    for (auto& x : s.u) x = vd(rng);
    for (auto& x : s.v) x = vd(rng);
    const fs::path p = d.path / ("f" + std::to_string(k) + ".flo");
    write_flo(s, p);
    const FlowSlice r = read_flo(p);
    CHECK(r.u == s.u);
    CHECK(r.v == s.v);
  }
  CHECK(no_tmp_files(d.path));
  CHECK_THROWS_AS(read_flo(d.path / "missing.flo"), IoError);
}

TEST_CASE("slices of a flow module") {
  const GridSpec g(3, 4, 4);
  FlowComponent u(g);
  u.u1.at(2, 1, 3) = 0.25;
  u.u2.at(0, 1, 3) = -1.0;
  const FlowSlice s = slice(u, 3);
  CHECK(s.width == 3);
  CHECK(s.height == 4);
  CHECK(s.u[s.index(2, 1)] == 0.25f);
  CHECK(s.v[s.index(0, 1)] == -1.0f);
  CHECK_THROWS_AS(slice(u, 4), InvalidArgument);
}

TEST_CASE("image formats") {
  TempDir d;
  for (int depth : {8, 16}) {
    const GrayImage img = gray(5, 3, depth, depth == 8 ? 10 : 40000);
    write_pgm(img, d.path / "a.pgm");
    write_png(img, d.path / "a.png");
    for (const char* name : {"a.pgm", "a.png"}) {
      const GrayImage r = read_gray_image(d.path / name);
      CHECK(r.bit_depth == depth);
      CHECK(r.data == img.data);
    }
  }
  RgbImage rgb(2, 2);
  rgb.data = {1, 2, 3, 4, 5, 6, 7, 8, 9, 10, 11, 12};
  write_png(rgb, d.path / "c.png");
  CHECK(read_png_rgb(d.path / "c.png").data == rgb.data);

  write_raw(d.path / "bad.pgm", "P2\n2 2\n255\n0 0 0 0\n");
  CHECK_THROWS_AS(read_gray_image(d.path / "bad.pgm"), IoError);
  write_raw(d.path / "short.pgm", std::string("P5\n4 4\n255\n") + "abc");
  CHECK_THROWS_AS(read_gray_image(d.path / "short.pgm"), IoError);
  write_raw(d.path / "fake.png", "not a png");
  CHECK_THROWS_AS(read_gray_image(d.path / "fake.png"), IoError);
  CHECK_THROWS_AS(read_gray_image(d.path / "c.png"), IoError);
  CHECK_THROWS_AS(read_gray_image(d.path / "x.bmp"), IoError);
}

TEST_CASE("sequences") {
  TempDir d;
  SUBCASE("joint min-max scaling") {
    for (int i = 0; i < 3; ++i) {
      GrayImage img(3, 3);
      img.data = {std::uint16_t(50 + i), 50, 50, 150, 50, 50, 50, 50, 50};
      write_pgm(img, d.path / ("f" + std::to_string(i) + ".pgm"));
    }
    const ScalarField3 f = read_sequence(list_frames(d.path));
    CHECK(f.grid().T() == 3);
    CHECK(f.at(0, 0, 0) == 0.0);
    CHECK(f.at(0, 1, 0) == 1.0);
    CHECK(f.at(0, 0, 2) == doctest::Approx(0.02));
  }
  SUBCASE("constant sequences map to zero") {
    for (int i = 0; i < 4; ++i) write_pgm(GrayImage(3, 3), d.path / ("f" + std::to_string(i) + ".pgm"));
    const ScalarField3 f = read_sequence(list_frames(d.path));
    for (double v : f.values()) CHECK(v == 0.0);
  }
  SUBCASE("errors") {
    write_pgm(GrayImage(3, 3), d.path / "a.pgm");
    write_pgm(GrayImage(3, 3), d.path / "b.pgm");
    CHECK_THROWS_AS(read_sequence(list_frames(d.path)), InvalidArgument);
    write_pgm(GrayImage(4, 3), d.path / "c.pgm");
    CHECK_THROWS_AS(read_sequence(list_frames(d.path)), InvalidArgument);
    CHECK_THROWS_AS(list_frames(d.path / "nope"), IoError);
  }
  SUBCASE("write then read is idempotent on 8-bit levels") {
    const GridSpec g(4, 3, 3);
    ScalarField3 f(g);
    for (std::size_t i = 0; i < g.size(); ++i) f[i] = double(i % 18) / 17.0;
    f[0] = 0.0;
    f[1] = 1.0;
    const auto paths = write_sequence(f, d.path);
    CHECK(paths.front().filename() == "frame_0001.pgm");
    const ScalarField3 once = read_sequence(paths);
    write_sequence(once, d.path / "again");
    const ScalarField3 twice = read_sequence(list_frames(d.path / "again"));
    CHECK(once == twice);
    CHECK(no_tmp_files(d.path));
  }
}

TEST_CASE("rendering") {
  FlowSlice z(3, 2);
  const RgbImage white = render_color(z, 1.0);
  for (auto c : white.data) CHECK(c == 255);
  z.u[4] = 5e9f;
  const RgbImage dark = render_color(z, 1.0);
  CHECK(dark.data[12] == 0);
  CHECK(dark.data[13] == 0);
  CHECK(dark.data[14] == 0);

  FlowSlice m(3, 1);
  m.u = {0.1f, 0.5f, 1.0f};
  const GrayImage mag = render_magnitude(m, 0.18);
  CHECK(mag.data[0] == 0);
  CHECK(mag.data[1] == 128);
  CHECK(mag.data[2] == 255);
  CHECK_THROWS_AS(render_magnitude(m, -1.0), InvalidArgument);

  FlowSlice other(3, 1);
  other.v = {1.0f, 0.0f, 1.0f};
  const FlowSlice masked = mask_common(m, other, 0.05);
  CHECK(masked.u == std::vector<float>{0.0f, 0.5f, 0.0f});
  CHECK_THROWS_AS(mask_common(m, FlowSlice(2, 1), 0.1), InvalidArgument);

  std::uint8_t rgb[3];
  hsv_to_rgb8(1.0 / 3.0, 1.0, 1.0, rgb);
  CHECK(rgb[0] == 0);
  CHECK(rgb[1] == 255);
  CHECK(rgb[2] == 0);
}

TEST_CASE("color wheel matches the reference image") {
  const RgbImage ref = read_png_rgb(fs::path(STFLOW_TEST_DATA_DIR) / "color_wheel.png");
  const RgbImage got = render_color(color_wheel_slice(ref.width), 1.0);
  REQUIRE(got.width == ref.width);
  REQUIRE(got.height == ref.height);
  int worst = 0;
  for (std::size_t i = 0; i < ref.data.size(); ++i) worst = std::max(worst, std::abs(int(ref.data[i]) - int(got.data[i])));
  CHECK(worst <= 1);
}

TEST_CASE("atomic text writes replace the target") {
  TempDir d;
  atomic_write(d.path / "x.txt", std::string("one"));
  atomic_write(d.path / "x.txt", std::string("two"));
  std::ifstream in(d.path / "x.txt");
  std::string s;
  in >> s;
  CHECK(s == "two");
  CHECK(no_tmp_files(d.path));
}
