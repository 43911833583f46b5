#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <limits>

#include "chaosimg/error.hpp"
#include "chaosimg/io.hpp"

using namespace chaosimg;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
  const auto dir = fs::temp_directory_path() / "chaosimg_test_io";
  fs::create_directories(dir);
  return dir / name;
}

void write_bytes(const fs::path& p, const std::string& bytes) {
  std::ofstream out(p, std::ios::binary | std::ios::trunc);
  out << bytes;
}

}  // namespace

TEST_CASE("8-bit PGM round trip") {
  const GridSpec g{4, 2, 16e-6};
  IntensityMap m(g, std::vector<double>{0.0, 1.0, 0.5, 1.0, 0.0, 0.0, 1.0, 1.0});
  const auto p = scratch("mask.pgm");
  io::write_pgm8(p, m);
  const auto r = io::read_pgm(p, 16e-6);
  CHECK(r.grid() == g);
  for (int i : {0, 1, 3, 4, 5, 6, 7}) CHECK(r.values()[i] == m.values()[i]);
  CHECK(r.values()[2] == doctest::Approx(128.0 / 255.0));
}

TEST_CASE("16-bit PGM is big-endian and scaled by maxval") {
  const auto p = scratch("sixteen.pgm");
  write_bytes(p, std::string("P5\n# comment\n2 2\n1000\n") + std::string("\x03\xE8\x00\x00\x01\xF4\x00\x0A", 8));
  const auto m = io::read_pgm(p, 1e-6);
  CHECK(m.at(0, 0) == doctest::Approx(1.0));
  CHECK(m.at(1, 0) == 0.0);
  CHECK(m.at(0, 1) == doctest::Approx(0.5));
  CHECK(m.at(1, 1) == doctest::Approx(0.01));
}

TEST_CASE("PGM errors") {
  CHECK_THROWS_AS(io::read_pgm(scratch("missing.pgm"), 1e-6), Error);
  const auto p2 = scratch("p2.pgm");
  write_bytes(p2, "P2\n2 2\n255\n0 0 0 0\n");
  CHECK_THROWS_AS(io::read_pgm(p2, 1e-6), Error);
  const auto trunc = scratch("trunc.pgm");
  write_bytes(trunc, std::string("P5\n2 2\n255\n") + std::string("\x01\x02", 2));
  CHECK_THROWS_AS(io::read_pgm(trunc, 1e-6), Error);
}

TEST_CASE("16-bit preview sidecar") {
  const GridSpec g{2, 2, 1e-6};
  const IntensityMap m(g, std::vector<double>{-1.0, 0.0, 1.0, 3.0});
  const auto p = scratch("preview.pgm");
  const auto side = io::write_pgm16_preview(p, m);
  CHECK(side == fs::path(p.string() + ".scale"));
  std::ifstream in(side);
  const std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  CHECK(text.find("min=-1") != std::string::npos);
  CHECK(text.find("max=3") != std::string::npos);
  const auto r = io::read_pgm(p, 1e-6);
  CHECK(r.at(0, 0) == 0.0);
  CHECK(r.at(1, 1) == 1.0);
  CHECK(r.at(1, 0) == doctest::Approx(0.25).epsilon(1e-4));
}

TEST_CASE("raw dumps round trip bit-exactly") {
  const GridSpec g{4, 2, 3.5e-6};
  std::vector<Complex> a(g.size());
  for (std::size_t i = 0; i < a.size(); ++i) a[i] = {std::sqrt(double(i)) / 3.0, -1.0 / (i + 1.0)};
  const ComplexField f(g, 532e-9, a);
  const auto pf = scratch("field.f64");
  io::write_raw(pf, f);
  CHECK(fs::file_size(pf) == g.size() * 16);
  const auto rf = io::read_raw_field(pf);
  CHECK(rf.grid() == g);
  CHECK(rf.wavelength() == 532e-9);
  for (std::size_t i = 0; i < a.size(); ++i) CHECK(rf.amplitudes()[i] == a[i]);

  const IntensityMap m(g, std::vector<double>{1e-300, -2.5, 3.0, 0.1, 0.2, 0.3, 1e300, 0.0});
  const auto pm = scratch("map.f64");
  io::write_raw(pm, m);
  const auto rm = io::read_raw_map(pm);
  for (std::size_t i = 0; i < g.size(); ++i) CHECK(rm.values()[i] == m.values()[i]);
  CHECK_THROWS_AS(io::read_raw_field(pm), Error);
}

TEST_CASE("sha256 and number formatting") {
  const auto p = scratch("abc.txt");
  write_bytes(p, "abc");
  CHECK(io::sha256_file(p) == "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
  CHECK(io::format_double(0.1) == "0.1");
  CHECK(std::stod(io::format_double(1.0 / 3.0)) == 1.0 / 3.0);
}
