#include "chaosimg/io.hpp"

#include <openssl/evp.h>

#include <algorithm>
#include <array>
#include <bit>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <map>
#include <memory>
#include <sstream>
#include <vector>

#include "chaosimg/error.hpp"

namespace chaosimg::io {
namespace {

std::ofstream open_out(const fs::path& path) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error("cannot open " + path.string() + " for writing");
  return out;
}

void put_le_double(std::ostream& out, double v) {
  auto bits = std::bit_cast<std::uint64_t>(v);
  std::array<char, 8> bytes{};
  for (int i = 0; i < 8; ++i) bytes[static_cast<std::size_t>(i)] = static_cast<char>((bits >> (8 * i)) & 0xffu);
  out.write(bytes.data(), 8);
}

double get_le_double(const unsigned char* p) {
  std::uint64_t bits = 0;
  for (int i = 0; i < 8; ++i) bits |= static_cast<std::uint64_t>(p[i]) << (8 * i);
  return std::bit_cast<double>(bits);
}

// Next whitespace-delimited header token, skipping '#' comments.
std::string pgm_token(std::istream& in) {
  std::string token;
  int c = in.get();
  while (c != EOF) {
    if (c == '#') {
      while (c != EOF && c != '\n') c = in.get();
    } else if (std::isspace(c)) {
      if (!token.empty()) break;
    } else {
      token.push_back(static_cast<char>(c));
    }
    c = in.get();
  }
  return token;
}

int parse_int(const std::string& s, const fs::path& path) {
  int v = 0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size()) throw Error("malformed PGM header in " + path.string());
  return v;
}

std::map<std::string, std::string> read_header(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open " + path.string());
  std::map<std::string, std::string> kv;
  std::string line;
  while (std::getline(in, line)) {
    auto eq = line.find('=');
    if (eq == std::string::npos) continue;
    kv[line.substr(0, eq)] = line.substr(eq + 1);
  }
  return kv;
}

std::vector<unsigned char> read_bytes(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open " + path.string());
  return std::vector<unsigned char>(std::istreambuf_iterator<char>(in), {});
}

fs::path header_path(const fs::path& path) { return fs::path(path.string() + ".hdr"); }

}  // namespace

IntensityMap read_pgm(const fs::path& path, double pitch) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open mask " + path.string());
  if (pgm_token(in) != "P5") throw Error("not a binary PGM (P5): " + path.string());
  const int width = parse_int(pgm_token(in), path);
  const int height = parse_int(pgm_token(in), path);
  const int maxval = parse_int(pgm_token(in), path);
  if (width <= 0 || height <= 0 || maxval <= 0 || maxval > 65535) throw Error("malformed PGM header in " + path.string());

  const std::size_t count = static_cast<std::size_t>(width) * static_cast<std::size_t>(height);
  const std::size_t bytes_per = maxval < 256 ? 1 : 2;
  std::vector<unsigned char> raw(count * bytes_per);
  in.read(reinterpret_cast<char*>(raw.data()), static_cast<std::streamsize>(raw.size()));
  if (static_cast<std::size_t>(in.gcount()) != raw.size()) throw Error("truncated PGM data in " + path.string());

  std::vector<double> values(count);
  for (std::size_t i = 0; i < count; ++i) {
    const unsigned v = bytes_per == 1 ? raw[i] : (static_cast<unsigned>(raw[2 * i]) << 8) | raw[2 * i + 1];
    values[i] = std::min(1.0, static_cast<double>(v) / maxval);
  }
  return IntensityMap(GridSpec{width, height, pitch}, std::move(values));
}

void write_pgm8(const fs::path& path, const IntensityMap& map) {
  auto out = open_out(path);
  out << "P5\n" << map.grid().nx << ' ' << map.grid().ny << "\n255\n";
  for (double v : map.values()) {
    const double c = std::clamp(v, 0.0, 1.0);
    out.put(static_cast<char>(static_cast<unsigned char>(std::lround(c * 255.0))));
  }
  if (!out) throw Error("write failed: " + path.string());
}

fs::path write_pgm16_preview(const fs::path& path, const IntensityMap& map) {
  const double lo = map.min();
  const double hi = map.max();
  const double span = hi - lo;
  {
    auto out = open_out(path);
    out << "P5\n" << map.grid().nx << ' ' << map.grid().ny << "\n65535\n";
    for (double v : map.values()) {
      const long s = span > 0.0 ? std::lround((v - lo) / span * 65535.0) : 0;
      const auto u = static_cast<unsigned>(std::clamp(s, 0L, 65535L));
      out.put(static_cast<char>(u >> 8));
      out.put(static_cast<char>(u & 0xffu));
    }
    if (!out) throw Error("write failed: " + path.string());
  }
  const fs::path sidecar(path.string() + ".scale");
  auto out = open_out(sidecar);
  out << "min=" << format_double(lo) << "\nmax=" << format_double(hi) << "\nmaxval=65535\n";
  return sidecar;
}

fs::path write_raw(const fs::path& path, const ComplexField& field) {
  {
    auto out = open_out(path);
    for (const auto& a : field.amplitudes()) {
      put_le_double(out, a.real());
      put_le_double(out, a.imag());
    }
    if (!out) throw Error("write failed: " + path.string());
  }
  const auto hdr = header_path(path);
  auto out = open_out(hdr);
  out << "type=complex128\nnx=" << field.grid().nx << "\nny=" << field.grid().ny
      << "\npitch=" << format_double(field.grid().pitch) << "\nwavelength=" << format_double(field.wavelength())
      << "\n";
  return hdr;
}

fs::path write_raw(const fs::path& path, const IntensityMap& map) {
  {
    auto out = open_out(path);
    for (double v : map.values()) put_le_double(out, v);
    if (!out) throw Error("write failed: " + path.string());
  }
  const auto hdr = header_path(path);
  auto out = open_out(hdr);
  out << "type=float64\nnx=" << map.grid().nx << "\nny=" << map.grid().ny
      << "\npitch=" << format_double(map.grid().pitch) << "\n";
  return hdr;
}

ComplexField read_raw_field(const fs::path& path) {
  auto kv = read_header(header_path(path));
  if (kv["type"] != "complex128") throw Error("not a complex field dump: " + path.string());
  const GridSpec grid{std::stoi(kv.at("nx")), std::stoi(kv.at("ny")), std::stod(kv.at("pitch"))};
  const auto bytes = read_bytes(path);
  if (bytes.size() != grid.size() * 16) throw Error("raw field size mismatch: " + path.string());
  std::vector<Complex> amps(grid.size());
  for (std::size_t i = 0; i < amps.size(); ++i) {
    amps[i] = {get_le_double(&bytes[16 * i]), get_le_double(&bytes[16 * i + 8])};
  }
  return ComplexField(grid, std::stod(kv.at("wavelength")), std::move(amps));
}

IntensityMap read_raw_map(const fs::path& path) {
  auto kv = read_header(header_path(path));
  if (kv["type"] != "float64") throw Error("not a real map dump: " + path.string());
  const GridSpec grid{std::stoi(kv.at("nx")), std::stoi(kv.at("ny")), std::stod(kv.at("pitch"))};
  const auto bytes = read_bytes(path);
  if (bytes.size() != grid.size() * 8) throw Error("raw map size mismatch: " + path.string());
  std::vector<double> values(grid.size());
  for (std::size_t i = 0; i < values.size(); ++i) values[i] = get_le_double(&bytes[8 * i]);
  return IntensityMap(grid, std::move(values));
}

std::string sha256_file(const fs::path& path) {
  const auto bytes = read_bytes(path);
  std::unique_ptr<EVP_MD_CTX, decltype(&EVP_MD_CTX_free)> ctx(EVP_MD_CTX_new(), &EVP_MD_CTX_free);
  std::array<unsigned char, EVP_MAX_MD_SIZE> digest{};
  unsigned int len = 0;
  if (!ctx || EVP_DigestInit_ex(ctx.get(), EVP_sha256(), nullptr) != 1 ||
      EVP_DigestUpdate(ctx.get(), bytes.data(), bytes.size()) != 1 ||
      EVP_DigestFinal_ex(ctx.get(), digest.data(), &len) != 1) {
    throw Error("sha256 failed for " + path.string());
  }
  static constexpr char hex[] = "0123456789abcdef";
  std::string s;
  for (unsigned i = 0; i < len; ++i) {
    s.push_back(hex[digest[i] >> 4]);
    s.push_back(hex[digest[i] & 0xf]);
  }
  return s;
}

std::string format_double(double value) {
  std::array<char, 32> buf{};
  auto [ptr, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), value);
  if (ec != std::errc()) throw Error("format_double failed");
  return std::string(buf.data(), ptr);
}

}  // namespace chaosimg::io
