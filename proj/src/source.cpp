#include "chaosimg/source.hpp"

#include <cmath>
#include <numbers>
#include <set>

#include "chaosimg/error.hpp"
#include "chaosimg/rng.hpp"

namespace chaosimg::source {
namespace {

constexpr std::uint64_t kDirectionStream = 0x6469726563ULL;
constexpr std::uint64_t kAmplitudeStream = 0x616d706c69ULL;
constexpr int kPlacementAttempts = 256;

const double kGoldenAngle = std::numbers::pi * (3.0 - std::sqrt(5.0));

}  // namespace

void SourceConfig::validate() const {
  if (components < 1) throw Error("invalid source: N must be >= 1");
  if (!(max_angle > 0.0 && max_angle <= 0.1)) throw Error("invalid source: max_angle must lie in (0, 0.1] rad");
  if (!(amplitude_scale > 0.0)) throw Error("invalid source: amplitude scale must be positive");
  if (!(wavelength > 0.0)) throw Error("invalid source: wavelength must be positive");
  if (!(fourier_focal_length > 0.0) || !(reference_pixel > 0.0)) {
    throw Error("invalid source: reference lens and pixel must be positive");
  }
}

PlaneWaveComponent PlaneWaveComponent::make(const Direction& direction, double wavelength, Complex amplitude) {
  const double k = 2.0 * std::numbers::pi / wavelength;
  PlaneWaveComponent c;
  c.amplitude = amplitude;
  c.theta = direction.theta;
  c.beta = direction.beta;
  c.kx = k * std::sin(direction.beta);
  c.ky = k * std::cos(direction.beta) * std::sin(direction.theta);
  c.kz = k * std::cos(direction.beta) * std::cos(direction.theta);
  return c;
}

double PlaneWaveComponent::transverse() const { return std::hypot(kx, ky); }

Pixel reference_pixel(const Direction& direction, const SourceConfig& cfg) {
  const auto c = PlaneWaveComponent::make(direction, cfg.wavelength, 1.0);
  const double x = cfg.fourier_focal_length * c.kx / c.kz;
  const double y = cfg.fourier_focal_length * c.ky / c.kz;
  return {static_cast<int>(std::lround(x / cfg.reference_pixel)),
          static_cast<int>(std::lround(y / cfg.reference_pixel))};
}

std::size_t distinguishable_modes(const SourceConfig& cfg) {
  const double r = cfg.fourier_focal_length * std::tan(cfg.max_angle) / cfg.reference_pixel;
  const int n = static_cast<int>(std::floor(r));
  std::size_t count = 0;
  for (int i = -n; i <= n; ++i) {
    for (int j = -n; j <= n; ++j) {
      if (static_cast<double>(i) * i + static_cast<double>(j) * j <= r * r) ++count;
    }
  }
  return count;
}

std::vector<Direction> fix_component_directions(const SourceConfig& cfg) {
  cfg.validate();
  const auto n_components = static_cast<std::size_t>(cfg.components);
  if (n_components > distinguishable_modes(cfg)) throw Error("mode oversampling");

  CounterRng rng(cfg.rng_seed, kDirectionStream);
  const double rotation = 2.0 * std::numbers::pi * rng.uniform();
  const double s_max = std::sin(cfg.max_angle);

  std::vector<Direction> directions;
  directions.reserve(n_components);
  std::set<Pixel> occupied;
  for (std::size_t i = 0; i < n_components; ++i) {
    bool placed = false;
    for (int attempt = 0; attempt < kPlacementAttempts && !placed; ++attempt) {
      // Stratum i covers the annulus i/N <= (s/s_max)^2 < (i+1)/N.
      const double s = s_max * std::sqrt((static_cast<double>(i) + rng.uniform()) / static_cast<double>(n_components));
      double phi = static_cast<double>(i) * kGoldenAngle + rotation;
      if (attempt > 0) phi += 2.0 * std::numbers::pi * rng.uniform();
      const double p = s * std::cos(phi);
      const double q = s * std::sin(phi);
      Direction d;
      d.beta = std::asin(p);
      d.theta = std::asin(q / std::cos(d.beta));
      if (occupied.insert(reference_pixel(d, cfg)).second) {
        directions.push_back(d);
        placed = true;
      }
    }
    if (!placed) throw Error("mode oversampling");
  }
  return directions;
}

ChaoticSeed draw_shot_amplitudes(std::span<const Direction> directions, const SourceConfig& cfg,
                                 std::uint64_t shot_index) {
  ChaoticSeed seed;
  seed.shot_index = shot_index;
  seed.rng_stream_id = kAmplitudeStream;
  seed.wavelength = cfg.wavelength;
  seed.components.reserve(directions.size());
  const double scale = cfg.amplitude_scale / std::sqrt(2.0);
  for (std::size_t n = 0; n < directions.size(); ++n) {
    CounterRng rng(cfg.rng_seed, kAmplitudeStream, shot_index, n);
    const auto [g_re, g_im] = rng.normal_pair();
    seed.components.push_back(PlaneWaveComponent::make(directions[n], cfg.wavelength, Complex(g_re, g_im) * scale));
  }
  return seed;
}

ComplexField seed_field_on_grid(const ChaoticSeed& seed, const GridSpec& grid) {
  grid.validate();
  const double nyquist = std::numbers::pi / grid.pitch;
  for (const auto& c : seed.components) {
    if (std::abs(c.kx) > nyquist || std::abs(c.ky) > nyquist) {
      throw Error("aliasing: maximum transverse frequency exceeds grid Nyquist");
    }
  }
  ComplexField field(grid, seed.wavelength);
  auto data = field.amplitudes();
  std::vector<Complex> ex(static_cast<std::size_t>(grid.nx));
  for (const auto& c : seed.components) {
    for (int ix = 0; ix < grid.nx; ++ix) ex[static_cast<std::size_t>(ix)] = std::polar(1.0, -c.kx * grid.x(ix));
    for (int iy = 0; iy < grid.ny; ++iy) {
      const Complex row = c.amplitude * std::polar(1.0, -c.ky * grid.y(iy));
      for (int ix = 0; ix < grid.nx; ++ix) data[grid.index(ix, iy)] += row * ex[static_cast<std::size_t>(ix)];
    }
  }
  return field;
}

std::vector<double> reference_intensities(const ChaoticSeed& seed) {
  std::vector<double> out;
  out.reserve(seed.components.size());
  for (const auto& c : seed.components) out.push_back(std::norm(c.amplitude));
  return out;
}

IntensityMap fourier_plane_map(const ChaoticSeed& seed, const SourceConfig& cfg, const GridSpec& camera) {
  IntensityMap map(camera);
  for (const auto& c : seed.components) {
    const Pixel p = reference_pixel(Direction{c.theta, c.beta}, cfg);
    const int ix = p.x + camera.nx / 2;
    const int iy = p.y + camera.ny / 2;
    if (ix < 0 || iy < 0 || ix >= camera.nx || iy >= camera.ny) continue;
    map.at(ix, iy) += std::norm(c.amplitude);
  }
  return map;
}

}  // namespace chaosimg::source
