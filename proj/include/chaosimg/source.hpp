#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

#include "chaosimg/field.hpp"

// Chaotic seed model: a frozen set of N plane-wave directions per experiment
// with circular complex Gaussian amplitudes redrawn on every shot.
namespace chaosimg::source {

struct SourceConfig {
  int components = 32;                 // N
  double max_angle = 4.0e-3;           // cone half-angle [rad]
  double amplitude_scale = 1.0;        // sigma_a, E|a|^2 = sigma_a^2
  std::uint64_t rng_seed = 1;
  double wavelength = 1064e-9;         // lambda_1 [m]
  double fourier_focal_length = 0.15;  // reference (Fourier) lens [m]
  double reference_pixel = 16e-6;      // reference camera pixel [m]

  void validate() const;
};

/// Propagation angles of one component: the transverse direction cosines are
/// (sin beta, cos beta sin theta).
struct Direction {
  double theta = 0.0;
  double beta = 0.0;
};

struct PlaneWaveComponent {
  Complex amplitude;
  double theta = 0.0;
  double beta = 0.0;
  double kx = 0.0, ky = 0.0, kz = 0.0;  // rad/m, |k| = 2 pi / lambda

  static PlaneWaveComponent make(const Direction& direction, double wavelength, Complex amplitude);
  double transverse() const;
};

struct ChaoticSeed {
  std::vector<PlaneWaveComponent> components;
  std::uint64_t shot_index = 0;
  std::uint64_t rng_stream_id = 0;
  double wavelength = 0.0;
};

struct Pixel {
  int x = 0;
  int y = 0;
  bool operator==(const Pixel&) const = default;
  auto operator<=>(const Pixel&) const = default;
};

/// Reference-camera pixel (offset from the optical axis) where the Fourier
/// lens focuses a component travelling along `direction`.
Pixel reference_pixel(const Direction& direction, const SourceConfig& cfg);

/// Reference-camera pixels inside the focal-plane disc of the seed cone.
std::size_t distinguishable_modes(const SourceConfig& cfg);

/// N directions spread over the cone by stratified (jittered sunflower)
/// sampling. Every direction lands on its own reference pixel, so component
/// index and reference pixel identify each other. Deterministic in rng_seed.
std::vector<Direction> fix_component_directions(const SourceConfig& cfg);

/// Circular complex Gaussian amplitudes for one shot. Each (shot, n) pair has
/// its own counter-based substream.
ChaoticSeed draw_shot_amplitudes(std::span<const Direction> directions, const SourceConfig& cfg,
                                 std::uint64_t shot_index);

/// sum_n a_n exp(-i (kx_n x + ky_n y)) sampled at z = 0.
ComplexField seed_field_on_grid(const ChaoticSeed& seed, const GridSpec& grid);

/// I_1n = |a_1n|^2.
std::vector<double> reference_intensities(const ChaoticSeed& seed);

/// Reference-camera intensity map: each component's |a|^2 binned onto the
/// pixel its direction focuses to. Components outside the camera are dropped.
IntensityMap fourier_plane_map(const ChaoticSeed& seed, const SourceConfig& cfg, const GridSpec& camera);

// ---------------------------------------------------------------------------
// Thermal statistics

struct HistogramBin {
  double center = 0.0;
  double count = 0.0;
  double exponential_fit = 0.0;  // expected count under Exp(sample mean)
};

struct ThermalReport {
  std::size_t samples = 0;
  double mean = 0.0;
  double variance = 0.0;     // unbiased
  double ks_distance = 0.0;  // against Exp(sample mean)
  std::vector<HistogramBin> histogram;
};

/// Kolmogorov-Smirnov distance between the empirical distribution of
/// `samples` and the exponential law with the given mean.
double ks_distance_exponential(std::span<const double> samples, double mean);

/// Needs at least 100 samples ("insufficient statistics" otherwise).
ThermalReport thermal_statistics_report(std::span<const double> samples, int bins = 40);

/// CSV: bin_center,count,exponential_fit
void write_histogram_csv(const std::filesystem::path& path, const ThermalReport& report);

/// key=value lines, each key prefixed by `prefix`.
std::string report_text(const ThermalReport& report, const std::string& prefix);

}  // namespace chaosimg::source
