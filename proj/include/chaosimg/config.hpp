#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>

#include "chaosimg/downconversion.hpp"
#include "chaosimg/field.hpp"
#include "chaosimg/source.hpp"

namespace chaosimg::runner {

enum class ReferenceMode {
  component,  // I_1j taken directly from component j
  pixel,      // I_1j read from a binned reference-camera pixel
};

/// Everything a run depends on. Defaults reproduce the documented baseline:
/// 1064/1064/532 nm, 4 mm crystal, 256 um holes on a 64x64 grid of 16 um
/// pixels, N = 32 seed components, 2000 shots.
struct ExperimentConfig {
  GridSpec grid{64, 64, 16e-6};
  double lambda1 = 1064e-9;
  double lambda2 = 1064e-9;
  double lambda3 = 532e-9;
  // Imaging lens focal length and lens-to-crystal distance (simulator defaults).
  double focal_length = 0.20;
  double lens_to_crystal = 0.15;
  downconversion::CrystalConfig crystal;
  source::SourceConfig source;
  std::uint64_t shots = 2000;
  std::size_t reference_component = 0;
  ReferenceMode reference_mode = ReferenceMode::component;
  downconversion::Mode mode = downconversion::Mode::coherent;
  bool plane_wave_reference = true;
  std::string mask_path;  // empty: built-in three-hole mask
  double hole_diameter = 256e-6;
  std::filesystem::path output_dir = "out";
  GridSpec stats_grid{128, 128, 64e-6};
  std::uint64_t temporal_samples = 4096;
  GridSpec reference_camera{128, 128, 16e-6};

  /// Module invariants plus 1/lambda3 = 1/lambda1 + 1/lambda2 (rel. 1e-9).
  void validate() const;

  /// Flat key=value echo; parse_config(to_text()) reproduces the config.
  std::string to_text() const;

  /// True when f and d_F are still the built-in (non-experimental) values.
  bool uses_default_lens_geometry() const;
};

/// Applies one key=value setting. Throws on unknown keys or bad values.
void set_value(ExperimentConfig& cfg, std::string_view key, std::string_view value);

/// Parses `key=value` lines ('#' starts a comment) on top of `base`.
ExperimentConfig parse_config(std::string_view text, ExperimentConfig base = {});
ExperimentConfig load_config(const std::filesystem::path& path, ExperimentConfig base = {});

std::string to_string(downconversion::Mode mode);
std::string to_string(ReferenceMode mode);
std::string to_string(downconversion::PhaseMatchWeight weight);

}  // namespace chaosimg::runner
