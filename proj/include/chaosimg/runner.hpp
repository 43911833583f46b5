#pragma once

#include <array>
#include <chrono>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "chaosimg/config.hpp"
#include "chaosimg/correlation.hpp"
#include "chaosimg/downconversion.hpp"
#include "chaosimg/optics.hpp"
#include "chaosimg/source.hpp"

namespace chaosimg::runner {

using HoleCenter = std::array<double, 2>;  // (x, y) meters from the grid origin

std::vector<HoleCenter> default_hole_centers();

/// Binary amplitude mask: 1 where the pixel center lies strictly inside a
/// hole, 0 elsewhere. Overlapping holes form their union.
/// Throws "empty object" when no pixel is open and "holes do not fit on grid"
/// when a disc crosses the grid edge.
IntensityMap make_three_hole_mask(const GridSpec& grid, double hole_diameter, std::span<const HoleCenter> centers);

/// Worker count from CHAOSIMG_WORKERS, else the hardware concurrency.
unsigned worker_count();

/// Immutable per-experiment state: object, pump on the crystal face, frozen
/// seed directions and the image-plane basis. Shots are pure functions of
/// the shot index and may be generated from any thread.
class Experiment {
 public:
  explicit Experiment(ExperimentConfig cfg);

  const ExperimentConfig& config() const { return cfg_; }
  const optics::ImagingGeometry& geometry() const { return geometry_; }
  const IntensityMap& object_mask() const { return mask_; }
  const ComplexField& pump() const { return pump_; }
  const std::vector<source::Direction>& directions() const { return directions_; }
  const downconversion::ImagePlaneBasis& basis() const { return basis_; }

  /// |U_O(-x, -y)|^2 on the image-plane grid: the unshifted image orientation.
  IntensityMap image_plane_object() const;
  downconversion::ImageShift component_shift(std::size_t n) const;

  source::ChaoticSeed seed(std::uint64_t shot) const;
  /// Reference vector for a shot: I_1n per component, or the flattened
  /// reference-camera map in pixel mode.
  std::vector<double> reference_vector(const source::ChaoticSeed& seed) const;
  /// Index into reference_vector() that selects component `n`.
  std::size_t reference_index(std::size_t n) const;

  correlation::ShotRecord shot(std::uint64_t shot) const;

  /// Deterministic single-component on-axis run with unit amplitude.
  IntensityMap plane_wave_reference() const;

 private:
  ExperimentConfig cfg_;
  optics::ImagingGeometry geometry_;
  IntensityMap mask_;
  ComplexField pump_;
  std::vector<source::Direction> directions_;
  downconversion::ImagePlaneBasis basis_;
};

struct ShotLoopResult {
  std::vector<correlation::CorrelationAccumulator> accumulators;  // one per requested reference index
  IntensityMap first_shot;       // I_2 of shot 0
  IntensityMap incoherent_mean;  // shot mean of the interference-free sum
  std::uint64_t shots = 0;
};

/// Accumulates shots [0, shots) in fixed-size blocks spread over `workers`
/// threads. Blocks are merged in index order, so the result does not depend
/// on the worker count.
ShotLoopResult run_shots(const Experiment& experiment, std::uint64_t shots,
                         std::span<const std::size_t> reference_indices, unsigned workers);

struct SimulateOptions {
  bool plane_wave = true;
  bool thermal = true;
  std::optional<unsigned> workers;
};

struct RunResults {
  correlation::CorrelationResult correlation;
  IntensityMap single_shot;
  IntensityMap incoherent_mean;
  std::optional<IntensityMap> plane_wave;
  correlation::ImageMetrics g_metrics;
  correlation::ImageMetrics single_metrics;
  correlation::ImageMetrics mean_metrics;
  std::optional<double> plane_wave_ncc;
  double incoherence_rel_l2 = 0.0;  // shot-mean coherent vs incoherent I_2
  std::optional<source::ThermalReport> spatial_stats;   // P_r: one shot, all pixels
  std::optional<source::ThermalReport> temporal_stats;  // P_t: one component, many shots
  double seconds = 0.0;
};

source::ThermalReport spatial_thermal_report(const Experiment& experiment);
source::ThermalReport temporal_thermal_report(const Experiment& experiment);

/// Full pipeline without writing files.
RunResults simulate(const Experiment& experiment, const SimulateOptions& options = {});

struct ManifestEntry {
  std::string file;  // relative to the output directory
  std::string sha256;
  std::uintmax_t bytes = 0;
};

struct RunManifest {
  std::string config_echo;
  std::vector<ManifestEntry> artifacts;
  double seconds = 0.0;
  double shots_per_second = 0.0;
  std::vector<std::string> notes;
};

/// Runs every stage and writes the artifact set plus manifest.txt into
/// cfg.output_dir. A failing stage raises an Error whose message starts with
/// "stage '<name>':"; artifacts from earlier stages stay on disk.
RunManifest run_experiment(const ExperimentConfig& cfg);

/// Writes thermal-statistics artifacts only.
RunManifest run_stats(const ExperimentConfig& cfg);

struct SweepRow {
  std::string parameter;
  double value = 0.0;
  double ncc = 0.0;
  double g_contrast = 0.0;
  double single_contrast = 0.0;
  double mean_contrast = 0.0;
};

/// One simulate() per value with `parameter` in {shots, N, g_eff_L, max_angle}.
std::vector<SweepRow> sweep(const ExperimentConfig& cfg, const std::string& parameter,
                            std::span<const double> values);

void write_sweep_csv(const std::filesystem::path& path, std::span<const SweepRow> rows);

}  // namespace chaosimg::runner
