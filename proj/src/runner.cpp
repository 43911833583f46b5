#include "chaosimg/runner.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <numbers>
#include <sstream>
#include <thread>

#include "chaosimg/error.hpp"
#include "chaosimg/io.hpp"

namespace chaosimg::runner {
namespace {

constexpr std::uint64_t kShotBlock = 50;

using Clock = std::chrono::steady_clock;

template <typename F>
auto stage(const char* name, F&& body) {
  try {
    return body();
  } catch (const std::exception& e) {
    throw Error(std::string("stage '") + name + "': " + e.what());
  }
}

IntensityMap load_object(const ExperimentConfig& cfg) {
  if (cfg.mask_path.empty()) {
    const auto centers = default_hole_centers();
    return make_three_hole_mask(cfg.grid, cfg.hole_diameter, centers);
  }
  IntensityMap mask = io::read_pgm(cfg.mask_path, cfg.grid.pitch);
  if (mask.grid().nx != cfg.grid.nx || mask.grid().ny != cfg.grid.ny) {
    throw Error("mask " + cfg.mask_path + " does not match the configured grid");
  }
  if (mask.max() <= 0.0) throw Error("empty object");
  return mask;
}

ComplexField object_field(const IntensityMap& mask, double lambda3) {
  std::vector<Complex> amps(mask.values().begin(), mask.values().end());
  return ComplexField(mask.grid(), lambda3, std::move(amps));
}

optics::ImagingGeometry make_geometry(const ExperimentConfig& cfg) {
  cfg.validate();
  return optics::ImagingGeometry::from_wavelengths(cfg.focal_length, cfg.lens_to_crystal, cfg.lambda1, cfg.lambda2,
                                                   cfg.lambda3);
}

bool all_finite(std::span<const double> v) {
  return std::all_of(v.begin(), v.end(), [](double x) { return std::isfinite(x); });
}

void write_text(const std::filesystem::path& path, const std::string& text) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw Error("cannot open " + path.string() + " for writing");
  out << text;
  if (!out) throw Error("write failed: " + path.string());
}

// Artifact list relative to the output directory; each file recorded once.
class ArtifactLog {
 public:
  explicit ArtifactLog(std::filesystem::path dir) : dir_(std::move(dir)) {}

  std::filesystem::path path(const std::string& name) const { return dir_ / name; }
  void add(const std::filesystem::path& p) {
    const std::string rel = std::filesystem::relative(p, dir_).generic_string();
    if (std::find(files_.begin(), files_.end(), rel) == files_.end()) files_.push_back(rel);
  }
  void map(const std::string& stem, const IntensityMap& m) {
    const auto raw = path(stem + ".f64");
    add(raw);
    add(io::write_raw(raw, m));
    const auto pgm = path(stem + ".pgm");
    add(pgm);
    add(io::write_pgm16_preview(pgm, m));
  }

  std::vector<ManifestEntry> entries() const {
    std::vector<ManifestEntry> out;
    for (const auto& f : files_) {
      const auto p = dir_ / f;
      out.push_back({f, io::sha256_file(p), std::filesystem::file_size(p)});
    }
    return out;
  }

 private:
  std::filesystem::path dir_;
  std::vector<std::string> files_;
};

std::string manifest_text(const RunManifest& m) {
  std::ostringstream out;
  out << "# chaosimg run manifest\n[config]\n" << m.config_echo << "[notes]\n";
  for (const auto& n : m.notes) out << n << '\n';
  out << "[artifacts]\n";
  for (const auto& a : m.artifacts) out << "file=" << a.file << " sha256=" << a.sha256 << " bytes=" << a.bytes << '\n';
  out << "[timing]\nseconds=" << io::format_double(m.seconds)
      << "\nshots_per_second=" << io::format_double(m.shots_per_second) << '\n';
  return out.str();
}

std::vector<std::string> manifest_notes(const ExperimentConfig& cfg) {
  std::vector<std::string> notes;
  if (cfg.uses_default_lens_geometry()) {
    notes.emplace_back(
        "geometry.f and geometry.d_F are simulator defaults, not measured values "
        "(imaging lens focal length unreported); d = 2f - d_F = " +
        io::format_double(2.0 * cfg.focal_length - cfg.lens_to_crystal) + " m");
  }
  return notes;
}

std::string metrics_text(const RunResults& r) {
  std::ostringstream out;
  out << "shots=" << r.correlation.shots << '\n'
      << "sigma2_reference=" << io::format_double(r.correlation.sigma2_reference) << '\n'
      << "mean_reference=" << io::format_double(r.correlation.mean_reference) << '\n'
      << "g_ncc=" << io::format_double(r.g_metrics.ncc) << '\n'
      << "g_contrast=" << io::format_double(r.g_metrics.contrast) << '\n'
      << "g_background_rms=" << io::format_double(r.g_metrics.background_rms) << '\n'
      << "single_shot_contrast=" << io::format_double(r.single_metrics.contrast) << '\n'
      << "single_shot_ncc=" << io::format_double(r.single_metrics.ncc) << '\n'
      << "mean_i2_contrast=" << io::format_double(r.mean_metrics.contrast) << '\n'
      << "mean_i2_ncc=" << io::format_double(r.mean_metrics.ncc) << '\n'
      << "incoherence_rel_l2=" << io::format_double(r.incoherence_rel_l2) << '\n';
  if (r.plane_wave_ncc) out << "plane_wave_ncc=" << io::format_double(*r.plane_wave_ncc) << '\n';
  return out.str();
}

std::string metrics_csv(const RunResults& r) {
  std::ostringstream out;
  out << "shots,g_ncc,g_contrast,g_background_rms,single_shot_contrast,mean_i2_contrast,incoherence_rel_l2,"
         "plane_wave_ncc\n"
      << r.correlation.shots << ',' << io::format_double(r.g_metrics.ncc) << ','
      << io::format_double(r.g_metrics.contrast) << ',' << io::format_double(r.g_metrics.background_rms) << ','
      << io::format_double(r.single_metrics.contrast) << ',' << io::format_double(r.mean_metrics.contrast) << ','
      << io::format_double(r.incoherence_rel_l2) << ','
      << (r.plane_wave_ncc ? io::format_double(*r.plane_wave_ncc) : std::string("")) << '\n';
  return out.str();
}

std::string components_csv(const Experiment& e) {
  std::ostringstream out;
  out << "n,theta,beta,x_2n,y_2n,c_n_sq\n";
  for (const auto& c : e.basis().components()) {
    out << c.index << ',' << io::format_double(c.match.theta2) << ',' << io::format_double(c.match.beta2) << ','
        << io::format_double(c.shift.x) << ',' << io::format_double(c.shift.y) << ','
        << io::format_double(std::norm(c.coefficient)) << '\n';
  }
  return out.str();
}

void write_thermal(ArtifactLog& log, const source::ThermalReport& spatial, const source::ThermalReport& temporal) {
  const auto ps = log.path("thermal_spatial_hist.csv");
  source::write_histogram_csv(ps, spatial);
  log.add(ps);
  const auto pt = log.path("thermal_temporal_hist.csv");
  source::write_histogram_csv(pt, temporal);
  log.add(pt);
  const auto pr = log.path("thermal_report.txt");
  write_text(pr, source::report_text(spatial, "spatial.") + source::report_text(temporal, "temporal."));
  log.add(pr);
}

}  // namespace

std::vector<HoleCenter> default_hole_centers() {
  return {HoleCenter{-152e-6, -88e-6}, HoleCenter{152e-6, -88e-6}, HoleCenter{-8e-6, 152e-6}};
}

IntensityMap make_three_hole_mask(const GridSpec& grid, double hole_diameter, std::span<const HoleCenter> centers) {
  grid.validate();
  IntensityMap mask(grid);
  const double r = 0.5 * hole_diameter;
  const double half_x = 0.5 * grid.extent_x();
  const double half_y = 0.5 * grid.extent_y();
  for (const auto& c : centers) {
    if (r > 0.0 && (c[0] - r < -half_x || c[0] + r > half_x || c[1] - r < -half_y || c[1] + r > half_y)) {
      throw Error("holes do not fit on grid");
    }
    for (int iy = 0; iy < grid.ny; ++iy) {
      for (int ix = 0; ix < grid.nx; ++ix) {
        const double dx = grid.x(ix) - c[0];
        const double dy = grid.y(iy) - c[1];
        if (dx * dx + dy * dy < r * r) mask.at(ix, iy) = 1.0;
      }
    }
  }
  if (mask.max() <= 0.0) throw Error("empty object");
  return mask;
}

unsigned worker_count() {
  if (const char* env = std::getenv("CHAOSIMG_WORKERS")) {
    const int v = std::atoi(env);
    if (v > 0) return static_cast<unsigned>(v);
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

Experiment::Experiment(ExperimentConfig cfg)
    : cfg_(std::move(cfg)),
      geometry_(make_geometry(cfg_)),
      mask_(load_object(cfg_)),
      pump_(optics::image_pump_2f2f(object_field(mask_, cfg_.lambda3), geometry_)),
      directions_(source::fix_component_directions(cfg_.source)),
      basis_(directions_, cfg_.lambda1, pump_, cfg_.crystal, geometry_) {}

IntensityMap Experiment::image_plane_object() const {
  IntensityMap inverted = optics::invert_through_origin(mask_);
  std::vector<double> values(inverted.values().begin(), inverted.values().end());
  for (double& v : values) v *= v;
  return IntensityMap(basis_.grid(), std::move(values));
}

downconversion::ImageShift Experiment::component_shift(std::size_t n) const {
  return basis_.components().at(n).shift;
}

source::ChaoticSeed Experiment::seed(std::uint64_t shot) const {
  return source::draw_shot_amplitudes(directions_, cfg_.source, shot);
}

std::vector<double> Experiment::reference_vector(const source::ChaoticSeed& seed) const {
  if (cfg_.reference_mode == ReferenceMode::component) return source::reference_intensities(seed);
  const GridSpec camera{cfg_.reference_camera.nx, cfg_.reference_camera.ny, cfg_.source.reference_pixel};
  const IntensityMap map = source::fourier_plane_map(seed, cfg_.source, camera);
  return {map.values().begin(), map.values().end()};
}

std::size_t Experiment::reference_index(std::size_t n) const {
  if (n >= directions_.size()) throw Error("reference component out of range");
  if (cfg_.reference_mode == ReferenceMode::component) return n;
  const GridSpec camera{cfg_.reference_camera.nx, cfg_.reference_camera.ny, cfg_.source.reference_pixel};
  const auto p = source::reference_pixel(directions_[n], cfg_.source);
  const int ix = p.x + camera.nx / 2;
  const int iy = p.y + camera.ny / 2;
  if (ix < 0 || iy < 0 || ix >= camera.nx || iy >= camera.ny) {
    throw Error("reference component falls outside the reference camera");
  }
  return camera.index(ix, iy);
}

correlation::ShotRecord Experiment::shot(std::uint64_t shot) const {
  const auto s = seed(shot);
  return {shot, reference_vector(s), basis_.intensity(s, cfg_.mode)};
}

IntensityMap Experiment::plane_wave_reference() const {
  const std::vector<source::Direction> on_axis{source::Direction{}};
  const downconversion::ImagePlaneBasis single(on_axis, cfg_.lambda1, pump_, cfg_.crystal, geometry_);
  source::ChaoticSeed unit;
  unit.wavelength = cfg_.lambda1;
  unit.components.push_back(source::PlaneWaveComponent::make(on_axis[0], cfg_.lambda1, 1.0));
  return single.intensity(unit, cfg_.mode);
}

ShotLoopResult run_shots(const Experiment& experiment, std::uint64_t shots,
                         std::span<const std::size_t> reference_indices, unsigned workers) {
  const auto& basis = experiment.basis();
  const GridSpec grid = basis.grid();
  const auto mode = experiment.config().mode;
  const bool track_incoherent = mode == downconversion::Mode::coherent;
  const std::uint64_t blocks = (shots + kShotBlock - 1) / kShotBlock;
  workers = std::max(1u, workers);

  struct Block {
    std::vector<correlation::CorrelationAccumulator> acc;
    std::vector<double> incoherent_sum;
  };

  ShotLoopResult result;
  for (auto j : reference_indices) result.accumulators.emplace_back(grid, j);
  result.first_shot = IntensityMap(grid);
  std::vector<double> incoherent_sum(grid.size(), 0.0);

  auto run_block = [&](std::uint64_t b, Block& out) {
    for (auto j : reference_indices) out.acc.emplace_back(grid, j);
    out.incoherent_sum.assign(grid.size(), 0.0);
    std::vector<double> map(grid.size());
    std::vector<double> incoherent(grid.size());
    std::vector<Complex> scratch(grid.size());
    std::vector<Complex> amps;
    const std::uint64_t end = std::min(shots, (b + 1) * kShotBlock);
    for (std::uint64_t s = b * kShotBlock; s < end; ++s) {
      const auto seed = experiment.seed(s);
      amps.clear();
      for (const auto& c : seed.components) amps.push_back(c.amplitude);
      const auto refs = experiment.reference_vector(seed);
      basis.intensity_into(amps, mode, map, scratch);
      for (auto& acc : out.acc) acc.accumulate(refs.at(acc.reference_index()), map);
      if (track_incoherent) {
        basis.intensity_into(amps, downconversion::Mode::incoherent, incoherent, scratch);
      } else {
        incoherent = map;
      }
      for (std::size_t p = 0; p < incoherent.size(); ++p) out.incoherent_sum[p] += incoherent[p];
      if (s == 0) std::copy(map.begin(), map.end(), result.first_shot.values().begin());
    }
  };

  for (std::uint64_t wave = 0; wave < blocks; wave += workers) {
    const std::uint64_t wave_end = std::min<std::uint64_t>(blocks, wave + workers);
    std::vector<Block> results(static_cast<std::size_t>(wave_end - wave));
    if (results.size() == 1) {
      run_block(wave, results[0]);
    } else {
      std::vector<std::thread> threads;
      std::vector<std::exception_ptr> errors(results.size());
      for (std::uint64_t b = wave; b < wave_end; ++b) {
        const auto slot = static_cast<std::size_t>(b - wave);
        threads.emplace_back([&, b, slot] {
          try {
            run_block(b, results[slot]);
          } catch (...) {
            errors[slot] = std::current_exception();
          }
        });
      }
      for (auto& t : threads) t.join();
      for (auto& e : errors) {
        if (e) std::rethrow_exception(e);
      }
    }
    for (auto& block : results) {
      for (std::size_t k = 0; k < block.acc.size(); ++k) result.accumulators[k].merge(block.acc[k]);
      for (std::size_t p = 0; p < incoherent_sum.size(); ++p) incoherent_sum[p] += block.incoherent_sum[p];
    }
  }

  result.shots = shots;
  for (double& v : incoherent_sum) v /= static_cast<double>(shots);
  result.incoherent_mean = IntensityMap(grid, std::move(incoherent_sum));
  return result;
}

source::ThermalReport spatial_thermal_report(const Experiment& experiment) {
  const ComplexField speckle = source::seed_field_on_grid(experiment.seed(0), experiment.config().stats_grid);
  const IntensityMap i1 = optics::intensity(speckle);
  return source::thermal_statistics_report(i1.values());
}

source::ThermalReport temporal_thermal_report(const Experiment& experiment) {
  const auto& cfg = experiment.config();
  std::vector<double> series;
  series.reserve(cfg.temporal_samples);
  for (std::uint64_t t = 0; t < cfg.temporal_samples; ++t) {
    series.push_back(std::norm(experiment.seed(t).components[cfg.reference_component].amplitude));
  }
  return source::thermal_statistics_report(series);
}

RunResults simulate(const Experiment& experiment, const SimulateOptions& options) {
  const auto start = Clock::now();
  const auto& cfg = experiment.config();
  RunResults r;
  const IntensityMap truth = experiment.image_plane_object();

  if (options.plane_wave && cfg.plane_wave_reference) {
    r.plane_wave = stage("plane-wave reference", [&] { return experiment.plane_wave_reference(); });
    r.plane_wave_ncc = correlation::image_metrics(*r.plane_wave, truth, 0.0, 0.0).ncc;
  }
  if (options.thermal) {
    r.spatial_stats = stage("source statistics", [&] { return spatial_thermal_report(experiment); });
    r.temporal_stats = stage("source statistics", [&] { return temporal_thermal_report(experiment); });
  }

  const std::size_t j = experiment.reference_index(cfg.reference_component);
  const std::array<std::size_t, 1> indices{j};
  auto loop = stage("shots", [&] {
    return run_shots(experiment, cfg.shots, indices, options.workers.value_or(worker_count()));
  });
  r.correlation = stage("correlation", [&] { return correlation::finalize(loop.accumulators[0]); });
  r.single_shot = std::move(loop.first_shot);
  r.incoherent_mean = std::move(loop.incoherent_mean);

  stage("metrics", [&] {
    const auto shift = experiment.component_shift(cfg.reference_component);
    if (!r.correlation.degenerate) {
      r.g_metrics = correlation::image_metrics(r.correlation.normalized, truth, shift.x, shift.y);
    }
    r.single_metrics = correlation::image_metrics(r.single_shot, truth, shift.x, shift.y);
    r.mean_metrics = correlation::image_metrics(r.correlation.mean_i2, truth, shift.x, shift.y);
    r.incoherence_rel_l2 = relative_l2(r.correlation.mean_i2.values(), r.incoherent_mean.values());
    return 0;
  });
  r.seconds = std::chrono::duration<double>(Clock::now() - start).count();
  return r;
}

RunManifest run_experiment(const ExperimentConfig& cfg) {
  const auto start = Clock::now();
  stage("config", [&] {
    cfg.validate();
    return 0;
  });
  ArtifactLog log(cfg.output_dir);
  std::filesystem::create_directories(cfg.output_dir);

  const Experiment experiment = stage("optics", [&] { return Experiment(cfg); });

  stage("object", [&] {
    const auto p = log.path("object_mask.pgm");
    io::write_pgm8(p, experiment.object_mask());
    log.add(p);
    const auto pump = log.path("pump_crystal_face.f64");
    log.add(pump);
    log.add(io::write_raw(pump, experiment.pump()));
    return 0;
  });

  std::optional<double> plane_wave_ncc;
  if (cfg.plane_wave_reference) {
    stage("plane-wave reference", [&] {
      const IntensityMap pw = experiment.plane_wave_reference();
      log.map("plane_wave_reference", pw);
      plane_wave_ncc = correlation::image_metrics(pw, experiment.image_plane_object(), 0.0, 0.0).ncc;
      return 0;
    });
  }

  stage("source statistics", [&] {
    write_thermal(log, spatial_thermal_report(experiment), temporal_thermal_report(experiment));
    return 0;
  });

  SimulateOptions options;
  options.plane_wave = false;
  options.thermal = false;
  RunResults r = simulate(experiment, options);
  r.plane_wave_ncc = plane_wave_ncc;

  stage("sanity", [&] {
    if (r.correlation.degenerate) throw Error("reference intensity has zero variance");
    for (const auto* m : {&r.correlation.g, &r.correlation.normalized, &r.correlation.mean_i2, &r.single_shot}) {
      if (!all_finite(m->values())) throw Error("non-finite values in output maps");
    }
    return 0;
  });

  stage("write", [&] {
    log.map("g_map", r.correlation.g);
    log.map("g_normalized", r.correlation.normalized);
    log.map("mean_i2", r.correlation.mean_i2);
    log.map("single_shot_i2", r.single_shot);
    const auto comps = log.path("components.csv");
    write_text(comps, components_csv(experiment));
    log.add(comps);
    const auto mt = log.path("metrics.txt");
    write_text(mt, metrics_text(r));
    log.add(mt);
    const auto mc = log.path("metrics.csv");
    write_text(mc, metrics_csv(r));
    log.add(mc);
    return 0;
  });

  RunManifest manifest;
  manifest.config_echo = cfg.to_text();
  manifest.notes = manifest_notes(cfg);
  manifest.artifacts = log.entries();
  manifest.seconds = std::chrono::duration<double>(Clock::now() - start).count();
  manifest.shots_per_second = r.seconds > 0.0 ? static_cast<double>(cfg.shots) / r.seconds : 0.0;
  write_text(log.path("manifest.txt"), manifest_text(manifest));
  return manifest;
}

RunManifest run_stats(const ExperimentConfig& cfg) {
  const auto start = Clock::now();
  stage("config", [&] {
    cfg.validate();
    return 0;
  });
  ArtifactLog log(cfg.output_dir);
  std::filesystem::create_directories(cfg.output_dir);
  const Experiment experiment = stage("optics", [&] { return Experiment(cfg); });
  stage("source statistics", [&] {
    write_thermal(log, spatial_thermal_report(experiment), temporal_thermal_report(experiment));
    return 0;
  });
  RunManifest manifest;
  manifest.config_echo = cfg.to_text();
  manifest.notes = manifest_notes(cfg);
  manifest.artifacts = log.entries();
  manifest.seconds = std::chrono::duration<double>(Clock::now() - start).count();
  write_text(log.path("manifest.txt"), manifest_text(manifest));
  return manifest;
}

std::vector<SweepRow> sweep(const ExperimentConfig& cfg, const std::string& parameter, std::span<const double> values) {
  if (parameter != "shots" && parameter != "N" && parameter != "g_eff_L" && parameter != "max_angle") {
    throw Error("unknown sweep parameter: " + parameter);
  }
  std::vector<SweepRow> rows;
  for (double v : values) {
    ExperimentConfig c = cfg;
    if (parameter == "shots") {
      c.shots = static_cast<std::uint64_t>(std::llround(v));
    } else if (parameter == "N") {
      c.source.components = static_cast<int>(std::lround(v));
    } else if (parameter == "g_eff_L") {
      c.crystal.g_eff = v / c.crystal.length;
    } else {
      c.source.max_angle = v;
    }
    const Experiment e = stage("optics", [&] { return Experiment(c); });
    SimulateOptions options;
    options.plane_wave = false;
    options.thermal = false;
    const RunResults r = simulate(e, options);
    rows.push_back({parameter, v, r.g_metrics.ncc, r.g_metrics.contrast, r.single_metrics.contrast,
                    r.mean_metrics.contrast});
  }
  return rows;
}

void write_sweep_csv(const std::filesystem::path& path, std::span<const SweepRow> rows) {
  std::ostringstream out;
  out << "parameter,value,ncc,g_contrast,single_contrast,mean_contrast\n";
  for (const auto& r : rows) {
    out << r.parameter << ',' << io::format_double(r.value) << ',' << io::format_double(r.ncc) << ','
        << io::format_double(r.g_contrast) << ',' << io::format_double(r.single_contrast) << ','
        << io::format_double(r.mean_contrast) << '\n';
  }
  write_text(path, out.str());
}

}  // namespace chaosimg::runner
