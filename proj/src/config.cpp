#include "chaosimg/config.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include "chaosimg/error.hpp"
#include "chaosimg/io.hpp"

namespace chaosimg::runner {
namespace {

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

[[noreturn]] void bad_value(std::string_view key, std::string_view value) {
  throw Error("invalid value for " + std::string(key) + ": '" + std::string(value) + "'");
}

double to_double(std::string_view key, std::string_view value) {
  double v = 0.0;
  auto [ptr, ec] = std::from_chars(value.data(), value.data() + value.size(), v);
  if (ec != std::errc() || ptr != value.data() + value.size() || !std::isfinite(v)) bad_value(key, value);
  return v;
}

template <typename Int>
Int to_int(std::string_view key, std::string_view value) {
  Int v = 0;
  auto [ptr, ec] = std::from_chars(value.data(), value.data() + value.size(), v);
  if (ec != std::errc() || ptr != value.data() + value.size()) bad_value(key, value);
  return v;
}

bool to_bool(std::string_view key, std::string_view value) {
  if (value == "true" || value == "1" || value == "on") return true;
  if (value == "false" || value == "0" || value == "off") return false;
  bad_value(key, value);
}

}  // namespace

std::string to_string(downconversion::Mode mode) {
  return mode == downconversion::Mode::coherent ? "coherent" : "incoherent";
}

std::string to_string(ReferenceMode mode) { return mode == ReferenceMode::component ? "component" : "pixel"; }

std::string to_string(downconversion::PhaseMatchWeight weight) {
  return weight == downconversion::PhaseMatchWeight::uniform ? "uniform" : "sinc";
}

void set_value(ExperimentConfig& cfg, std::string_view key, std::string_view value) {
  using downconversion::Mode;
  using downconversion::PhaseMatchWeight;
  if (key == "grid.nx") cfg.grid.nx = to_int<int>(key, value);
  else if (key == "grid.ny") cfg.grid.ny = to_int<int>(key, value);
  else if (key == "grid.pitch") cfg.grid.pitch = to_double(key, value);
  else if (key == "wavelength.seed") cfg.lambda1 = cfg.source.wavelength = to_double(key, value);
  else if (key == "wavelength.generated") cfg.lambda2 = to_double(key, value);
  else if (key == "wavelength.pump") cfg.lambda3 = to_double(key, value);
  else if (key == "geometry.f") cfg.focal_length = to_double(key, value);
  else if (key == "geometry.d_F") cfg.lens_to_crystal = to_double(key, value);
  else if (key == "crystal.L") cfg.crystal.length = to_double(key, value);
  else if (key == "crystal.g_eff") cfg.crystal.g_eff = to_double(key, value);
  else if (key == "crystal.pm_weight") {
    if (value == "uniform") cfg.crystal.weight = PhaseMatchWeight::uniform;
    else if (value == "sinc") cfg.crystal.weight = PhaseMatchWeight::sinc;
    else bad_value(key, value);
  } else if (key == "crystal.exact_gain") cfg.crystal.exact_gain = to_bool(key, value);
  else if (key == "source.N") cfg.source.components = to_int<int>(key, value);
  else if (key == "source.max_angle") cfg.source.max_angle = to_double(key, value);
  else if (key == "source.sigma_a") cfg.source.amplitude_scale = to_double(key, value);
  else if (key == "source.rng_seed") cfg.source.rng_seed = to_int<std::uint64_t>(key, value);
  else if (key == "source.fourier_f") cfg.source.fourier_focal_length = to_double(key, value);
  else if (key == "source.reference_pixel") cfg.source.reference_pixel = to_double(key, value);
  else if (key == "run.shots") cfg.shots = to_int<std::uint64_t>(key, value);
  else if (key == "run.reference_component") cfg.reference_component = to_int<std::size_t>(key, value);
  else if (key == "run.reference_mode") {
    if (value == "component") cfg.reference_mode = ReferenceMode::component;
    else if (value == "pixel") cfg.reference_mode = ReferenceMode::pixel;
    else bad_value(key, value);
  } else if (key == "run.mode") {
    if (value == "coherent") cfg.mode = Mode::coherent;
    else if (value == "incoherent") cfg.mode = Mode::incoherent;
    else bad_value(key, value);
  } else if (key == "run.plane_wave_reference") cfg.plane_wave_reference = to_bool(key, value);
  else if (key == "object.mask") cfg.mask_path = std::string(value);
  else if (key == "object.hole_diameter") cfg.hole_diameter = to_double(key, value);
  else if (key == "output.dir") cfg.output_dir = std::string(value);
  else if (key == "stats.nx") cfg.stats_grid.nx = to_int<int>(key, value);
  else if (key == "stats.ny") cfg.stats_grid.ny = to_int<int>(key, value);
  else if (key == "stats.pitch") cfg.stats_grid.pitch = to_double(key, value);
  else if (key == "stats.temporal_samples") cfg.temporal_samples = to_int<std::uint64_t>(key, value);
  else if (key == "camera.nx") cfg.reference_camera.nx = to_int<int>(key, value);
  else if (key == "camera.ny") cfg.reference_camera.ny = to_int<int>(key, value);
  else throw Error("unknown config key: " + std::string(key));
}

ExperimentConfig parse_config(std::string_view text, ExperimentConfig base) {
  std::size_t line_no = 0;
  while (!text.empty()) {
    ++line_no;
    const auto nl = text.find('\n');
    std::string_view line = text.substr(0, nl);
    text = nl == std::string_view::npos ? std::string_view{} : text.substr(nl + 1);
    if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) throw Error("config line " + std::to_string(line_no) + ": expected key=value");
    set_value(base, trim(line.substr(0, eq)), trim(line.substr(eq + 1)));
  }
  return base;
}

ExperimentConfig load_config(const std::filesystem::path& path, ExperimentConfig base) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open config " + path.string());
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_config(buf.str(), std::move(base));
}

void ExperimentConfig::validate() const {
  grid.validate();
  if (!grid.square()) throw Error("invalid config: the object grid must be square");
  stats_grid.validate();
  GridSpec{reference_camera.nx, reference_camera.ny, source.reference_pixel}.validate();
  if (!(lambda1 > 0.0 && lambda2 > 0.0 && lambda3 > 0.0)) throw Error("invalid config: wavelengths must be positive");
  const double lhs = 1.0 / lambda3;
  const double rhs = 1.0 / lambda1 + 1.0 / lambda2;
  if (std::abs(lhs - rhs) > 1e-9 * lhs) throw Error("invalid config: 1/lambda3 must equal 1/lambda1 + 1/lambda2");
  if (std::abs(source.wavelength - lambda1) > 1e-12 * lambda1) {
    throw Error("invalid config: source wavelength differs from wavelength.seed");
  }
  if (!(focal_length > 0.0) || !(lens_to_crystal > 0.0) || !(lens_to_crystal < 2.0 * focal_length)) {
    throw Error("invalid geometry: require 0 < d_F < 2f");
  }
  crystal.validate();
  source.validate();
  if (shots < 1) throw Error("invalid config: run.shots must be >= 1");
  if (reference_component >= static_cast<std::size_t>(source.components)) {
    throw Error("invalid config: run.reference_component must be < source.N");
  }
  if (!(hole_diameter >= 0.0)) throw Error("invalid config: hole diameter must be nonnegative");
  if (temporal_samples < 100) throw Error("invalid config: stats.temporal_samples must be >= 100");
}

std::string ExperimentConfig::to_text() const {
  using io::format_double;
  std::ostringstream out;
  out << "grid.nx=" << grid.nx << '\n'
      << "grid.ny=" << grid.ny << '\n'
      << "grid.pitch=" << format_double(grid.pitch) << '\n'
      << "wavelength.seed=" << format_double(lambda1) << '\n'
      << "wavelength.generated=" << format_double(lambda2) << '\n'
      << "wavelength.pump=" << format_double(lambda3) << '\n'
      << "geometry.f=" << format_double(focal_length) << '\n'
      << "geometry.d_F=" << format_double(lens_to_crystal) << '\n'
      << "crystal.L=" << format_double(crystal.length) << '\n'
      << "crystal.g_eff=" << format_double(crystal.g_eff) << '\n'
      << "crystal.pm_weight=" << to_string(crystal.weight) << '\n'
      << "crystal.exact_gain=" << (crystal.exact_gain ? "true" : "false") << '\n'
      << "source.N=" << source.components << '\n'
      << "source.max_angle=" << format_double(source.max_angle) << '\n'
      << "source.sigma_a=" << format_double(source.amplitude_scale) << '\n'
      << "source.rng_seed=" << source.rng_seed << '\n'
      << "source.fourier_f=" << format_double(source.fourier_focal_length) << '\n'
      << "source.reference_pixel=" << format_double(source.reference_pixel) << '\n'
      << "run.shots=" << shots << '\n'
      << "run.reference_component=" << reference_component << '\n'
      << "run.reference_mode=" << to_string(reference_mode) << '\n'
      << "run.mode=" << to_string(mode) << '\n'
      << "run.plane_wave_reference=" << (plane_wave_reference ? "true" : "false") << '\n'
      << "object.mask=" << mask_path << '\n'
      << "object.hole_diameter=" << format_double(hole_diameter) << '\n'
      << "output.dir=" << output_dir.string() << '\n'
      << "stats.nx=" << stats_grid.nx << '\n'
      << "stats.ny=" << stats_grid.ny << '\n'
      << "stats.pitch=" << format_double(stats_grid.pitch) << '\n'
      << "stats.temporal_samples=" << temporal_samples << '\n'
      << "camera.nx=" << reference_camera.nx << '\n'
      << "camera.ny=" << reference_camera.ny << '\n';
  return out.str();
}

bool ExperimentConfig::uses_default_lens_geometry() const {
  const ExperimentConfig defaults;
  return focal_length == defaults.focal_length && lens_to_crystal == defaults.lens_to_crystal;
}

}  // namespace chaosimg::runner
