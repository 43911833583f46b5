#include <CLI11.hpp>

#include <cstdint>
#include <exception>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "chaosimg/config.hpp"
#include "chaosimg/io.hpp"
#include "chaosimg/runner.hpp"

namespace {

using chaosimg::runner::ExperimentConfig;

struct CommonOptions {
  std::string config;
  std::string out;
  std::optional<std::uint64_t> seed;
  std::optional<std::uint64_t> shots;
  std::string mode;
  std::optional<bool> plane_wave;
};

void add_common(CLI::App* app, CommonOptions& opts) {
  app->add_option("--config", opts.config, "key=value configuration file")->check(CLI::ExistingFile);
  app->add_option("--out", opts.out, "output directory");
  app->add_option("--seed", opts.seed, "RNG seed (source.rng_seed)");
  app->add_option("--shots", opts.shots, "number of shots M");
  app->add_option("--mode", opts.mode, "coherent|incoherent")->check(CLI::IsMember({"coherent", "incoherent"}));
  app->add_flag("--plane-wave-reference,!--no-plane-wave-reference", opts.plane_wave,
                "emit the deterministic plane-wave reference image");
}

ExperimentConfig resolve(const CommonOptions& opts) {
  ExperimentConfig cfg;
  if (!opts.config.empty()) cfg = chaosimg::runner::load_config(opts.config);
  if (!opts.out.empty()) cfg.output_dir = opts.out;
  if (opts.seed) cfg.source.rng_seed = *opts.seed;
  if (opts.shots) cfg.shots = *opts.shots;
  if (!opts.mode.empty()) chaosimg::runner::set_value(cfg, "run.mode", opts.mode);
  if (opts.plane_wave) cfg.plane_wave_reference = *opts.plane_wave;
  cfg.validate();
  return cfg;
}

void print_manifest(const chaosimg::runner::RunManifest& m, const ExperimentConfig& cfg) {
  std::cout << "wrote " << m.artifacts.size() << " artifacts to " << cfg.output_dir.string() << " in "
            << chaosimg::io::format_double(m.seconds) << " s\n";
  for (const auto& note : m.notes) std::cout << "note: " << note << '\n';
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Chaotic-seed downconversion imaging simulator"};
  app.require_subcommand(1);

  CommonOptions run_opts;
  auto* run = app.add_subcommand("run", "full pipeline: G map, reference, single-shot and mean maps, statistics");
  add_common(run, run_opts);

  CommonOptions sweep_opts;
  std::string sweep_param;
  std::vector<double> sweep_values;
  auto* sweep = app.add_subcommand("sweep", "metrics versus one parameter");
  add_common(sweep, sweep_opts);
  sweep->add_option("--param", sweep_param, "shots, N, g_eff_L or max_angle")->required();
  sweep->add_option("--values", sweep_values, "comma-separated values")->delimiter(',');

  CommonOptions stats_opts;
  auto* stats = app.add_subcommand("stats", "thermal statistics of the seed only");
  add_common(stats, stats_opts);

  std::string mask_out = "mask.pgm";
  int mask_nx = 64;
  int mask_ny = 64;
  double mask_pitch = 16e-6;
  double mask_diameter = 256e-6;
  auto* mask = app.add_subcommand("mask", "write the three-hole object mask");
  mask->add_option("--out", mask_out, "output PGM path");
  mask->add_option("--nx", mask_nx);
  mask->add_option("--ny", mask_ny);
  mask->add_option("--pitch", mask_pitch, "meters");
  mask->add_option("--diameter", mask_diameter, "hole diameter, meters");

  CLI11_PARSE(app, argc, argv);

  std::string stage = "config";
  try {
    if (*run) {
      const auto cfg = resolve(run_opts);
      stage = "run";
      print_manifest(chaosimg::runner::run_experiment(cfg), cfg);
    } else if (*stats) {
      const auto cfg = resolve(stats_opts);
      stage = "stats";
      print_manifest(chaosimg::runner::run_stats(cfg), cfg);
    } else if (*sweep) {
      const auto cfg = resolve(sweep_opts);
      stage = "sweep";
      const auto rows = chaosimg::runner::sweep(cfg, sweep_param, sweep_values);
      std::filesystem::create_directories(cfg.output_dir);
      const auto path = cfg.output_dir / ("sweep_" + sweep_param + ".csv");
      chaosimg::runner::write_sweep_csv(path, rows);
      std::cout << "wrote " << path.string() << " (" << rows.size() << " rows)\n";
    } else if (*mask) {
      stage = "mask";
      const chaosimg::GridSpec grid{mask_nx, mask_ny, mask_pitch};
      const auto centers = chaosimg::runner::default_hole_centers();
      const auto m = chaosimg::runner::make_three_hole_mask(grid, mask_diameter, centers);
      chaosimg::io::write_pgm8(mask_out, m);
      std::cout << "wrote " << mask_out << '\n';
    }
  } catch (const std::exception& e) {
    std::cerr << "chaosimg: " << stage << ": " << e.what() << '\n';
    return 1;
  }
  return 0;
}
