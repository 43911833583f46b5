#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <set>

#include "chaosimg/error.hpp"
#include "chaosimg/io.hpp"
#include "chaosimg/runner.hpp"

using namespace chaosimg;
using namespace chaosimg::runner;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
  const auto dir = fs::temp_directory_path() / "chaosimg_test_runner" / name;
  fs::remove_all(dir);
  return dir;
}

ExperimentConfig small_config() {
  ExperimentConfig cfg;
  cfg.source.components = 8;
  cfg.shots = 300;
  cfg.stats_grid = {64, 64, 64e-6};
  cfg.temporal_samples = 200;
  return cfg;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

}  // namespace

TEST_CASE("config text round trip and validation") {
  auto cfg = small_config();
  set_value(cfg, "crystal.pm_weight", "sinc");
  set_value(cfg, "run.mode", "incoherent");
  set_value(cfg, "source.rng_seed", "18446744073709551615");
  const auto back = parse_config(cfg.to_text());
  CHECK(back.to_text() == cfg.to_text());
  CHECK(back.source.rng_seed == 18446744073709551615ull);

  const auto parsed = parse_config("# comment\nsource.N = 12\n\nrun.shots=50 # trailing\n");
  CHECK(parsed.source.components == 12);
  CHECK(parsed.shots == 50);
  CHECK_THROWS_AS(parse_config("no.such.key=1"), Error);
  CHECK_THROWS_AS(parse_config("source.N=abc"), Error);
  CHECK_THROWS_AS(parse_config("wavelength.pump=600e-9").validate(), Error);
  CHECK_THROWS_AS(parse_config("run.reference_component=8\nsource.N=8").validate(), Error);
  CHECK(ExperimentConfig{}.uses_default_lens_geometry());
  CHECK(!parse_config("geometry.f=0.3").uses_default_lens_geometry());
}

TEST_CASE("three-hole mask") {
  const GridSpec g{64, 64, 16e-6};
  const auto centers = default_hole_centers();
  const auto m = make_three_hole_mask(g, 256e-6, centers);
  // Each disc spans 16 pixels along the rows and columns through its center.
  const int cx = static_cast<int>(std::lround(centers[0][0] / g.pitch)) + 32;
  const int cy = static_cast<int>(std::lround(centers[0][1] / g.pitch)) + 32;
  int row = 0, col = 0;
  for (int i = 0; i < 64; ++i) {
    row += i < 32 && m.at(i, cy) > 0.5;
    col += m.at(cx, i) > 0.5;
  }
  CHECK(row == 16);
  CHECK(col == 16);
  for (double v : m.values()) CHECK((v == 0.0 || v == 1.0));

  try {
    make_three_hole_mask(g, 0.0, centers);
    FAIL("expected empty object");
  } catch (const Error& e) {
    CHECK(std::string(e.what()) == "empty object");
  }
  const std::vector<HoleCenter> edge{{0.45e-3, 0.0}};
  CHECK_THROWS_AS(make_three_hole_mask(g, 256e-6, edge), Error);

  const std::vector<HoleCenter> twice{centers[0], centers[0], centers[1]};
  const std::vector<HoleCenter> once{centers[0], centers[1]};
  const auto a = make_three_hole_mask(g, 256e-6, twice);
  const auto b = make_three_hole_mask(g, 256e-6, once);
  CHECK(std::equal(a.values().begin(), a.values().end(), b.values().begin()));
}

TEST_CASE("PGM mask input") {
  const auto dir = scratch("mask_input");
  fs::create_directories(dir);
  const GridSpec g{64, 64, 16e-6};
  const auto centers = default_hole_centers();
  io::write_pgm8(dir / "m.pgm", make_three_hole_mask(g, 200e-6, centers));
  auto cfg = small_config();
  cfg.mask_path = (dir / "m.pgm").string();
  const Experiment e(cfg);
  CHECK(e.object_mask().sum() == make_three_hole_mask(g, 200e-6, centers).sum());
  cfg.grid = {32, 32, 16e-6};
  CHECK_THROWS_AS(Experiment{cfg}, Error);
}

TEST_CASE("shot loop is independent of the worker count") {
  const Experiment e(small_config());
  const std::array<std::size_t, 2> idx{0, 3};
  const auto one = run_shots(e, 170, idx, 1);
  const auto four = run_shots(e, 170, idx, 4);
  for (std::size_t k = 0; k < idx.size(); ++k) {
    const auto a = correlation::finalize(one.accumulators[k]);
    const auto b = correlation::finalize(four.accumulators[k]);
    CHECK(std::equal(a.g.values().begin(), a.g.values().end(), b.g.values().begin()));
  }
  CHECK(std::equal(one.first_shot.values().begin(), one.first_shot.values().end(), four.first_shot.values().begin()));
  const auto first = e.shot(0);
  CHECK(std::equal(first.intensity_map.values().begin(), first.intensity_map.values().end(),
                   one.first_shot.values().begin()));
}

TEST_CASE("pixel reference mode selects the component's camera pixel") {
  auto cfg = small_config();
  cfg.reference_mode = ReferenceMode::pixel;
  cfg.reference_component = 2;
  const Experiment e(cfg);
  const auto seed = e.seed(11);
  const auto refs = e.reference_vector(seed);
  CHECK(refs.at(e.reference_index(2)) == std::norm(seed.components[2].amplitude));
  SimulateOptions opt;
  opt.thermal = false;
  opt.workers = 2;
  const auto r = simulate(e, opt);
  CHECK(r.g_metrics.ncc > 0.8);
}

TEST_CASE("run_experiment writes a complete, reproducible artifact set") {
  auto cfg = small_config();
  const auto dir_a = scratch("run_a");
  cfg.output_dir = dir_a;
  const auto ma = run_experiment(cfg);
  cfg.output_dir = scratch("run_b");
  const auto mb = run_experiment(cfg);

  std::set<std::string> names;
  for (const auto& a : ma.artifacts) {
    CHECK(names.insert(a.file).second);
    CHECK(fs::exists(dir_a / a.file));
  }
  for (const char* f : {"g_normalized.f64", "g_map.f64", "plane_wave_reference.f64", "single_shot_i2.f64", "mean_i2.f64",
                        "thermal_report.txt", "metrics.csv", "components.csv"}) {
    CHECK(names.count(f) == 1);
  }
  REQUIRE(ma.artifacts.size() == mb.artifacts.size());
  for (std::size_t i = 0; i < ma.artifacts.size(); ++i) {
    if (ma.artifacts[i].file.ends_with(".f64")) CHECK(ma.artifacts[i].sha256 == mb.artifacts[i].sha256);
  }

  // The manifest's config echo reproduces the run.
  const auto manifest = slurp(cfg.output_dir / "manifest.txt");
  const auto begin = manifest.find("[config]\n") + 9;
  const auto echo = manifest.substr(begin, manifest.find("[notes]") - begin);
  auto again = parse_config(echo);
  again.output_dir = scratch("run_c");
  const auto mc = run_experiment(again);
  for (std::size_t i = 0; i < ma.artifacts.size(); ++i) {
    if (ma.artifacts[i].file.ends_with(".f64")) CHECK(ma.artifacts[i].sha256 == mc.artifacts[i].sha256);
  }
  CHECK(manifest.find("not measured values") != std::string::npos);
}

TEST_CASE("a single shot is refused but the plane-wave reference is produced") {
  auto cfg = small_config();
  cfg.shots = 1;
  cfg.output_dir = scratch("one_shot");
  try {
    run_experiment(cfg);
    FAIL("expected correlation refusal");
  } catch (const Error& e) {
    CHECK(std::string(e.what()).starts_with("stage 'correlation':"));
  }
  CHECK(fs::exists(cfg.output_dir / "plane_wave_reference.f64"));
  CHECK(!fs::exists(cfg.output_dir / "g_map.f64"));
}

TEST_CASE("sweep") {
  auto cfg = small_config();
  const auto path = scratch("sweep") / "s.csv";
  write_sweep_csv(path, sweep(cfg, "shots", std::vector<double>{}));
  CHECK(slurp(path) == "parameter,value,ncc,g_contrast,single_contrast,mean_contrast\n");
  CHECK_THROWS_AS(sweep(cfg, "pitch", std::vector<double>{1.0}), Error);

  const auto rows = sweep(cfg, "g_eff_L", std::vector<double>{0.05, 0.2});
  REQUIRE(rows.size() == 2);
  // The normalized map is independent of the gain scale.
  CHECK(rows[0].ncc == doctest::Approx(rows[1].ncc).epsilon(1e-9));
  const auto n_rows = sweep(cfg, "N", std::vector<double>{1.0, 4.0});
  CHECK(n_rows[0].single_contrast > n_rows[1].single_contrast);
}
