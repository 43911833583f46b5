#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numbers>

#include "chaosimg/correlation.hpp"
#include "chaosimg/downconversion.hpp"
#include "chaosimg/error.hpp"
#include "chaosimg/optics.hpp"
#include "chaosimg/rng.hpp"
#include "chaosimg/runner.hpp"

using namespace chaosimg;
using namespace chaosimg::downconversion;

namespace {

const GridSpec kGrid{64, 64, 16e-6};

optics::ImagingGeometry geometry() {
  return optics::ImagingGeometry::from_wavelengths(0.20, 0.15, 1064e-9, 1064e-9, 532e-9);
}

IntensityMap mask() {
  const auto centers = runner::default_hole_centers();
  return runner::make_three_hole_mask(kGrid, 256e-6, centers);
}

ComplexField pump() {
  const auto m = mask();
  return optics::image_pump_2f2f(ComplexField(kGrid, 532e-9, std::vector<Complex>(m.values().begin(), m.values().end())),
                                 geometry());
}

IntensityMap inverted_object() {
  const auto inv = optics::invert_through_origin(mask());
  return inv;
}

source::ChaoticSeed seed_of(const std::vector<source::Direction>& dirs, const std::vector<Complex>& amps) {
  source::ChaoticSeed s;
  s.wavelength = 1064e-9;
  for (std::size_t n = 0; n < dirs.size(); ++n) {
    s.components.push_back(source::PlaneWaveComponent::make(dirs[n], 1064e-9, amps[n]));
  }
  return s;
}

}  // namespace

TEST_CASE("mix_low_gain examples") {
  CrystalConfig c;
  c.length = 1.0;
  c.g_eff = 1.0;
  CHECK(mix_low_gain(1.0, 1.0, c, 1.0) == Complex(0.0, 1.0));

  const double phi = 0.7;
  const Complex a3 = std::polar(1.3, -0.4);
  const Complex a2 = mix_low_gain(std::polar(2.0, phi), a3, c, 1.0);
  CHECK(std::arg(a2) == doctest::Approx(std::numbers::pi / 2 - phi + std::arg(a3)));
  CHECK(std::abs(mix_low_gain(0.5, 2.0 * a3, c, 0.3)) == doctest::Approx(2.0 * std::abs(mix_low_gain(0.5, a3, c, 0.3))));

  CrystalConfig exact = c;
  exact.exact_gain = true;
  CHECK(mix_low_gain(1.0, 0.0, exact, 1.0) == Complex(0.0));
  exact.g_eff = 1e-4;
  c.g_eff = 1e-4;
  const Complex lin = mix_low_gain(Complex(0.3, 0.2), a3, c, 0.8);
  const Complex ex = mix_low_gain(Complex(0.3, 0.2), a3, exact, 0.8);
  CHECK(std::abs(ex - lin) / std::abs(lin) < 1e-8);
}

TEST_CASE("phase matching") {
  const auto g = geometry();
  const auto on_axis = phase_match(source::PlaneWaveComponent::make({}, 1064e-9, 1.0), g);
  CHECK(on_axis.theta2 == 0.0);
  CHECK(on_axis.beta2 == 0.0);
  CHECK(std::abs(on_axis.delta_kz) < 1e-9 * g.k3);

  const double alpha = 3e-3;
  const auto seed = source::PlaneWaveComponent::make({0.0, alpha}, 1064e-9, 1.0);
  const auto m = phase_match(seed, g);
  CHECK(m.k2x == doctest::Approx(-g.k1 * std::sin(alpha)).epsilon(1e-12));
  CHECK(m.beta2 == doctest::Approx(-alpha).epsilon(1e-12));
  CHECK(m.k2x + seed.kx == 0.0);
  CHECK(m.k2y + seed.ky == 0.0);
  CHECK(std::hypot(m.k2x, m.k2y, m.k2z) == doctest::Approx(g.k2).epsilon(1e-14));

  const auto skew = source::PlaneWaveComponent::make({2e-3, -1e-3}, 1064e-9, 1.0);
  const auto ms = phase_match(skew, g);
  CHECK(ms.k2x + skew.kx == 0.0);
  CHECK(ms.k2y + skew.ky == 0.0);

  // Nondegenerate: the long idler cannot carry a steep seed's transverse momentum.
  const double l3 = 532e-9, l1 = 600e-9, l2 = 1.0 / (1.0 / l3 - 1.0 / l1);
  const auto nd = optics::ImagingGeometry::from_wavelengths(0.2, 0.15, l1, l2, l3);
  try {
    phase_match(source::PlaneWaveComponent::make({0.0, 0.2}, l1, 1.0), nd);
    FAIL("expected evanescent");
  } catch (const Error& e) {
    CHECK(std::string(e.what()) == "evanescent: unmatchable component");
  }
}

TEST_CASE("image shift formulas") {
  const auto g = geometry();
  PhaseMatch m;
  m.beta2 = 2e-3;
  const auto s = image_shift(m, g);
  CHECK(s.x == doctest::Approx(g.generated_image_distance() * std::sin(2e-3)));
  CHECK(s.y == 0.0);
  m.theta2 = -1e-3;
  m.beta2 = 0.5e-3;
  const auto t = image_shift(m, g);
  CHECK(t.y == doctest::Approx(0.125 * std::cos(0.5e-3) * std::sin(-1e-3)));
}

TEST_CASE("phase-matching weight") {
  CrystalConfig c;
  PhaseMatch m;
  CHECK(pm_weight(c, m) == 1.0);
  c.weight = PhaseMatchWeight::sinc;
  CHECK(pm_weight(c, m) == 1.0);
  m.delta_kz = 2.0 * std::numbers::pi / c.length;
  CHECK(pm_weight(c, m) == doctest::Approx(0.0).epsilon(1e-12));
  m.delta_kz = 1.0 / c.length;
  CHECK(pm_weight(c, m) == doctest::Approx(std::sin(0.5) / 0.5));
}

TEST_CASE("generate_shot_field") {
  const auto g = geometry();
  const auto u = pump();
  CrystalConfig c;
  const double gl = c.g_eff * c.length;
  const std::vector<source::Direction> one{{}};
  const auto comps = generate_shot_field(seed_of(one, {1.0}), u, c, g);
  REQUIRE(comps.size() == 1);
  CHECK(comps[0].coefficient == Complex(0.0, gl));
  for (std::size_t p = 0; p < u.amplitudes().size(); ++p) {
    CHECK(std::abs(comps[0].amplitude_map.amplitudes()[p] - Complex(0.0, gl) * u.amplitudes()[p]) < 1e-15);
  }
  CHECK(comps[0].amplitude_map.wavelength() == 1064e-9);

  const std::vector<source::Direction> dirs{{1e-3, 0.0}, {0.0, -2e-3}};
  const auto zero = generate_shot_field(seed_of(dirs, {0.0, 0.0}), u, c, g);
  for (const auto& comp : zero)
    for (const auto& v : comp.amplitude_map.amplitudes()) CHECK(v == Complex(0.0));

  const auto scaled = generate_shot_field(seed_of(dirs, {Complex(0.6, -0.8) * 1.5, 0.25}), u, c, g);
  CHECK(scaled[0].amplitude_map.energy() == doctest::Approx(2.25 * gl * gl * u.energy()).epsilon(1e-12));
  CHECK(scaled[1].amplitude_map.energy() == doctest::Approx(0.0625 * gl * gl * u.energy()).epsilon(1e-12));
}

TEST_CASE("single on-axis component images the object at unit magnification") {
  const auto g = geometry();
  const auto u = pump();
  const std::vector<source::Direction> one{{}};
  const auto comps = generate_shot_field(seed_of(one, {1.0}), u, CrystalConfig{}, g);
  const auto coh = image_plane_intensity(comps, g, Mode::coherent);
  const auto inc = image_plane_intensity(comps, g, Mode::incoherent);
  CHECK(coh.grid().pitch == doctest::Approx(kGrid.pitch).epsilon(1e-12));
  CHECK(relative_l2(coh.values(), inc.values()) < 1e-9);
  const auto truth = inverted_object();
  const IntensityMap truth_on_grid(coh.grid(), std::vector<double>(truth.values().begin(), truth.values().end()));
  CHECK(correlation::normalized_cross_correlation(coh.values(), truth_on_grid.values()) >= 0.99);
}

TEST_CASE("tilted components form shifted images at (x_2n, y_2n)") {
  const auto g = geometry();
  const auto u = pump();
  const auto truth = inverted_object();
  for (const auto& d : {source::Direction{1.5e-3, 0.0}, source::Direction{0.0, -2.5e-3}, source::Direction{-2e-3, 1e-3}}) {
    const std::vector<source::Direction> dirs{d};
    const auto comps = generate_shot_field(seed_of(dirs, {1.0}), u, CrystalConfig{}, g);
    const auto img = image_plane_intensity(comps, g, Mode::coherent);
    const IntensityMap ref(img.grid(), std::vector<double>(truth.values().begin(), truth.values().end()));
    const auto found = correlation::locate_image(img, ref);
    CHECK(std::abs(found.x - comps[0].shift.x / kGrid.pitch) <= 1.0);
    CHECK(std::abs(found.y - comps[0].shift.y / kGrid.pitch) <= 1.0);
    // Seed tilts mirror into the generated beam.
    CHECK(comps[0].shift.x * std::sin(d.beta) <= 0.0);
  }
}

TEST_CASE("image shifted off grid") {
  const auto g = geometry();
  const std::vector<source::Direction> far{{0.0, 6e-3}};
  const auto comps = generate_shot_field(seed_of(far, {1.0}), pump(), CrystalConfig{}, g);
  try {
    image_plane_intensity(comps, g, Mode::incoherent);
    FAIL("expected off-grid error");
  } catch (const Error& e) {
    CHECK(std::string(e.what()) == "image shifted off grid");
  }
}

TEST_CASE("basis matches the per-component pipeline and obeys the linearity chain") {
  const auto g = geometry();
  const auto u = pump();
  source::SourceConfig sc;
  sc.components = 6;
  const auto dirs = source::fix_component_directions(sc);
  const ImagePlaneBasis basis(dirs, 1064e-9, u, CrystalConfig{}, g);
  const auto seed = source::draw_shot_amplitudes(dirs, sc, 4);

  for (Mode mode : {Mode::coherent, Mode::incoherent}) {
    const auto direct = image_plane_intensity(generate_shot_field(seed, u, CrystalConfig{}, g), g, mode);
    const auto fast = basis.intensity(seed, mode);
    CHECK(relative_l2(fast.values(), direct.values()) < 1e-9);
  }

  const Complex gamma(0.3, -1.7);
  auto scaled = seed;
  for (auto& c : scaled.components) c.amplitude *= gamma;
  const auto a = basis.intensity(seed, Mode::coherent);
  const auto b = basis.intensity(scaled, Mode::coherent);
  std::vector<double> expect(a.values().begin(), a.values().end());
  for (double& v : expect) v *= std::norm(gamma);
  CHECK(relative_l2(b.values(), expect) < 1e-12);

  auto rephased = seed;
  for (std::size_t n = 0; n < rephased.components.size(); ++n) {
    rephased.components[n].amplitude *= std::polar(1.0, 0.9 * static_cast<double>(n) + 0.1);
  }
  const auto i1 = basis.intensity(seed, Mode::incoherent);
  const auto i2 = basis.intensity(rephased, Mode::incoherent);
  CHECK(relative_l2(i2.values(), i1.values()) < 1e-12);
  CHECK(relative_l2(basis.intensity(rephased, Mode::coherent).values(), a.values()) > 1e-3);
  CHECK(relative_l2(a.values(), i1.values()) > 1e-3);
}

TEST_CASE("exact gain matches the linear mode at low gain") {
  const auto g = geometry();
  const auto u = pump();
  CrystalConfig lin;
  lin.g_eff = 1e-3;
  CrystalConfig ex = lin;
  ex.exact_gain = true;
  const std::vector<source::Direction> one{{}};
  const ImagePlaneBasis bl(one, 1064e-9, u, lin, g);
  const ImagePlaneBasis be(one, 1064e-9, u, ex, g);
  const auto seed = seed_of(one, {Complex(0.4, 0.1)});
  CHECK(relative_l2(be.intensity(seed, Mode::coherent).values(), bl.intensity(seed, Mode::coherent).values()) < 1e-6);
}

TEST_CASE("ensemble mean of coherent mode equals the incoherent formula (N = 2)") {
  const auto g = geometry();
  const auto u = pump();
  const std::vector<source::Direction> dirs{{1e-3, 1.5e-3}, {-2e-3, -0.5e-3}};
  const ImagePlaneBasis basis(dirs, 1064e-9, u, CrystalConfig{}, g);
  const auto& grid = basis.grid();
  std::vector<double> mean(grid.size(), 0.0), out(grid.size());
  std::vector<Complex> scratch(grid.size());
  const int shots = 2000;
  for (int m = 0; m < shots; ++m) {
    CounterRng rng(99, 0, static_cast<std::uint64_t>(m));
    const std::vector<Complex> amps{std::polar(1.0, 2.0 * std::numbers::pi * rng.uniform()),
                                    std::polar(1.0, 2.0 * std::numbers::pi * rng.uniform())};
    basis.intensity_into(amps, Mode::coherent, out, scratch);
    for (std::size_t p = 0; p < out.size(); ++p) mean[p] += out[p] / shots;
  }
  const auto inc = basis.intensity(seed_of(dirs, {1.0, 1.0}), Mode::incoherent);
  CHECK(relative_l2(mean, inc.values()) < 0.05);
}
