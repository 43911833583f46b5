#include "chaosimg/downconversion.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "chaosimg/error.hpp"

namespace chaosimg::downconversion {

void CrystalConfig::validate() const {
  if (!(length > 0.0)) throw Error("invalid crystal: L must be positive");
  if (!(g_eff >= 0.0)) throw Error("invalid crystal: g_eff must be nonnegative");
}

PhaseMatch phase_match(const source::PlaneWaveComponent& seed_component, const optics::ImagingGeometry& geometry) {
  const double k1 = geometry.k1;
  const double k2 = geometry.k2;
  const double k1_perp = seed_component.transverse();
  if (k1_perp > std::min(k1, k2)) throw Error("evanescent: unmatchable component");

  PhaseMatch m;
  m.k2x = -seed_component.kx;
  m.k2y = -seed_component.ky;
  m.k2z = std::sqrt(k2 * k2 - (m.k2x * m.k2x + m.k2y * m.k2y));
  const double k1z = std::sqrt(k1 * k1 - k1_perp * k1_perp);
  m.delta_kz = geometry.k3 - k1z - m.k2z;
  m.beta2 = std::asin(m.k2x / k2);
  m.theta2 = std::asin(m.k2y / (k2 * std::cos(m.beta2)));
  return m;
}

double pm_weight(const CrystalConfig& crystal, const PhaseMatch& match) {
  switch (crystal.weight) {
    case PhaseMatchWeight::uniform:
      return 1.0;
    case PhaseMatchWeight::sinc: {
      const double x = 0.5 * match.delta_kz * crystal.length;
      return x == 0.0 ? 1.0 : std::abs(std::sin(x) / x);
    }
  }
  return 1.0;
}

Complex mix_low_gain(Complex seed_amplitude, Complex pump_amplitude, const CrystalConfig& crystal, double weight) {
  constexpr Complex i{0.0, 1.0};
  const double gl = crystal.g_eff * crystal.length;
  if (!crystal.exact_gain) return i * gl * weight * std::conj(seed_amplitude) * pump_amplitude;
  const double pump_mag = std::abs(pump_amplitude);
  if (pump_mag == 0.0) return 0.0;
  return i * std::conj(seed_amplitude) * (pump_amplitude / pump_mag) * std::sinh(gl * weight * pump_mag);
}

ImageShift image_shift(const PhaseMatch& match, const optics::ImagingGeometry& geometry) {
  const double s2 = geometry.generated_image_distance();
  return {s2 * std::sin(match.beta2), s2 * std::cos(match.beta2) * std::sin(match.theta2)};
}

std::vector<GeneratedComponent> generate_shot_field(const source::ChaoticSeed& seed, const ComplexField& pump,
                                                    const CrystalConfig& crystal,
                                                    const optics::ImagingGeometry& geometry) {
  crystal.validate();
  geometry.validate();
  if (std::abs(pump.wavenumber() - geometry.k3) > 1e-9 * geometry.k3) {
    throw Error("pump wavelength does not match the imaging geometry");
  }
  const double lambda2 = 2.0 * std::numbers::pi / geometry.k2;
  const auto pump_amps = pump.amplitudes();

  std::vector<GeneratedComponent> out;
  out.reserve(seed.components.size());
  for (std::size_t n = 0; n < seed.components.size(); ++n) {
    const auto& c = seed.components[n];
    GeneratedComponent g{n, c.amplitude, ComplexField(pump.grid(), lambda2), phase_match(c, geometry), {}, {}, 1.0};
    g.weight = pm_weight(crystal, g.match);
    g.shift = image_shift(g.match, geometry);
    g.coefficient = Complex(0.0, crystal.g_eff * crystal.length * g.weight);
    auto map = g.amplitude_map.amplitudes();
    for (std::size_t p = 0; p < map.size(); ++p) map[p] = mix_low_gain(c.amplitude, pump_amps[p], crystal, g.weight);
    out.push_back(std::move(g));
  }
  return out;
}

ComplexField image_plane_field(const GeneratedComponent& component, const optics::ImagingGeometry& geometry) {
  const double s2 = geometry.generated_image_distance();
  ComplexField field = optics::fresnel_transform(component.amplitude_map, s2);
  const GridSpec& grid = field.grid();
  if (std::abs(component.shift.x) > 0.5 * grid.extent_x() || std::abs(component.shift.y) > 0.5 * grid.extent_y()) {
    throw Error("image shifted off grid");
  }
  // The Fresnel output carries the common curvature exp(-i k2 r^2 / 2 s2).
  // Strip it, move the image, restore it.
  const double curvature = field.wavenumber() / (2.0 * s2);
  optics::apply_quadratic_phase(field, curvature);
  field = optics::translate(field, component.shift.x, component.shift.y);
  optics::apply_quadratic_phase(field, -curvature);
  return field;
}

IntensityMap image_plane_intensity(std::span<const GeneratedComponent> components,
                                   const optics::ImagingGeometry& geometry, Mode mode) {
  if (components.empty()) throw Error("image_plane_intensity: no components");
  std::vector<Complex> sum;
  std::vector<double> power;
  GridSpec grid;
  for (const auto& c : components) {
    const ComplexField f = image_plane_field(c, geometry);
    if (sum.empty()) {
      grid = f.grid();
      sum.assign(grid.size(), Complex{});
      power.assign(grid.size(), 0.0);
    }
    const auto a = f.amplitudes();
    for (std::size_t p = 0; p < a.size(); ++p) {
      sum[p] += a[p];
      power[p] += std::norm(a[p]);
    }
  }
  if (mode == Mode::coherent) {
    for (std::size_t p = 0; p < sum.size(); ++p) power[p] = std::norm(sum[p]);
  }
  return IntensityMap(grid, std::move(power));
}

ImagePlaneBasis::ImagePlaneBasis(std::span<const source::Direction> directions, double seed_wavelength,
                                 const ComplexField& pump, const CrystalConfig& crystal,
                                 const optics::ImagingGeometry& geometry) {
  source::ChaoticSeed unit;
  unit.wavelength = seed_wavelength;
  for (const auto& d : directions) unit.components.push_back(source::PlaneWaveComponent::make(d, seed_wavelength, 1.0));
  components_ = generate_shot_field(unit, pump, crystal, geometry);
  for (const auto& c : components_) {
    ComplexField f = image_plane_field(c, geometry);
    grid_ = f.grid();
    templates_.emplace_back(f.amplitudes().begin(), f.amplitudes().end());
    std::vector<double> p(grid_.size());
    for (std::size_t i = 0; i < p.size(); ++i) p[i] = std::norm(templates_.back()[i]);
    template_power_.push_back(std::move(p));
  }
}

void ImagePlaneBasis::intensity_into(std::span<const Complex> seed_amplitudes, Mode mode, std::span<double> out,
                                     std::span<Complex> scratch) const {
  if (seed_amplitudes.size() != templates_.size()) throw Error("basis: seed component count mismatch");
  const std::size_t n_pix = grid_.size();
  if (out.size() != n_pix || scratch.size() != n_pix) throw Error("basis: output buffer size mismatch");

  if (mode == Mode::incoherent) {
    std::fill(out.begin(), out.end(), 0.0);
    for (std::size_t n = 0; n < templates_.size(); ++n) {
      const double w = std::norm(seed_amplitudes[n]);
      const auto& p = template_power_[n];
      for (std::size_t i = 0; i < n_pix; ++i) out[i] += w * p[i];
    }
    return;
  }
  std::fill(scratch.begin(), scratch.end(), Complex{});
  for (std::size_t n = 0; n < templates_.size(); ++n) {
    const Complex w = std::conj(seed_amplitudes[n]);
    const auto& t = templates_[n];
    for (std::size_t i = 0; i < n_pix; ++i) scratch[i] += w * t[i];
  }
  for (std::size_t i = 0; i < n_pix; ++i) out[i] = std::norm(scratch[i]);
}

IntensityMap ImagePlaneBasis::intensity(const source::ChaoticSeed& seed, Mode mode) const {
  std::vector<Complex> amps;
  amps.reserve(seed.components.size());
  for (const auto& c : seed.components) amps.push_back(c.amplitude);
  IntensityMap map(grid_);
  std::vector<Complex> scratch(grid_.size());
  intensity_into(amps, mode, map.values(), scratch);
  return map;
}

}  // namespace chaosimg::downconversion
