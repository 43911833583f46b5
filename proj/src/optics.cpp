#include "chaosimg/optics.hpp"

#include <cmath>
#include <numbers>

#include "chaosimg/error.hpp"
#include "chaosimg/fft.hpp"

namespace chaosimg::optics {
namespace {

constexpr double kPi = std::numbers::pi;

template <typename T>
std::vector<T> inverted(std::span<const T> in, const GridSpec& grid) {
  std::vector<T> out(in.size());
  for (int iy = 0; iy < grid.ny; ++iy) {
    const int sy = (grid.ny - iy) % grid.ny;
    for (int ix = 0; ix < grid.nx; ++ix) {
      const int sx = (grid.nx - ix) % grid.nx;
      out[grid.index(ix, iy)] = in[grid.index(sx, sy)];
    }
  }
  return out;
}

}  // namespace

ImagingGeometry ImagingGeometry::from_wavelengths(double focal_length, double lens_to_crystal, double lambda1,
                                                  double lambda2, double lambda3) {
  if (!(lambda1 > 0.0 && lambda2 > 0.0 && lambda3 > 0.0)) throw Error("invalid geometry: wavelengths must be positive");
  ImagingGeometry g{focal_length, lens_to_crystal, 2.0 * kPi / lambda1, 2.0 * kPi / lambda2, 2.0 * kPi / lambda3};
  g.validate();
  return g;
}

void ImagingGeometry::validate() const {
  if (!(focal_length > 0.0) || !(lens_to_crystal > 0.0) || !(image_distance() > 0.0)) {
    throw Error("invalid geometry: require 0 < d_F < 2f");
  }
  if (!(k1 > 0.0 && k2 > 0.0 && k3 > 0.0)) throw Error("invalid geometry: wavenumbers must be positive");
}

ComplexField propagate_free(const ComplexField& field, double distance, std::optional<double> content_angle) {
  const GridSpec& grid = field.grid();
  const double k = field.wavenumber();
  if (content_angle) {
    const double q_max = k * std::sin(std::abs(*content_angle));
    if (q_max > kPi / grid.pitch) throw Error("aliasing: maximum transverse frequency exceeds grid Nyquist");
  }
  ComplexField out = field;
  if (distance == 0.0) return out;

  auto data = out.amplitudes();
  fft::transform(data, grid.nx, grid.ny, fft::Sign::negative);
  const auto qx = fft::angular_frequencies(grid.nx, grid.pitch);
  const auto qy = fft::angular_frequencies(grid.ny, grid.pitch);
  const double scale = distance / (2.0 * k);
  const double norm = 1.0 / static_cast<double>(grid.size());
  for (int iy = 0; iy < grid.ny; ++iy) {
    const double qy2 = qy[static_cast<std::size_t>(iy)] * qy[static_cast<std::size_t>(iy)];
    for (int ix = 0; ix < grid.nx; ++ix) {
      const double q2 = qx[static_cast<std::size_t>(ix)] * qx[static_cast<std::size_t>(ix)] + qy2;
      data[grid.index(ix, iy)] *= std::polar(norm, q2 * scale);
    }
  }
  fft::transform(data, grid.nx, grid.ny, fft::Sign::positive);
  return out;
}

GridSpec fresnel_output_grid(const GridSpec& input, double wavelength, double distance) {
  input.validate();
  if (!input.square()) throw Error("fresnel transform requires a square grid");
  if (distance == 0.0) throw Error("fresnel transform requires a nonzero distance");
  return GridSpec{input.nx, input.ny, wavelength * std::abs(distance) / (input.nx * input.pitch)};
}

ComplexField fresnel_transform(const ComplexField& field, double distance) {
  const GridSpec out_grid = fresnel_output_grid(field.grid(), field.wavelength(), distance);
  const double k = field.wavenumber();

  ComplexField work = field;
  apply_quadratic_phase(work, -k / (2.0 * distance));
  fft::centered_transform(work.amplitudes(), out_grid.nx, out_grid.ny,
                          distance > 0.0 ? fft::Sign::positive : fft::Sign::negative);

  const Complex prefactor = Complex(0.0, k / (2.0 * kPi * distance)) * field.grid().pitch * field.grid().pitch;
  ComplexField out(out_grid, field.wavelength(),
                   std::vector<Complex>(work.amplitudes().begin(), work.amplitudes().end()));
  for (auto& a : out.amplitudes()) a *= prefactor;
  apply_quadratic_phase(out, -k / (2.0 * distance));
  return out;
}

ComplexField image_pump_2f2f(const ComplexField& object, const ImagingGeometry& geometry) {
  geometry.validate();
  const GridSpec& in_grid = object.grid();
  if (!in_grid.square()) throw Error("invalid geometry: pump imaging requires a square object grid");
  const double k3 = geometry.k3;
  if (std::abs(object.wavenumber() - k3) > 1e-9 * k3) {
    throw Error("invalid geometry: object wavelength does not match the pump wavelength");
  }
  const double f = geometry.focal_length;
  const double d = geometry.image_distance();
  const double d_f = geometry.lens_to_crystal;

  ComplexField work = object;
  apply_quadratic_phase(work, k3 * (d_f - f) / (2.0 * d * f));
  fft::centered_transform(work.amplitudes(), in_grid.nx, in_grid.ny, fft::Sign::positive);

  const GridSpec out_grid{in_grid.nx, in_grid.ny, 2.0 * kPi * d / (k3 * in_grid.nx * in_grid.pitch)};
  const Complex prefactor = k3 / (2.0 * kPi * Complex(0.0, 1.0) * d) * in_grid.pitch * in_grid.pitch;
  ComplexField out(out_grid, object.wavelength(),
                   std::vector<Complex>(work.amplitudes().begin(), work.amplitudes().end()));
  for (auto& a : out.amplitudes()) a *= prefactor;
  apply_quadratic_phase(out, k3 / (2.0 * d));
  return out;
}

IntensityMap intensity(const ComplexField& field) {
  std::vector<double> values(field.grid().size());
  const auto amps = field.amplitudes();
  for (std::size_t i = 0; i < values.size(); ++i) values[i] = std::norm(amps[i]);
  return IntensityMap(field.grid(), std::move(values));
}

void apply_quadratic_phase(ComplexField& field, double coefficient) {
  if (coefficient == 0.0) return;
  const GridSpec& grid = field.grid();
  auto data = field.amplitudes();
  for (int iy = 0; iy < grid.ny; ++iy) {
    const double y = grid.y(iy);
    for (int ix = 0; ix < grid.nx; ++ix) {
      const double x = grid.x(ix);
      data[grid.index(ix, iy)] *= std::polar(1.0, coefficient * (x * x + y * y));
    }
  }
}

ComplexField invert_through_origin(const ComplexField& field) {
  return ComplexField(field.grid(), field.wavelength(), inverted<Complex>(field.amplitudes(), field.grid()));
}

IntensityMap invert_through_origin(const IntensityMap& map) {
  return IntensityMap(map.grid(), inverted<double>(map.values(), map.grid()));
}

ComplexField translate(const ComplexField& field, double dx, double dy) {
  ComplexField out = field;
  fft::translate(out.amplitudes(), out.grid(), dx, dy);
  return out;
}

}  // namespace chaosimg::optics
