#include "chaosimg/field.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "chaosimg/error.hpp"

namespace chaosimg {

void GridSpec::validate() const {
  if (nx < 2 || ny < 2 || nx % 2 != 0 || ny % 2 != 0) {
    throw Error("invalid grid: nx and ny must be even and >= 2 (got " + std::to_string(nx) + "x" +
                std::to_string(ny) + ")");
  }
  if (!(pitch > 0.0) || !std::isfinite(pitch)) throw Error("invalid grid: pitch must be positive");
}

ComplexField::ComplexField(GridSpec grid, double wavelength)
    : ComplexField(grid, wavelength, std::vector<Complex>(grid.size())) {}

ComplexField::ComplexField(GridSpec grid, double wavelength, std::vector<Complex> amplitudes)
    : grid_(grid), wavelength_(wavelength), amplitudes_(std::move(amplitudes)) {
  grid_.validate();
  if (!(wavelength_ > 0.0) || !std::isfinite(wavelength_)) throw Error("invalid field: wavelength must be positive");
  if (amplitudes_.size() != grid_.size()) throw Error("invalid field: amplitude count does not match grid");
}

double ComplexField::wavenumber() const { return 2.0 * std::numbers::pi / wavelength_; }

double ComplexField::energy() const {
  double total = 0.0;
  for (const auto& a : amplitudes_) total += std::norm(a);
  return total * grid_.pitch * grid_.pitch;
}

IntensityMap::IntensityMap(GridSpec grid, double fill) : grid_(grid), values_(grid.size(), fill) {
  grid_.validate();
}

IntensityMap::IntensityMap(GridSpec grid, std::vector<double> values) : grid_(grid), values_(std::move(values)) {
  grid_.validate();
  if (values_.size() != grid_.size()) throw Error("invalid map: value count does not match grid");
}

double IntensityMap::sum() const {
  double total = 0.0;
  for (double v : values_) total += v;
  return total;
}

double IntensityMap::max() const { return values_.empty() ? 0.0 : *std::max_element(values_.begin(), values_.end()); }
double IntensityMap::min() const { return values_.empty() ? 0.0 : *std::min_element(values_.begin(), values_.end()); }

double relative_l2(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) throw Error("relative_l2: size mismatch");
  double num = 0.0, den = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    num += (a[i] - b[i]) * (a[i] - b[i]);
    den += b[i] * b[i];
  }
  return den > 0.0 ? std::sqrt(num / den) : std::sqrt(num);
}

double relative_l2(std::span<const Complex> a, std::span<const Complex> b) {
  if (a.size() != b.size()) throw Error("relative_l2: size mismatch");
  double num = 0.0, den = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    num += std::norm(a[i] - b[i]);
    den += std::norm(b[i]);
  }
  return den > 0.0 ? std::sqrt(num / den) : std::sqrt(num);
}

}  // namespace chaosimg
