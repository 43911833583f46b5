#pragma once

#include <complex>
#include <cstddef>
#include <span>
#include <vector>

namespace chaosimg {

using Complex = std::complex<double>;

/// Uniform transverse sampling grid. Sample (nx/2, ny/2) sits at x = y = 0;
/// storage is row-major with x varying fastest.
struct GridSpec {
  int nx = 0;
  int ny = 0;
  double pitch = 0.0;  // meters per sample, square pixels

  /// Throws chaosimg::Error unless nx, ny >= 2 and even and pitch > 0.
  void validate() const;

  std::size_t size() const { return static_cast<std::size_t>(nx) * static_cast<std::size_t>(ny); }
  std::size_t index(int ix, int iy) const {
    return static_cast<std::size_t>(iy) * static_cast<std::size_t>(nx) + static_cast<std::size_t>(ix);
  }
  double x(int ix) const { return (ix - nx / 2) * pitch; }
  double y(int iy) const { return (iy - ny / 2) * pitch; }
  double extent_x() const { return nx * pitch; }
  double extent_y() const { return ny * pitch; }
  bool square() const { return nx == ny; }

  bool operator==(const GridSpec&) const = default;
};

/// Sampled complex amplitude of a monochromatic scalar field.
class ComplexField {
 public:
  ComplexField(GridSpec grid, double wavelength);
  ComplexField(GridSpec grid, double wavelength, std::vector<Complex> amplitudes);

  const GridSpec& grid() const { return grid_; }
  double wavelength() const { return wavelength_; }
  double wavenumber() const;

  std::span<Complex> amplitudes() { return amplitudes_; }
  std::span<const Complex> amplitudes() const { return amplitudes_; }
  Complex& at(int ix, int iy) { return amplitudes_[grid_.index(ix, iy)]; }
  const Complex& at(int ix, int iy) const { return amplitudes_[grid_.index(ix, iy)]; }

  /// Sum of |amplitude|^2 * pitch^2.
  double energy() const;

 private:
  GridSpec grid_;
  double wavelength_;
  std::vector<Complex> amplitudes_;
};

/// Nonnegative real map on a grid (intensities, masks, correlation maps).
/// Correlation maps may hold negative estimator noise.
class IntensityMap {
 public:
  IntensityMap() = default;
  explicit IntensityMap(GridSpec grid, double fill = 0.0);
  IntensityMap(GridSpec grid, std::vector<double> values);

  const GridSpec& grid() const { return grid_; }
  std::span<double> values() { return values_; }
  std::span<const double> values() const { return values_; }
  double& at(int ix, int iy) { return values_[grid_.index(ix, iy)]; }
  double at(int ix, int iy) const { return values_[grid_.index(ix, iy)]; }
  bool empty() const { return values_.empty(); }

  double sum() const;
  double max() const;
  double min() const;

 private:
  GridSpec grid_;
  std::vector<double> values_;
};

/// Relative L2 distance ||a - b|| / ||b||.
double relative_l2(std::span<const double> a, std::span<const double> b);
double relative_l2(std::span<const Complex> a, std::span<const Complex> b);

}  // namespace chaosimg
