#pragma once

#include <optional>

#include "chaosimg/field.hpp"

namespace chaosimg::optics {

// Sign convention: plane waves are exp(-i k.r), so paraxial free-space
// propagation over z multiplies the angular spectrum by exp(+i q^2 z / 2k)
// and a converging wavefront carries exp(+i k r^2 / 2z).

/// Pump imaging lens plus crystal placement. The lens of focal length f sits
/// d_F before the crystal entrance and images the object d = 2f - d_F beyond
/// it. The generated field re-forms the image at s2 = (k2/k3) d.
struct ImagingGeometry {
  double focal_length = 0.0;      // f [m]
  double lens_to_crystal = 0.0;   // d_F [m]
  double k1 = 0.0, k2 = 0.0, k3 = 0.0;  // rad/m

  static ImagingGeometry from_wavelengths(double focal_length, double lens_to_crystal, double lambda1,
                                          double lambda2, double lambda3);

  double image_distance() const { return 2.0 * focal_length - lens_to_crystal; }
  double generated_image_distance() const { return k2 / k3 * image_distance(); }

  /// Throws "invalid geometry" unless 0 < d_F < 2f and all k > 0.
  void validate() const;
};

/// Angular-spectrum paraxial propagation on the input grid. `content_angle`
/// declares the largest propagation angle the field is meant to carry; if the
/// grid cannot sample it the call fails with an aliasing error.
ComplexField propagate_free(const ComplexField& field, double distance,
                            std::optional<double> content_angle = std::nullopt);

/// Output grid of fresnel_transform: pitch = lambda |z| / (n pitch_in).
GridSpec fresnel_output_grid(const GridSpec& input, double wavelength, double distance);

/// Single-FFT Fresnel diffraction integral. The output lives on the rescaled
/// grid given by fresnel_output_grid; use this where the field converges to a
/// focus far smaller than the input sampling window.
ComplexField fresnel_transform(const ComplexField& field, double distance);

/// Pump field on the crystal entrance face produced by the 2f-2f lens from
/// the object amplitude, evaluated as one centered DFT between two quadratic
/// phase masks. Output pitch is 2 pi d / (k3 n pitch_O).
ComplexField image_pump_2f2f(const ComplexField& object, const ImagingGeometry& geometry);

/// Element-wise |amplitude|^2.
IntensityMap intensity(const ComplexField& field);

/// Multiply by exp(i * coefficient * (x^2 + y^2)).
void apply_quadratic_phase(ComplexField& field, double coefficient);

/// f(x, y) -> f(-x, -y) about the grid origin (periodic).
ComplexField invert_through_origin(const ComplexField& field);
IntensityMap invert_through_origin(const IntensityMap& map);

/// Field translated by (dx, dy) meters via the Fourier shift theorem.
ComplexField translate(const ComplexField& field, double dx, double dy);

}  // namespace chaosimg::optics
