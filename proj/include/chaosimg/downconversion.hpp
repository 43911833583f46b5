#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "chaosimg/field.hpp"
#include "chaosimg/optics.hpp"
#include "chaosimg/source.hpp"

namespace chaosimg::downconversion {

/// Angular gain weight standing in for the crystal's f(theta, beta).
enum class PhaseMatchWeight {
  uniform,  // 1 everywhere in the paraxial cone
  sinc,     // |sinc(delta_kz L / 2)|
};

struct CrystalConfig {
  double length = 4e-3;  // L [m]
  double g_eff = 25.0;   // coupling [1/(m * amplitude)]; g_eff * L = 0.1
  PhaseMatchWeight weight = PhaseMatchWeight::uniform;
  bool exact_gain = false;  // sinh gain instead of its linearization

  void validate() const;
};

/// Generated-wave direction fixed by k3 = k1 + k2 with k3 on the z axis.
struct PhaseMatch {
  double theta2 = 0.0;
  double beta2 = 0.0;
  double k2x = 0.0, k2y = 0.0, k2z = 0.0;
  double delta_kz = 0.0;  // k3 - k1z - k2z, diagnostic
};

/// Transverse momentum is conserved exactly (k2 transverse = -k1 transverse)
/// and |k2| = 2 pi / lambda_2. Throws "evanescent: unmatchable component"
/// when the seed's transverse wavevector exceeds min(k1, k2).
PhaseMatch phase_match(const source::PlaneWaveComponent& seed_component, const optics::ImagingGeometry& geometry);

/// Value of the phase-matching weight for one matched component, in [0, 1].
double pm_weight(const CrystalConfig& crystal, const PhaseMatch& match);

/// Low-gain parametric amplitude at the crystal exit:
///   linear: i g L w conj(a1) a3
///   exact:  i conj(a1) (a3 / |a3|) sinh(g L w |a3|), and 0 when a3 = 0.
Complex mix_low_gain(Complex seed_amplitude, Complex pump_amplitude, const CrystalConfig& crystal, double weight);

struct ImageShift {
  double x = 0.0;
  double y = 0.0;
};

/// (x_2n, y_2n) = s2 (sin beta2, cos beta2 sin theta2), s2 = (k2/k3) d.
ImageShift image_shift(const PhaseMatch& match, const optics::ImagingGeometry& geometry);

/// One component's generated field on the crystal exit face. The plane-wave
/// carrier is not sampled into `amplitude_map`; it is applied analytically as
/// the image shift when the component is carried to the image plane.
struct GeneratedComponent {
  std::size_t index = 0;
  Complex seed_amplitude;
  ComplexField amplitude_map;  // envelope at lambda_2 on the pump grid
  PhaseMatch match;
  ImageShift shift;
  Complex coefficient;  // c_n = i g L w_n
  double weight = 1.0;
};

std::vector<GeneratedComponent> generate_shot_field(const source::ChaoticSeed& seed, const ComplexField& pump,
                                                    const CrystalConfig& crystal,
                                                    const optics::ImagingGeometry& geometry);

/// Field of one component on the plane z = s2, on the object-plane grid.
/// Throws "image shifted off grid" when the shift exceeds half the grid.
ComplexField image_plane_field(const GeneratedComponent& component, const optics::ImagingGeometry& geometry);

enum class Mode { coherent, incoherent };

/// coherent: |sum_n E_n|^2; incoherent: sum_n |E_n|^2 (no cross terms).
IntensityMap image_plane_intensity(std::span<const GeneratedComponent> components,
                                   const optics::ImagingGeometry& geometry, Mode mode);

/// Image-plane fields of every component for a unit seed amplitude. The
/// generated amplitude is linear in conj(a1) in both gain modes, so one shot's
/// image-plane field is sum_n conj(a_n) T_n; this is the shot-loop fast path.
class ImagePlaneBasis {
 public:
  ImagePlaneBasis(std::span<const source::Direction> directions, double seed_wavelength, const ComplexField& pump,
                  const CrystalConfig& crystal, const optics::ImagingGeometry& geometry);

  const GridSpec& grid() const { return grid_; }
  std::size_t size() const { return templates_.size(); }
  std::span<const Complex> field_template(std::size_t n) const { return templates_[n]; }
  const std::vector<GeneratedComponent>& components() const { return components_; }

  /// Writes the image-plane intensity for the given seed amplitudes into
  /// `out` (grid().size() values). `scratch` must hold grid().size() values.
  void intensity_into(std::span<const Complex> seed_amplitudes, Mode mode, std::span<double> out,
                      std::span<Complex> scratch) const;

  IntensityMap intensity(const source::ChaoticSeed& seed, Mode mode) const;

 private:
  GridSpec grid_;
  std::vector<GeneratedComponent> components_;
  std::vector<std::vector<Complex>> templates_;
  std::vector<std::vector<double>> template_power_;
};

}  // namespace chaosimg::downconversion
