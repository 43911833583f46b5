#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "chaosimg/field.hpp"

namespace chaosimg::correlation {

/// One shot: reference intensities I_1n and the generated intensity map I_2.
struct ShotRecord {
  std::uint64_t shot_index = 0;
  std::vector<double> reference;
  IntensityMap intensity_map;
};

/// Neumaier-compensated running sum.
class CompensatedSum {
 public:
  void add(double x);
  void merge(const CompensatedSum& other);
  double value() const { return sum_ + compensation_; }

 private:
  double sum_ = 0.0;
  double compensation_ = 0.0;
};

/// Running moments for G(I_1j, I_2) = <I_1j I_2> - <I_1j><I_2>. Accumulators
/// over disjoint shot sets merge into the accumulator of their union.
class CorrelationAccumulator {
 public:
  CorrelationAccumulator(GridSpec grid, std::size_t reference_index);

  void accumulate(const ShotRecord& shot);
  void accumulate(double reference, std::span<const double> map);
  void merge(const CorrelationAccumulator& other);

  const GridSpec& grid() const { return grid_; }
  std::size_t reference_index() const { return reference_index_; }
  std::uint64_t shot_count() const { return shots_; }
  double sum_reference() const { return sum_ref_.value(); }
  double sum_reference_sq() const { return sum_ref_sq_.value(); }
  double sum_map(std::size_t pixel) const { return sum_map_[pixel].value(); }
  double sum_product(std::size_t pixel) const { return sum_product_[pixel].value(); }

 private:
  GridSpec grid_;
  std::size_t reference_index_;
  std::uint64_t shots_ = 0;
  CompensatedSum sum_ref_;
  CompensatedSum sum_ref_sq_;
  std::vector<CompensatedSum> sum_map_;
  std::vector<CompensatedSum> sum_product_;
};

struct CorrelationResult {
  std::uint64_t shots = 0;
  IntensityMap g;           // unbiased sample covariance, may be negative
  IntensityMap mean_i2;
  double mean_reference = 0.0;
  double sigma2_reference = 0.0;
  IntensityMap normalized;  // g / sigma2_reference, zero when degenerate
  bool degenerate = false;  // sigma2_reference == 0
};

/// Requires at least two shots ("insufficient shots").
CorrelationResult finalize(const CorrelationAccumulator& acc);

struct CovarianceCheck {
  double covariance = 0.0;  // sample cov(I_1j, I_1n)
  double sigma2 = 0.0;      // sample var(I_1n)
  double ratio = 0.0;       // covariance / sigma2, NaN if sigma2 == 0
};

/// Sample covariance of two reference series across shots. `references[m]`
/// holds shot m's I_1 values.
CovarianceCheck covariance_identity_check(std::span<const std::vector<double>> references, std::size_t j,
                                          std::size_t n, std::size_t min_shots = 100);
CovarianceCheck covariance_identity_check(std::span<const ShotRecord> shots, std::size_t j, std::size_t n,
                                          std::size_t min_shots = 100);

struct ImageMetrics {
  double ncc = 0.0;
  double contrast = 0.0;
  double background_rms = 0.0;
};

/// Compares a recovered map with a reference intensity image moved to the
/// expected shift (meters). The reference amplitude sqrt(I) is translated in
/// the Fourier domain, matching how the simulator forms shifted images.
/// In-hole pixels are those above half the shifted reference's peak.
ImageMetrics image_metrics(const IntensityMap& recovered, const IntensityMap& reference, double shift_x,
                           double shift_y);

double normalized_cross_correlation(std::span<const double> a, std::span<const double> b);

struct PixelShift {
  int x = 0;
  int y = 0;
};

/// Integer translation of `reference` that best matches `map` (peak of the
/// circular cross-correlation), wrapped into [-n/2, n/2).
PixelShift locate_image(const IntensityMap& map, const IntensityMap& reference);

}  // namespace chaosimg::correlation
