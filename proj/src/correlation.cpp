#include "chaosimg/correlation.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "chaosimg/error.hpp"
#include "chaosimg/fft.hpp"

namespace chaosimg::correlation {

void CompensatedSum::add(double x) {
  const double t = sum_ + x;
  if (std::abs(sum_) >= std::abs(x)) {
    compensation_ += (sum_ - t) + x;
  } else {
    compensation_ += (x - t) + sum_;
  }
  sum_ = t;
}

void CompensatedSum::merge(const CompensatedSum& other) {
  add(other.sum_);
  add(other.compensation_);
}

CorrelationAccumulator::CorrelationAccumulator(GridSpec grid, std::size_t reference_index)
    : grid_(grid), reference_index_(reference_index), sum_map_(grid.size()), sum_product_(grid.size()) {
  grid_.validate();
}

void CorrelationAccumulator::accumulate(const ShotRecord& shot) {
  if (!(shot.intensity_map.grid() == grid_)) throw Error("correlation: shot grid does not match accumulator grid");
  if (reference_index_ >= shot.reference.size()) throw Error("correlation: reference index out of range");
  accumulate(shot.reference[reference_index_], shot.intensity_map.values());
}

void CorrelationAccumulator::accumulate(double reference, std::span<const double> map) {
  if (map.size() != grid_.size()) throw Error("correlation: shot grid does not match accumulator grid");
  ++shots_;
  sum_ref_.add(reference);
  sum_ref_sq_.add(reference * reference);
  for (std::size_t p = 0; p < map.size(); ++p) {
    sum_map_[p].add(map[p]);
    sum_product_[p].add(reference * map[p]);
  }
}

void CorrelationAccumulator::merge(const CorrelationAccumulator& other) {
  if (!(other.grid_ == grid_) || other.reference_index_ != reference_index_) {
    throw Error("correlation: cannot merge accumulators with different grids or reference index");
  }
  shots_ += other.shots_;
  sum_ref_.merge(other.sum_ref_);
  sum_ref_sq_.merge(other.sum_ref_sq_);
  for (std::size_t p = 0; p < sum_map_.size(); ++p) {
    sum_map_[p].merge(other.sum_map_[p]);
    sum_product_[p].merge(other.sum_product_[p]);
  }
}

CorrelationResult finalize(const CorrelationAccumulator& acc) {
  if (acc.shot_count() < 2) throw Error("insufficient shots");
  const auto m = static_cast<double>(acc.shot_count());
  CorrelationResult r;
  r.shots = acc.shot_count();
  const double s1 = acc.sum_reference();
  r.mean_reference = s1 / m;
  r.sigma2_reference = std::max(0.0, (acc.sum_reference_sq() - s1 * s1 / m) / (m - 1.0));
  r.degenerate = r.sigma2_reference == 0.0;

  const GridSpec& grid = acc.grid();
  r.g = IntensityMap(grid);
  r.mean_i2 = IntensityMap(grid);
  r.normalized = IntensityMap(grid);
  auto g = r.g.values();
  auto mean = r.mean_i2.values();
  auto norm = r.normalized.values();
  for (std::size_t p = 0; p < grid.size(); ++p) {
    const double s2 = acc.sum_map(p);
    mean[p] = s2 / m;
    g[p] = (acc.sum_product(p) - s1 * s2 / m) / (m - 1.0);
    norm[p] = r.degenerate ? 0.0 : g[p] / r.sigma2_reference;
  }
  return r;
}

CovarianceCheck covariance_identity_check(std::span<const std::vector<double>> references, std::size_t j,
                                          std::size_t n, std::size_t min_shots) {
  if (references.size() < std::max<std::size_t>(min_shots, 2)) throw Error("insufficient shots");
  double mean_j = 0.0, mean_n = 0.0;
  for (const auto& r : references) {
    if (j >= r.size() || n >= r.size()) throw Error("covariance check: component index out of range");
    mean_j += r[j];
    mean_n += r[n];
  }
  const auto m = static_cast<double>(references.size());
  mean_j /= m;
  mean_n /= m;
  double cov = 0.0, var = 0.0;
  for (const auto& r : references) {
    cov += (r[j] - mean_j) * (r[n] - mean_n);
    var += (r[n] - mean_n) * (r[n] - mean_n);
  }
  CovarianceCheck c;
  c.covariance = cov / (m - 1.0);
  c.sigma2 = var / (m - 1.0);
  c.ratio = c.sigma2 > 0.0 ? c.covariance / c.sigma2 : std::numeric_limits<double>::quiet_NaN();
  return c;
}

CovarianceCheck covariance_identity_check(std::span<const ShotRecord> shots, std::size_t j, std::size_t n,
                                          std::size_t min_shots) {
  std::vector<std::vector<double>> refs;
  refs.reserve(shots.size());
  for (const auto& s : shots) refs.push_back(s.reference);
  return covariance_identity_check(refs, j, n, min_shots);
}

double normalized_cross_correlation(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size() || a.empty()) throw Error("ncc: size mismatch");
  const auto n = static_cast<double>(a.size());
  double ma = 0.0, mb = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    ma += a[i];
    mb += b[i];
  }
  ma /= n;
  mb /= n;
  double sab = 0.0, saa = 0.0, sbb = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    sab += (a[i] - ma) * (b[i] - mb);
    saa += (a[i] - ma) * (a[i] - ma);
    sbb += (b[i] - mb) * (b[i] - mb);
  }
  if (saa == 0.0 || sbb == 0.0) return 0.0;
  return sab / std::sqrt(saa * sbb);
}

ImageMetrics image_metrics(const IntensityMap& recovered, const IntensityMap& reference, double shift_x,
                           double shift_y) {
  if (!(recovered.grid() == reference.grid())) throw Error("image metrics: grids differ");
  const auto rec = recovered.values();
  if (std::all_of(rec.begin(), rec.end(), [](double v) { return v == 0.0; })) throw Error("empty image");

  const GridSpec& grid = reference.grid();
  std::vector<Complex> amp(grid.size());
  const auto ref = reference.values();
  for (std::size_t p = 0; p < amp.size(); ++p) amp[p] = std::sqrt(std::max(ref[p], 0.0));
  fft::translate(amp, grid, shift_x, shift_y);
  std::vector<double> truth(grid.size());
  for (std::size_t p = 0; p < truth.size(); ++p) truth[p] = std::norm(amp[p]);
  const double peak = *std::max_element(truth.begin(), truth.end());
  if (!(peak > 0.0)) throw Error("empty image");

  ImageMetrics m;
  m.ncc = normalized_cross_correlation(rec, truth);
  double in_sum = 0.0, bg_sum = 0.0, bg_sq = 0.0;
  std::size_t in_count = 0, bg_count = 0;
  for (std::size_t p = 0; p < truth.size(); ++p) {
    if (truth[p] > 0.5 * peak) {
      in_sum += rec[p];
      ++in_count;
    } else {
      bg_sum += rec[p];
      bg_sq += rec[p] * rec[p];
      ++bg_count;
    }
  }
  const double in_mean = in_count ? in_sum / static_cast<double>(in_count) : 0.0;
  const double bg_mean = bg_count ? bg_sum / static_cast<double>(bg_count) : 0.0;
  m.contrast = (in_mean + bg_mean) != 0.0 ? (in_mean - bg_mean) / (in_mean + bg_mean) : 0.0;
  m.background_rms = bg_count ? std::sqrt(bg_sq / static_cast<double>(bg_count)) : 0.0;
  return m;
}

PixelShift locate_image(const IntensityMap& map, const IntensityMap& reference) {
  if (!(map.grid() == reference.grid())) throw Error("locate_image: grids differ");
  const GridSpec& grid = map.grid();
  std::vector<Complex> a(map.values().begin(), map.values().end());
  std::vector<Complex> b(reference.values().begin(), reference.values().end());
  fft::transform(a, grid.nx, grid.ny, fft::Sign::negative);
  fft::transform(b, grid.nx, grid.ny, fft::Sign::negative);
  for (std::size_t p = 0; p < a.size(); ++p) a[p] *= std::conj(b[p]);
  fft::transform(a, grid.nx, grid.ny, fft::Sign::positive);
  std::size_t best = 0;
  for (std::size_t p = 1; p < a.size(); ++p) {
    if (a[p].real() > a[best].real()) best = p;
  }
  int sx = static_cast<int>(best % static_cast<std::size_t>(grid.nx));
  int sy = static_cast<int>(best / static_cast<std::size_t>(grid.nx));
  if (sx >= grid.nx / 2) sx -= grid.nx;
  if (sy >= grid.ny / 2) sy -= grid.ny;
  return {sx, sy};
}

}  // namespace chaosimg::correlation
