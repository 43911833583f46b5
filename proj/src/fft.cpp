#include "chaosimg/fft.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <map>
#include <mutex>
#include <numbers>
#include <tuple>

#include "chaosimg/error.hpp"

namespace chaosimg::fft {
namespace {

// fftw_plan_* is not thread safe; fftw_execute_dft on a finished plan is.
class PlanCache {
 public:
  ~PlanCache() {
    for (auto& [key, plan] : plans_) fftw_destroy_plan(plan);
  }

  fftw_plan get(int nx, int ny, Sign sign) {
    std::lock_guard lock(mutex_);
    const auto key = std::make_tuple(nx, ny, static_cast<int>(sign));
    if (auto it = plans_.find(key); it != plans_.end()) return it->second;
    auto* scratch = fftw_alloc_complex(static_cast<std::size_t>(nx) * static_cast<std::size_t>(ny));
    fftw_plan plan = fftw_plan_dft_2d(ny, nx, scratch, scratch, static_cast<int>(sign),
                                      FFTW_ESTIMATE | FFTW_UNALIGNED);
    fftw_free(scratch);
    if (plan == nullptr) throw Error("fft: plan creation failed");
    plans_.emplace(key, plan);
    return plan;
  }

 private:
  std::mutex mutex_;
  std::map<std::tuple<int, int, int>, fftw_plan> plans_;
};

PlanCache& cache() {
  static PlanCache instance;
  return instance;
}

void roll(std::span<Complex> data, int nx, int ny, int sx, int sy) {
  std::vector<Complex> tmp(data.begin(), data.end());
  for (int iy = 0; iy < ny; ++iy) {
    const int ty = (iy + sy) % ny;
    for (int ix = 0; ix < nx; ++ix) {
      const int tx = (ix + sx) % nx;
      data[static_cast<std::size_t>(ty) * nx + tx] = tmp[static_cast<std::size_t>(iy) * nx + ix];
    }
  }
}

}  // namespace

void transform(std::span<Complex> data, int nx, int ny, Sign sign) {
  if (data.size() != static_cast<std::size_t>(nx) * static_cast<std::size_t>(ny)) {
    throw Error("fft: buffer size does not match shape");
  }
  auto* ptr = reinterpret_cast<fftw_complex*>(data.data());
  fftw_execute_dft(cache().get(nx, ny, sign), ptr, ptr);
}

// Even sizes only, so fftshift and ifftshift are the same roll.
void fftshift(std::span<Complex> data, int nx, int ny) { roll(data, nx, ny, nx / 2, ny / 2); }
void ifftshift(std::span<Complex> data, int nx, int ny) { roll(data, nx, ny, nx - nx / 2, ny - ny / 2); }

void centered_transform(std::span<Complex> data, int nx, int ny, Sign sign) {
  ifftshift(data, nx, ny);
  transform(data, nx, ny, sign);
  fftshift(data, nx, ny);
}

std::vector<double> angular_frequencies(int n, double pitch) {
  std::vector<double> q(static_cast<std::size_t>(n));
  const double dq = 2.0 * std::numbers::pi / (n * pitch);
  for (int k = 0; k < n; ++k) q[static_cast<std::size_t>(k)] = dq * (k < n / 2 ? k : k - n);
  return q;
}

void translate(std::span<Complex> data, const GridSpec& grid, double dx, double dy) {
  if (dx == 0.0 && dy == 0.0) return;
  const auto qx = angular_frequencies(grid.nx, grid.pitch);
  const auto qy = angular_frequencies(grid.ny, grid.pitch);
  transform(data, grid.nx, grid.ny, Sign::negative);
  std::vector<Complex> phase_x(qx.size());
  for (std::size_t i = 0; i < qx.size(); ++i) phase_x[i] = std::polar(1.0, -qx[i] * dx);
  const double norm = 1.0 / static_cast<double>(grid.size());
  for (int iy = 0; iy < grid.ny; ++iy) {
    const Complex py = std::polar(norm, -qy[static_cast<std::size_t>(iy)] * dy);
    for (int ix = 0; ix < grid.nx; ++ix) data[grid.index(ix, iy)] *= py * phase_x[static_cast<std::size_t>(ix)];
  }
  transform(data, grid.nx, grid.ny, Sign::positive);
}

}  // namespace chaosimg::fft
