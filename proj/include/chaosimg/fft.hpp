#pragma once

#include <span>
#include <vector>

#include "chaosimg/field.hpp"

// Thin FFTW wrapper. Transforms are unnormalized; plans are cached per shape
// and shared between threads.
namespace chaosimg::fft {

enum class Sign { negative = -1, positive = +1 };

/// In-place 2-D DFT: out[k] = sum_n in[n] exp(sign * 2*pi*i * k.n / N).
void transform(std::span<Complex> data, int nx, int ny, Sign sign);

/// Same transform with the zero index moved to (nx/2, ny/2) on both sides.
void centered_transform(std::span<Complex> data, int nx, int ny, Sign sign);

void fftshift(std::span<Complex> data, int nx, int ny);
void ifftshift(std::span<Complex> data, int nx, int ny);

/// Angular spatial frequencies (rad/m) in FFT order for n samples at pitch.
std::vector<double> angular_frequencies(int n, double pitch);

/// Translate a sampled function by (dx, dy) meters with the Fourier shift
/// theorem: out(x) = in(x - dx). Periodic on the grid.
void translate(std::span<Complex> data, const GridSpec& grid, double dx, double dy);

}  // namespace chaosimg::fft
