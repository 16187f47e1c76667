#pragma once
// Internal FFTW wrapper: cached plans, unnormalized transforms in FFT order.

#include <complex>
#include <vector>

namespace dyadic::detail {

/// Unnormalized forward (exp(-2 pi i ...)) transform of a row-major array.
void fft_forward(int dim, int n, std::vector<std::complex<double>>& data);
/// Unnormalized backward (exp(+2 pi i ...)) transform.
void fft_backward(int dim, int n, std::vector<std::complex<double>>& data);
/// Generic rank-r forward transform with per-axis extents.
void fft_forward_shape(const std::vector<int>& shape, std::vector<std::complex<double>>& data);

}  // namespace dyadic::detail
