#pragma once

#include <complex>
#include <vector>

namespace churn {

using Complex = std::complex<double>;

// In-place radix-2 transform, unscaled: data[k] <- sum_n data[n] *
// e^{sign * 2*pi*i*n*k/N}. data.size() must be a power of two; sign is +-1.
void fft_pow2(std::vector<Complex> &data, int sign);

// DFT of arbitrary length (Bluestein's chirp-z when the length is not a power
// of two): Y(k) = sum_n x(n) * e^{2*pi*i*n*k/N}. The positive exponent
// matches the spectral convention used by the period analysis.
std::vector<Complex> dft_forward(const std::vector<Complex> &x);

// Inverse of dft_forward, including the 1/N scaling.
std::vector<Complex> dft_inverse(const std::vector<Complex> &y);

}  // namespace churn
