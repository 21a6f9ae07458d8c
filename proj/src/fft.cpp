#include "churn/fft.hpp"

#include <cassert>
#include <cmath>
#include <numbers>

namespace churn {

static bool is_pow2(std::size_t n) { return n && (n & (n - 1)) == 0; }

static std::size_t next_pow2(std::size_t n) {
  std::size_t p = 1;
  while (p < n) p <<= 1;
  return p;
}

void fft_pow2(std::vector<Complex> &data, int sign) {
  const std::size_t n = data.size();
  assert(is_pow2(n));
  // bit-reversal permutation
  for (std::size_t i = 1, j = 0; i < n; ++i) {
    std::size_t bit = n >> 1;
    for (; j & bit; bit >>= 1) j ^= bit;
    j ^= bit;
    if (i < j) std::swap(data[i], data[j]);
  }
  for (std::size_t len = 2; len <= n; len <<= 1) {
    const double ang = sign * 2.0 * std::numbers::pi / static_cast<double>(len);
    const Complex wlen(std::cos(ang), std::sin(ang));
    for (std::size_t i = 0; i < n; i += len) {
      Complex w(1.0, 0.0);
      for (std::size_t k = 0; k < len / 2; ++k) {
        Complex u = data[i + k];
        Complex v = data[i + k + len / 2] * w;
        data[i + k] = u + v;
        data[i + k + len / 2] = u - v;
        w *= wlen;
      }
    }
  }
}

// Bluestein: nk = (n^2 + k^2 - (k-n)^2) / 2 turns the DFT into a linear
// convolution that any pow2 FFT can evaluate.
static std::vector<Complex> bluestein(const std::vector<Complex> &x, int sign) {
  const std::size_t n = x.size();
  const std::size_t m = next_pow2(2 * n - 1);

  std::vector<Complex> chirp(n);
  for (std::size_t i = 0; i < n; ++i) {
    // i^2 mod 2n keeps the angle argument small for large n
    const double ang = sign * std::numbers::pi *
                       static_cast<double>((i * i) % (2 * n)) /
                       static_cast<double>(n);
    chirp[i] = Complex(std::cos(ang), std::sin(ang));
  }

  std::vector<Complex> a(m, Complex{});
  for (std::size_t i = 0; i < n; ++i) a[i] = x[i] * chirp[i];
  std::vector<Complex> b(m, Complex{});
  b[0] = std::conj(chirp[0]);
  for (std::size_t i = 1; i < n; ++i) b[i] = b[m - i] = std::conj(chirp[i]);

  fft_pow2(a, -1);
  fft_pow2(b, -1);
  for (std::size_t i = 0; i < m; ++i) a[i] *= b[i];
  fft_pow2(a, +1);
  const double scale = 1.0 / static_cast<double>(m);

  std::vector<Complex> y(n);
  for (std::size_t i = 0; i < n; ++i) y[i] = a[i] * scale * chirp[i];
  return y;
}

static std::vector<Complex> transform(const std::vector<Complex> &x, int sign) {
  if (x.empty()) return {};
  if (is_pow2(x.size())) {
    std::vector<Complex> data = x;
    fft_pow2(data, sign);
    return data;
  }
  return bluestein(x, sign);
}

std::vector<Complex> dft_forward(const std::vector<Complex> &x) {
  return transform(x, +1);
}

std::vector<Complex> dft_inverse(const std::vector<Complex> &y) {
  auto x = transform(y, -1);
  const double scale = 1.0 / static_cast<double>(y.size());
  for (auto &v : x) v *= scale;
  return x;
}

}  // namespace churn
