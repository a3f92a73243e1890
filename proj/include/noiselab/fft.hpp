#pragma once

#include <complex>
#include <numbers>
#include <vector>

#include "noiselab/core.hpp"

namespace noiselab {

namespace detail {

inline bool is_power_of_two(std::size_t n) { return n != 0 && (n & (n - 1)) == 0; }

// Iterative radix-2 Cooley-Tukey. sign = -1 forward, +1 inverse (unscaled).
inline void fft_radix2(std::complex<double>* data, std::size_t n, int sign) {
  // Bit-reversal permutation.
  for (std::size_t i = 1, j = 0; i < n; ++i) {
    std::size_t bit = n >> 1;
    for (; j & bit; bit >>= 1) j ^= bit;
    j ^= bit;
    if (i < j) std::swap(data[i], data[j]);
  }
  for (std::size_t len = 2; len <= n; len <<= 1) {
    double angle = sign * 2.0 * std::numbers::pi / static_cast<double>(len);
    std::complex<double> wlen(std::cos(angle), std::sin(angle));
    for (std::size_t i = 0; i < n; i += len) {
      std::complex<double> w(1.0, 0.0);
      for (std::size_t k = 0; k < len / 2; ++k) {
        std::complex<double> u = data[i + k];
        std::complex<double> v = data[i + k + len / 2] * w;
        data[i + k] = u + v;
        data[i + k + len / 2] = u - v;
        w *= wlen;
      }
    }
  }
}

}  // namespace detail

inline void fft_forward(std::vector<std::complex<double>>& data) {
  if (!detail::is_power_of_two(data.size()))
    throw Error(ErrorCode::InvalidArgument, "FFT size must be a power of two");
  detail::fft_radix2(data.data(), data.size(), -1);
}

inline void fft_inverse(std::vector<std::complex<double>>& data) {
  if (!detail::is_power_of_two(data.size()))
    throw Error(ErrorCode::InvalidArgument, "FFT size must be a power of two");
  detail::fft_radix2(data.data(), data.size(), +1);
  double inv = 1.0 / static_cast<double>(data.size());
  for (auto& v : data) v *= inv;
}

}  // namespace noiselab
