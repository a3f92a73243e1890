#pragma once

#include <cmath>
#include <cstddef>
#include <vector>

#include "noiselab/core.hpp"

namespace noiselab {

/// Time-domain signal. Full scale is amplitude 1.0.
struct Waveform {
  std::vector<double> samples;
  int sample_rate_hz = 16000;

  std::size_t size() const { return samples.size(); }
  double duration_s() const {
    return static_cast<double>(samples.size()) / sample_rate_hz;
  }
};

inline void check_waveform(const Waveform& w) {
  if (w.sample_rate_hz <= 0)
    throw Error(ErrorCode::InvalidArgument, "sample rate must be positive");
  for (double s : w.samples)
    if (!std::isfinite(s))
      throw Error(ErrorCode::InvalidArgument, "waveform contains non-finite samples");
}

inline double rms(const double* x, std::size_t n) {
  double acc = 0.0;
  for (std::size_t i = 0; i < n; ++i) acc += x[i] * x[i];
  return n == 0 ? 0.0 : std::sqrt(acc / static_cast<double>(n));
}

inline Waveform scaled(const Waveform& w, double gain) {
  Waveform out{w.samples, w.sample_rate_hz};
  for (double& s : out.samples) s *= gain;
  return out;
}

}  // namespace noiselab
