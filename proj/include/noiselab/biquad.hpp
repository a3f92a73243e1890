#pragma once

#include <cmath>
#include <complex>
#include <cstddef>

#include "noiselab/core.hpp"
#include "noiselab/rng.hpp"
#include "noiselab/waveform.hpp"

namespace noiselab {

/// Spectral-shaping biquad H(z) = (1 + r1 z^-1 + r2 z^-2) / (1 + r3 z^-1 + r4 z^-2).
struct BiquadCoeffs {
  double r1 = 0.0;
  double r2 = 0.0;
  double r3 = 0.0;
  double r4 = 0.0;
};

/// Denominator poles strictly inside the unit circle (Jury criterion for a
/// monic quadratic): |r4| < 1 and |r3| < 1 + r4.
inline bool biquad_is_stable(const BiquadCoeffs& c) {
  return std::abs(c.r4) < 1.0 && std::abs(c.r3) < 1.0 + c.r4;
}

inline constexpr double kBiquadCoeffRange = 3.0 / 8.0;

/// Draws all four coefficients i.i.d. uniform on [-range, range]. The default
/// range keeps every draw stable.
inline BiquadCoeffs sample_biquad(Rng& rng, double range = kBiquadCoeffRange) {
  BiquadCoeffs c;
  c.r1 = rng.uniform(-range, range);
  c.r2 = rng.uniform(-range, range);
  c.r3 = rng.uniform(-range, range);
  c.r4 = rng.uniform(-range, range);
  return c;
}

/// Direct-form II transposed filtering with zero initial state.
inline Waveform apply_biquad(const Waveform& w, const BiquadCoeffs& c) {
  if (!biquad_is_stable(c))
    throw Error(ErrorCode::UnstableFilter, "biquad poles not inside unit circle");
  Waveform out;
  out.sample_rate_hz = w.sample_rate_hz;
  out.samples.resize(w.size());
  double s1 = 0.0, s2 = 0.0;
  for (std::size_t n = 0; n < w.size(); ++n) {
    const double x = w.samples[n];
    const double y = x + s1;
    s1 = c.r1 * x - c.r3 * y + s2;
    s2 = c.r2 * x - c.r4 * y;
    out.samples[n] = y;
  }
  return out;
}

/// Analytic frequency response at normalized angular frequency omega
/// (radians per sample).
inline std::complex<double> biquad_response(const BiquadCoeffs& c, double omega) {
  const std::complex<double> z1 = std::polar(1.0, -omega);
  const std::complex<double> z2 = z1 * z1;
  return (1.0 + c.r1 * z1 + c.r2 * z2) / (1.0 + c.r3 * z1 + c.r4 * z2);
}

}  // namespace noiselab
