#pragma once

#include <cmath>
#include <complex>
#include <cstddef>

#include "noiselab/core.hpp"
#include "noiselab/stft.hpp"

namespace noiselab {

enum class BinReduction { Sum, Mean };

struct LossConfig {
  double compression = 0.3;     // magnitude exponent, in (0, 1]
  double complex_weight = 0.3;  // blend between complex and magnitude terms
  double epsilon = 1e-12;       // magnitude floor for the phase factor
  BinReduction reduction = BinReduction::Sum;
};

inline void check_loss_config(const LossConfig& cfg) {
  if (!(cfg.compression > 0.0 && cfg.compression <= 1.0))
    throw Error(ErrorCode::InvalidArgument, "compression exponent must be in (0,1]");
  if (!(cfg.complex_weight >= 0.0 && cfg.complex_weight <= 1.0))
    throw Error(ErrorCode::InvalidArgument, "complex weight must be in [0,1]");
  if (!(cfg.epsilon > 0.0))
    throw Error(ErrorCode::InvalidArgument, "epsilon must be positive");
}

struct LossReport {
  double value = 0.0;
  double complex_term = 0.0;    // blend applied in value, not here
  double magnitude_term = 0.0;
  RealMatrix grad_gain;         // d value / d gain; empty for forward-only calls
};

namespace detail {

struct Compressed {
  std::complex<double> phase_scaled;  // |z|^c e^{j phi}, smoothly zero at z = 0
  double magnitude;                   // |z|^c with the same floor
};

// |z|^c e^{j phi} computed as max(|z|, eps)^(c-1) * z, exact for |z| >= eps.
inline Compressed compress(std::complex<double> z, double c, double eps) {
  const double mag = std::abs(z);
  const double w = std::pow(std::max(mag, eps), c - 1.0);
  return {w * z, w * mag};
}

// Shared forward/gradient pass for the mask-applied loss. The estimate is
// gain(k,n) * noisy(k,n); both spectra are divided by sigma first (sigma = 1
// gives the standard loss). The gradient mirrors the floored forward exactly.
inline LossReport masked_loss(const Spectrogram& clean, const Spectrogram& noisy,
                              const RealMatrix& gain, double sigma,
                              const LossConfig& cfg, bool with_grad) {
  check_loss_config(cfg);
  if (!(sigma > 0.0))
    throw Error(ErrorCode::NonPositiveSigma, "sigma must be positive");
  if (!clean.bins.same_shape(noisy.bins) || gain.rows() != clean.bins.rows() ||
      gain.cols() != clean.bins.cols())
    throw Error(ErrorCode::ShapeMismatch, "spectrogram/gain shapes disagree");

  const double c = cfg.compression;
  const double alpha = cfg.complex_weight;
  const double eps = cfg.epsilon;
  const double inv_sigma = 1.0 / sigma;

  LossReport report;
  if (with_grad) report.grad_gain = RealMatrix(gain.rows(), gain.cols());

  const std::size_t n = clean.bins.size();
  const auto* s_ptr = clean.bins.data().data();
  const auto* x_ptr = noisy.bins.data().data();
  const double* g_ptr = gain.data().data();
  double* grad_ptr = with_grad ? report.grad_gain.data().data() : nullptr;

  double complex_sum = 0.0, magnitude_sum = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const std::complex<double> s = s_ptr[i] * inv_sigma;
    const std::complex<double> x = x_ptr[i] * inv_sigma;
    const double g = g_ptr[i];
    const Compressed cs = compress(s, c, eps);
    const Compressed ce = compress(g * x, c, eps);

    const std::complex<double> cdiff = cs.phase_scaled - ce.phase_scaled;
    const double mdiff = cs.magnitude - ce.magnitude;
    complex_sum += std::norm(cdiff);
    magnitude_sum += mdiff * mdiff;

    if (!with_grad) continue;
    const double ax = std::abs(x);
    const double a_hat = g * ax;
    double dcomplex, dmag;
    if (ax == 0.0) {
      dcomplex = 0.0;
      dmag = 0.0;
    } else if (a_hat >= eps) {
      // d|estimate|^c / dg, with the estimate's phase equal to the phase of x.
      const double da = c * std::pow(a_hat, c - 1.0) * ax;
      const std::complex<double> unit = x / ax;
      dcomplex = 2.0 * (ce.magnitude - (std::conj(unit) * cs.phase_scaled).real()) * da;
      dmag = 2.0 * (ce.magnitude - cs.magnitude) * da;
    } else {
      // Floored region: both compressed values are linear in g.
      const double w = std::pow(eps, c - 1.0);
      dcomplex = -2.0 * w * (std::conj(x) * cdiff).real();
      dmag = 2.0 * (ce.magnitude - cs.magnitude) * w * ax;
    }
    grad_ptr[i] = alpha * dcomplex + (1.0 - alpha) * dmag;
  }

  double scale = 1.0;
  if (cfg.reduction == BinReduction::Mean && n > 0)
    scale = 1.0 / static_cast<double>(n);
  report.complex_term = complex_sum * scale;
  report.magnitude_term = magnitude_sum * scale;
  report.value = alpha * report.complex_term + (1.0 - alpha) * report.magnitude_term;
  if (with_grad)
    for (auto& v : report.grad_gain.data()) v *= scale;
  return report;
}

}  // namespace detail

/// Compressed complex spectral loss between a clean reference and an
/// already-formed estimate. Forward only.
inline LossReport compressed_loss(const Spectrogram& clean, const Spectrogram& estimate,
                                  const LossConfig& cfg = {}) {
  check_loss_config(cfg);
  if (!clean.bins.same_shape(estimate.bins))
    throw Error(ErrorCode::ShapeMismatch, "spectrogram shapes disagree");
  const double c = cfg.compression;
  const double alpha = cfg.complex_weight;
  double complex_sum = 0.0, magnitude_sum = 0.0;
  const std::size_t n = clean.bins.size();
  for (std::size_t i = 0; i < n; ++i) {
    const auto cs = detail::compress(clean.bins.data()[i], c, cfg.epsilon);
    const auto ce = detail::compress(estimate.bins.data()[i], c, cfg.epsilon);
    complex_sum += std::norm(cs.phase_scaled - ce.phase_scaled);
    const double mdiff = cs.magnitude - ce.magnitude;
    magnitude_sum += mdiff * mdiff;
  }
  double scale = 1.0;
  if (cfg.reduction == BinReduction::Mean && n > 0)
    scale = 1.0 / static_cast<double>(n);
  LossReport report;
  report.complex_term = complex_sum * scale;
  report.magnitude_term = magnitude_sum * scale;
  report.value = alpha * report.complex_term + (1.0 - alpha) * report.magnitude_term;
  return report;
}

/// Level-invariant loss: clean and noisy spectra are divided by the active
/// speech level before the compressed loss is evaluated on gain * noisy.
/// The gain itself, and any features it was computed from, are untouched.
inline LossReport normalized_loss(const Spectrogram& clean, const Spectrogram& noisy,
                                  const RealMatrix& gain, double sigma_active,
                                  const LossConfig& cfg = {}) {
  return detail::masked_loss(clean, noisy, gain, sigma_active, cfg, /*with_grad=*/true);
}

/// Analytic derivative of the selected loss with respect to each gain entry.
/// Matches central finite differences away from the epsilon floor.
inline RealMatrix loss_grad_gain(const Spectrogram& clean, const Spectrogram& noisy,
                                 const RealMatrix& gain, const LossConfig& cfg,
                                 bool normalized = false, double sigma_active = 1.0) {
  const double sigma = normalized ? sigma_active : 1.0;
  return detail::masked_loss(clean, noisy, gain, sigma, cfg, /*with_grad=*/true)
      .grad_gain;
}

}  // namespace noiselab
