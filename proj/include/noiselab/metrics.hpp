#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <vector>

#include "noiselab/core.hpp"
#include "noiselab/stft.hpp"
#include "noiselab/waveform.hpp"

namespace noiselab {

inline constexpr double kSiSdrCapDb = 100.0;

/// Scale-invariant signal-to-distortion ratio in dB: the estimate is
/// orthogonally decomposed into a scaled reference plus a residual. Capped
/// to +-100 dB so the value stays finite on exact reconstruction.
inline double si_sdr(const Waveform& reference, const Waveform& estimate) {
  if (reference.size() != estimate.size())
    throw Error(ErrorCode::ShapeMismatch, "signals must have equal length");
  double ref_energy = 0.0, dot = 0.0;
  for (std::size_t i = 0; i < reference.size(); ++i) {
    ref_energy += reference.samples[i] * reference.samples[i];
    dot += estimate.samples[i] * reference.samples[i];
  }
  if (ref_energy <= 0.0)
    throw Error(ErrorCode::ZeroReference, "reference has no energy");
  const double scale = dot / ref_energy;
  const double target_energy = scale * scale * ref_energy;
  double residual_energy = 0.0;
  for (std::size_t i = 0; i < reference.size(); ++i) {
    const double e = estimate.samples[i] - scale * reference.samples[i];
    residual_energy += e * e;
  }
  if (target_energy <= 0.0) return -kSiSdrCapDb;
  if (residual_energy <= 0.0) return kSiSdrCapDb;
  const double value = 10.0 * std::log10(target_energy / residual_energy);
  return std::clamp(value, -kSiSdrCapDb, kSiSdrCapDb);
}

/// Mean over frames of the per-frame SNR in dB, each frame clamped to
/// [floor_db, ceil_db].
inline double seg_snr(const Waveform& reference, const Waveform& estimate,
                      const FrameConfig& cfg, double floor_db = -10.0,
                      double ceil_db = 35.0) {
  if (reference.size() != estimate.size())
    throw Error(ErrorCode::ShapeMismatch, "signals must have equal length");
  const std::size_t frames = stft_frame_count(reference.size(), cfg);
  double total_ref = 0.0;
  for (double s : reference.samples) total_ref += s * s;
  if (total_ref <= 0.0)
    throw Error(ErrorCode::ZeroReference, "reference has no energy");

  double acc = 0.0;
  for (std::size_t m = 0; m < frames; ++m) {
    const std::size_t start = m * cfg.hop;
    double num = 0.0, den = 0.0;
    for (int i = 0; i < cfg.window_len; ++i) {
      const double s = reference.samples[start + i];
      const double d = s - estimate.samples[start + i];
      num += s * s;
      den += d * d;
    }
    double snr;
    if (den <= 0.0)
      snr = ceil_db;
    else if (num <= 0.0)
      snr = floor_db;
    else
      snr = std::clamp(10.0 * std::log10(num / den), floor_db, ceil_db);
    acc += snr;
  }
  return acc / static_cast<double>(frames);
}

struct FwSegSnrConfig {
  int num_bands = 25;
  double weight_exponent = 0.2;  // reference band magnitude ^ gamma
  double floor_db = -10.0;
  double ceil_db = 35.0;
  FrameConfig frame = make_frame_config();
};

namespace detail {

inline double hz_to_mel(double hz) { return 2595.0 * std::log10(1.0 + hz / 700.0); }
inline double mel_to_hz(double mel) { return 700.0 * (std::pow(10.0, mel / 2595.0) - 1.0); }

// Triangular mel filterbank over the one-sided spectrum, rows = bands.
inline RealMatrix mel_filterbank(int num_bands, const FrameConfig& cfg) {
  const int bins = cfg.num_bins();
  const double nyquist = cfg.sample_rate_hz / 2.0;
  const double mel_max = hz_to_mel(nyquist);
  std::vector<double> edges(num_bands + 2);
  for (int i = 0; i < num_bands + 2; ++i)
    edges[i] = mel_to_hz(mel_max * i / (num_bands + 1));
  RealMatrix fb(num_bands, bins, 0.0);
  for (int j = 0; j < num_bands; ++j) {
    const double lo = edges[j], mid = edges[j + 1], hi = edges[j + 2];
    for (int k = 0; k < bins; ++k) {
      const double f = static_cast<double>(k) * cfg.sample_rate_hz / cfg.fft_size;
      double w = 0.0;
      if (f > lo && f < mid)
        w = (f - lo) / (mid - lo);
      else if (f >= mid && f < hi)
        w = (hi - f) / (hi - mid);
      fb(j, k) = w;
    }
  }
  return fb;
}

// Band magnitudes: sqrt of filter-weighted power per band, frames as columns.
inline RealMatrix band_magnitudes(const Spectrogram& spec, const RealMatrix& fb) {
  RealMatrix out(fb.rows(), spec.num_frames());
  for (std::size_t n = 0; n < spec.num_frames(); ++n) {
    const std::complex<double>* col = spec.bins.col(n);
    for (std::size_t j = 0; j < fb.rows(); ++j) {
      double p = 0.0;
      for (std::size_t k = 0; k < spec.num_bins(); ++k)
        p += fb(j, k) * std::norm(col[k]);
      out(j, n) = std::sqrt(p);
    }
  }
  return out;
}

}  // namespace detail

/// Frequency-weighted segmental SNR: per-frame, per-mel-band SNR clamped to
/// [floor, ceil] and weighted by the reference band magnitude ^ gamma, then
/// averaged over bands and frames.
inline double fw_seg_snr(const Waveform& reference, const Waveform& estimate,
                         const FwSegSnrConfig& cfg = {}) {
  if (reference.size() != estimate.size())
    throw Error(ErrorCode::ShapeMismatch, "signals must have equal length");
  double total_ref = 0.0;
  for (double s : reference.samples) total_ref += s * s;
  if (total_ref <= 0.0)
    throw Error(ErrorCode::ZeroReference, "reference has no energy");

  const RealMatrix fb = detail::mel_filterbank(cfg.num_bands, cfg.frame);
  const RealMatrix ref_bands = detail::band_magnitudes(stft(reference, cfg.frame), fb);
  const RealMatrix est_bands = detail::band_magnitudes(stft(estimate, cfg.frame), fb);

  double acc = 0.0;
  std::size_t used_frames = 0;
  for (std::size_t n = 0; n < ref_bands.cols(); ++n) {
    double weighted = 0.0, weight_sum = 0.0;
    for (std::size_t j = 0; j < ref_bands.rows(); ++j) {
      const double f_ref = ref_bands(j, n);
      if (f_ref <= 0.0) continue;
      const double diff = f_ref - est_bands(j, n);
      double snr;
      if (diff == 0.0)
        snr = cfg.ceil_db;
      else
        snr = std::clamp(10.0 * std::log10(f_ref * f_ref / (diff * diff)),
                         cfg.floor_db, cfg.ceil_db);
      const double w = std::pow(f_ref, cfg.weight_exponent);
      weighted += w * snr;
      weight_sum += w;
    }
    if (weight_sum > 0.0) {
      acc += weighted / weight_sum;
      ++used_frames;
    }
  }
  if (used_frames == 0)
    throw Error(ErrorCode::ZeroReference, "no frames with reference energy");
  return acc / static_cast<double>(used_frames);
}

struct CepstralConfig {
  int lpc_order = 10;
  FrameConfig frame = make_frame_config();
};

namespace detail {

// Levinson-Durbin on autocorrelation; returns false when the recursion is
// unstable (non-positive prediction error) or the frame is silent.
inline bool lpc_from_frame(const double* x, int len, const std::vector<double>& window,
                           int order, std::vector<double>& coeffs) {
  std::vector<double> w(len);
  for (int i = 0; i < len; ++i) w[i] = x[i] * window[i];
  std::vector<double> r(order + 1, 0.0);
  for (int lag = 0; lag <= order; ++lag)
    for (int i = lag; i < len; ++i) r[lag] += w[i] * w[i - lag];
  if (r[0] <= 1e-12) return false;
  // White-noise correction (-40 dB floor). Near-deterministic frames drive
  // the prediction error towards zero and the recursion into rounding noise;
  // the multiplicative floor bounds it while keeping the result invariant to
  // signal scale.
  r[0] *= 1.0001;

  coeffs.assign(order + 1, 0.0);
  coeffs[0] = 1.0;
  double err = r[0];
  std::vector<double> prev(order + 1);
  for (int i = 1; i <= order; ++i) {
    double acc = r[i];
    for (int k = 1; k < i; ++k) acc += coeffs[k] * r[i - k];
    const double reflection = -acc / err;
    if (!(std::abs(reflection) < 1.0)) return false;
    prev = coeffs;
    for (int k = 1; k < i; ++k)
      coeffs[k] = prev[k] + reflection * prev[i - k];
    coeffs[i] = reflection;
    err *= (1.0 - reflection * reflection);
    if (err <= 0.0) return false;
  }
  return true;
}

// Cepstrum of the LPC envelope, c_1..c_p; the gain term c_0 is excluded,
// which makes the distance invariant to signal scale.
inline std::vector<double> lpc_cepstrum(const std::vector<double>& a, int order) {
  std::vector<double> c(order + 1, 0.0);
  for (int n = 1; n <= order; ++n) {
    double acc = -a[n];
    for (int k = 1; k < n; ++k)
      acc -= (static_cast<double>(k) / n) * c[k] * a[n - k];
    c[n] = acc;
  }
  return c;
}

}  // namespace detail

/// Cepstral distance between the LPC spectral envelopes of the two signals,
/// averaged over analyzable frames. Frames where LPC fails on either signal
/// are skipped and counted in skipped_frames.
inline double cepstral_distance(const Waveform& reference, const Waveform& estimate,
                                const CepstralConfig& cfg = {},
                                std::size_t* skipped_frames = nullptr) {
  if (reference.size() != estimate.size())
    throw Error(ErrorCode::ShapeMismatch, "signals must have equal length");
  double total_ref = 0.0;
  for (double s : reference.samples) total_ref += s * s;
  if (total_ref <= 0.0)
    throw Error(ErrorCode::ZeroReference, "reference has no energy");

  const FrameConfig& fc = cfg.frame;
  const std::size_t frames = stft_frame_count(reference.size(), fc);
  // Full Hann analysis window (the frame config holds its square root).
  std::vector<double> window(fc.window_len);
  for (int i = 0; i < fc.window_len; ++i) window[i] = fc.window[i] * fc.window[i];

  double acc = 0.0;
  std::size_t kept = 0, skipped = 0;
  std::vector<double> a_ref, a_est;
  const double scale = 10.0 / std::log(10.0) * std::sqrt(2.0);
  for (std::size_t m = 0; m < frames; ++m) {
    const std::size_t start = m * fc.hop;
    const bool ok_ref = detail::lpc_from_frame(reference.samples.data() + start,
                                               fc.window_len, window, cfg.lpc_order, a_ref);
    const bool ok_est = detail::lpc_from_frame(estimate.samples.data() + start,
                                               fc.window_len, window, cfg.lpc_order, a_est);
    if (!ok_ref || !ok_est) {
      ++skipped;
      continue;
    }
    const std::vector<double> c_ref = detail::lpc_cepstrum(a_ref, cfg.lpc_order);
    const std::vector<double> c_est = detail::lpc_cepstrum(a_est, cfg.lpc_order);
    double sq = 0.0;
    for (int i = 1; i <= cfg.lpc_order; ++i) {
      const double d = c_ref[i] - c_est[i];
      sq += d * d;
    }
    acc += scale * std::sqrt(sq);
    ++kept;
  }
  if (skipped_frames) *skipped_frames = skipped;
  if (kept == 0)
    throw Error(ErrorCode::ZeroReference, "no analyzable frames");
  return acc / static_cast<double>(kept);
}

struct MetricReport {
  double si_sdr_db = 0.0;
  double fw_seg_snr_db = 0.0;
  double cepstral_distance = 0.0;
  double seg_snr_db = 0.0;
};

inline MetricReport evaluate_pair(const Waveform& reference, const Waveform& estimate,
                                  const FrameConfig& cfg = make_frame_config()) {
  MetricReport report;
  report.si_sdr_db = si_sdr(reference, estimate);
  report.seg_snr_db = seg_snr(reference, estimate, cfg);
  FwSegSnrConfig fw;
  fw.frame = cfg;
  report.fw_seg_snr_db = fw_seg_snr(reference, estimate, fw);
  CepstralConfig cd;
  cd.frame = cfg;
  report.cepstral_distance = cepstral_distance(reference, estimate, cd);
  return report;
}

}  // namespace noiselab
