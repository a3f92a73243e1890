#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <numbers>
#include <optional>
#include <vector>

#include "noiselab/core.hpp"
#include "noiselab/fft.hpp"
#include "noiselab/waveform.hpp"

namespace noiselab {

/// Analysis/synthesis framing. The same square-root periodic Hann window is
/// used on both sides (WOLA), which satisfies COLA at 50% overlap.
struct FrameConfig {
  int fft_size = 512;
  int window_len = 512;
  int hop = 256;
  int sample_rate_hz = 16000;
  std::vector<double> window;

  int num_bins() const { return fft_size / 2 + 1; }
};

inline FrameConfig make_frame_config(int fft_size = 512, int window_len = 512,
                                     int hop = 256, int sample_rate_hz = 16000) {
  if (fft_size <= 0 || window_len <= 0 || hop <= 0 || window_len > fft_size)
    throw Error(ErrorCode::InvalidArgument, "bad frame geometry");
  if (window_len % hop != 0)
    throw Error(ErrorCode::InvalidArgument, "hop must divide window length");
  if (!detail::is_power_of_two(static_cast<std::size_t>(fft_size)))
    throw Error(ErrorCode::InvalidArgument, "fft size must be a power of two");
  FrameConfig cfg;
  cfg.fft_size = fft_size;
  cfg.window_len = window_len;
  cfg.hop = hop;
  cfg.sample_rate_hz = sample_rate_hz;
  cfg.window.resize(window_len);
  for (int i = 0; i < window_len; ++i) {
    double hann = 0.5 - 0.5 * std::cos(2.0 * std::numbers::pi * i / window_len);
    cfg.window[i] = std::sqrt(hann);
  }
  return cfg;
}

/// One-sided complex STFT matrix, bins 0..fft_size/2 inclusive by frame.
struct Spectrogram {
  ComplexMatrix bins;
  FrameConfig config;

  std::size_t num_bins() const { return bins.rows(); }
  std::size_t num_frames() const { return bins.cols(); }
};

inline std::size_t stft_frame_count(std::size_t num_samples, const FrameConfig& cfg) {
  if (num_samples < static_cast<std::size_t>(cfg.window_len))
    throw Error(ErrorCode::InsufficientLength,
                "signal shorter than one analysis window");
  return (num_samples - cfg.window_len) / cfg.hop + 1;
}

inline Spectrogram stft(const Waveform& w, const FrameConfig& cfg) {
  const std::size_t frames = stft_frame_count(w.size(), cfg);
  const std::size_t bins = static_cast<std::size_t>(cfg.num_bins());
  Spectrogram spec;
  spec.config = cfg;
  spec.bins = ComplexMatrix(bins, frames);
  std::vector<std::complex<double>> buf(cfg.fft_size);
  for (std::size_t m = 0; m < frames; ++m) {
    const std::size_t start = m * cfg.hop;
    for (int i = 0; i < cfg.window_len; ++i) {
      // Zero-pad any tail samples past the end of the signal.
      double s = (start + i < w.size()) ? w.samples[start + i] : 0.0;
      buf[i] = cfg.window[i] * s;
    }
    std::fill(buf.begin() + cfg.window_len, buf.end(), std::complex<double>(0.0));
    fft_forward(buf);
    std::complex<double>* out = spec.bins.col(m);
    for (std::size_t k = 0; k < bins; ++k) out[k] = buf[k];
  }
  return spec;
}

/// Weighted overlap-add synthesis. Output length defaults to the framed span
/// (frames-1)*hop + window_len; pass target_length to pad or truncate, e.g.
/// to match the length of the analyzed signal.
inline Waveform istft(const Spectrogram& spec,
                      std::optional<std::size_t> target_length = std::nullopt) {
  const FrameConfig& cfg = spec.config;
  const std::size_t bins = static_cast<std::size_t>(cfg.num_bins());
  if (spec.bins.rows() != bins)
    throw Error(ErrorCode::ShapeMismatch, "spectrogram row count != fft_size/2+1");
  const std::size_t frames = spec.bins.cols();
  const std::size_t span = (frames == 0) ? 0 : (frames - 1) * cfg.hop + cfg.window_len;

  std::vector<double> acc(span, 0.0);
  std::vector<double> wsum(span, 0.0);
  std::vector<std::complex<double>> buf(cfg.fft_size);
  for (std::size_t m = 0; m < frames; ++m) {
    const std::complex<double>* col = spec.bins.col(m);
    for (std::size_t k = 0; k < bins; ++k) buf[k] = col[k];
    for (std::size_t k = bins; k < static_cast<std::size_t>(cfg.fft_size); ++k)
      buf[k] = std::conj(col[cfg.fft_size - k]);
    fft_inverse(buf);
    const std::size_t start = m * cfg.hop;
    for (int i = 0; i < cfg.window_len; ++i) {
      acc[start + i] += cfg.window[i] * buf[i].real();
      wsum[start + i] += cfg.window[i] * cfg.window[i];
    }
  }
  // COLA sum is 1 on the interior; dividing by the per-sample window energy
  // also corrects the partially covered edges.
  for (std::size_t i = 0; i < span; ++i)
    if (wsum[i] > 1e-12) acc[i] /= wsum[i];

  Waveform out;
  out.sample_rate_hz = cfg.sample_rate_hz;
  if (target_length) {
    acc.resize(*target_length, 0.0);
  }
  out.samples = std::move(acc);
  return out;
}

/// Per-frame RMS on raw (unwindowed) samples; frame layout matches stft().
inline std::vector<double> frame_rms(const Waveform& w, const FrameConfig& cfg) {
  const std::size_t frames = stft_frame_count(w.size(), cfg);
  std::vector<double> out(frames);
  for (std::size_t m = 0; m < frames; ++m)
    out[m] = rms(w.samples.data() + m * cfg.hop, cfg.window_len);
  return out;
}

}  // namespace noiselab
