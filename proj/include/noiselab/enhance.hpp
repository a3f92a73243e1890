#pragma once

#include <cmath>
#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "noiselab/core.hpp"
#include "noiselab/stft.hpp"

namespace noiselab {

/// Real suppression gain per (bin, frame); same shape as the spectrogram.
using GainMask = RealMatrix;

struct FeatureStats {
  double mean = 0.0;
  double variance = 1.0;
};

/// Normalized log-power features for the 255 bins a mask estimator sees
/// (DC and Nyquist dropped).
struct FeatureMatrix {
  RealMatrix values;  // [bins-2 x frames]
  FeatureStats stats;
};

inline constexpr double kFeatureEpsilon = 1e-12;

inline RealMatrix log_power(const Spectrogram& spec, double eps = kFeatureEpsilon) {
  const std::size_t bins = spec.num_bins();
  if (bins < 3) throw Error(ErrorCode::ShapeMismatch, "spectrogram too small");
  RealMatrix out(bins - 2, spec.num_frames());
  for (std::size_t n = 0; n < spec.num_frames(); ++n) {
    const std::complex<double>* col = spec.bins.col(n);
    double* dst = out.col(n);
    for (std::size_t k = 1; k + 1 < bins; ++k)
      dst[k - 1] = std::log10(std::norm(col[k]) + eps);
  }
  return out;
}

/// Scalar mean/variance of the raw log-power features over a training set.
inline FeatureStats compute_feature_stats(std::span<const Spectrogram> training_set,
                                          double eps = kFeatureEpsilon) {
  double sum = 0.0, sum_sq = 0.0;
  std::size_t count = 0;
  for (const Spectrogram& spec : training_set) {
    RealMatrix p = log_power(spec, eps);
    for (double v : p.data()) {
      sum += v;
      sum_sq += v * v;
    }
    count += p.size();
  }
  if (count == 0) throw Error(ErrorCode::InvalidArgument, "empty training set");
  FeatureStats stats;
  stats.mean = sum / static_cast<double>(count);
  stats.variance = sum_sq / static_cast<double>(count) - stats.mean * stats.mean;
  if (stats.variance <= 0.0) stats.variance = 1.0;
  return stats;
}

/// Log-power features normalized by scalar global stats. With no stats given
/// the utterance's own statistics are used (single-utterance mode). The
/// input spectrogram keeps its original level; loss normalization never
/// reaches this path.
inline FeatureMatrix extract_features(const Spectrogram& noisy,
                                      std::optional<FeatureStats> stats = std::nullopt,
                                      double eps = kFeatureEpsilon) {
  FeatureMatrix features;
  features.values = log_power(noisy, eps);
  if (stats) {
    features.stats = *stats;
  } else {
    double sum = 0.0, sum_sq = 0.0;
    for (double v : features.values.data()) {
      sum += v;
      sum_sq += v * v;
    }
    const double n = static_cast<double>(features.values.size());
    features.stats.mean = sum / n;
    features.stats.variance = sum_sq / n - features.stats.mean * features.stats.mean;
    if (features.stats.variance <= 0.0) features.stats.variance = 1.0;
  }
  const double inv_std = 1.0 / std::sqrt(features.stats.variance);
  for (double& v : features.values.data()) v = (v - features.stats.mean) * inv_std;
  return features;
}

/// Elementwise suppression: estimate(k,n) = gain(k,n) * noisy(k,n). A real
/// gain preserves the noisy phase exactly.
inline Spectrogram apply_gain(const Spectrogram& noisy, const GainMask& gain) {
  if (gain.rows() != noisy.bins.rows() || gain.cols() != noisy.bins.cols())
    throw Error(ErrorCode::ShapeMismatch, "gain/spectrogram shapes disagree");
  Spectrogram out;
  out.config = noisy.config;
  out.bins = noisy.bins;
  for (std::size_t i = 0; i < out.bins.size(); ++i)
    out.bins.data()[i] *= gain.data()[i];
  return out;
}

/// Ground-truth Wiener gain |S|^2 / (|S|^2 + |N|^2), computable only with
/// the clean components in hand; used to validate the pipeline.
inline GainMask oracle_wiener_gain(const Spectrogram& clean, const Spectrogram& noise,
                                   double eps = 1e-12) {
  if (!clean.bins.same_shape(noise.bins))
    throw Error(ErrorCode::ShapeMismatch, "spectrogram shapes disagree");
  GainMask gain(clean.bins.rows(), clean.bins.cols());
  for (std::size_t i = 0; i < gain.size(); ++i) {
    const double ps = std::norm(clean.bins.data()[i]);
    const double pn = std::norm(noise.bins.data()[i]);
    gain.data()[i] = ps / (ps + pn + eps);
  }
  return gain;
}

}  // namespace noiselab
