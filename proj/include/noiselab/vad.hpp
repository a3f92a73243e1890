#pragma once

#include <cmath>
#include <cstddef>
#include <vector>

#include "noiselab/core.hpp"
#include "noiselab/stft.hpp"
#include "noiselab/waveform.hpp"

namespace noiselab {

/// Frame-energy VAD: a frame is active when its RMS is within threshold_db
/// of the loudest frame of the utterance.
struct VadConfig {
  double threshold_db = -40.0;
  FrameConfig frame = make_frame_config();
};

struct ActiveLevel {
  double sigma = 0.0;                 // std of samples in active frames
  std::vector<bool> active_frames;    // one flag per analysis frame
  std::size_t active_sample_count = 0;
};

/// Active signal level: standard deviation over the samples covered by
/// frames whose RMS exceeds (peak frame RMS + threshold_db). Frames overlap,
/// so the covered samples form a union; each sample is counted once.
inline ActiveLevel active_level(const Waveform& w, const VadConfig& vad) {
  if (vad.threshold_db >= 0.0)
    throw Error(ErrorCode::InvalidArgument, "VAD threshold must be negative");
  const FrameConfig& cfg = vad.frame;
  const std::vector<double> frame_levels = frame_rms(w, cfg);

  double peak = 0.0;
  for (double r : frame_levels) peak = std::max(peak, r);
  if (peak <= 0.0)
    throw Error(ErrorCode::NoActiveFrames, "signal has no energy");

  const double cutoff = peak * db_to_linear(vad.threshold_db);
  ActiveLevel result;
  result.active_frames.resize(frame_levels.size());
  std::vector<bool> sample_active(w.size(), false);
  for (std::size_t m = 0; m < frame_levels.size(); ++m) {
    if (frame_levels[m] > cutoff) {
      result.active_frames[m] = true;
      const std::size_t start = m * cfg.hop;
      for (int i = 0; i < cfg.window_len; ++i) sample_active[start + i] = true;
    }
  }

  double sum = 0.0, sum_sq = 0.0;
  std::size_t count = 0;
  for (std::size_t i = 0; i < w.size(); ++i) {
    if (!sample_active[i]) continue;
    sum += w.samples[i];
    sum_sq += w.samples[i] * w.samples[i];
    ++count;
  }
  if (count == 0)
    throw Error(ErrorCode::NoActiveFrames, "no frame exceeds the VAD threshold");

  const double mean = sum / static_cast<double>(count);
  const double var = sum_sq / static_cast<double>(count) - mean * mean;
  result.sigma = std::sqrt(std::max(var, 0.0));
  result.active_sample_count = count;
  if (result.sigma <= 0.0)
    throw Error(ErrorCode::NoActiveFrames, "active level is zero");
  return result;
}

}  // namespace noiselab
