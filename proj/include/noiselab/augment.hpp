#pragma once

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <utility>

#include "noiselab/biquad.hpp"
#include "noiselab/core.hpp"
#include "noiselab/rng.hpp"
#include "noiselab/vad.hpp"
#include "noiselab/waveform.hpp"

namespace noiselab {

/// Everything random about one augmented example. Once noise_offset is
/// resolved, the spec plus the two source signals determine the output
/// byte-for-byte, independent of any RNG.
struct AugmentSpec {
  BiquadCoeffs speech_filter;
  BiquadCoeffs noise_filter;
  double snr_db = 0.0;
  double level_dbfs = 0.0;
  std::uint64_t seed = 0;
  std::optional<std::size_t> noise_offset;  // crop start, resolved at synthesis
};

/// Sampling distributions for the augmentation parameters.
struct AugmentConfig {
  double snr_mean_db = 5.0;
  double snr_std_db = 10.0;
  double level_mean_dbfs = -28.0;
  double level_std_db = 10.0;
  double biquad_coeff_range = kBiquadCoeffRange;
};

/// Draw order is fixed (speech filter, noise filter, SNR, level) so a seed
/// always maps to the same spec.
inline AugmentSpec sample_augment_spec(std::uint64_t seed, const AugmentConfig& cfg) {
  Rng rng(seed);
  AugmentSpec spec;
  spec.seed = seed;
  spec.speech_filter = sample_biquad(rng, cfg.biquad_coeff_range);
  spec.noise_filter = sample_biquad(rng, cfg.biquad_coeff_range);
  spec.snr_db = rng.gaussian(cfg.snr_mean_db, cfg.snr_std_db);
  spec.level_dbfs = rng.gaussian(cfg.level_mean_dbfs, cfg.level_std_db);
  return spec;
}

struct MixResult {
  Waveform mixture;
  double noise_gain = 0.0;
};

/// Scales the noise so the active-level ratio hits snr_db, then adds. Noise
/// may be longer than the speech; its leading segment is used. Active levels
/// are measured on exactly the segments being mixed.
inline MixResult mix_at_snr(const Waveform& speech, const Waveform& noise,
                            double snr_db, const VadConfig& vad) {
  if (noise.size() < speech.size())
    throw Error(ErrorCode::NoiseTooShort, "noise shorter than speech");
  Waveform noise_seg;
  noise_seg.sample_rate_hz = noise.sample_rate_hz;
  noise_seg.samples.assign(noise.samples.begin(),
                           noise.samples.begin() + speech.size());

  const double sigma_speech = active_level(speech, vad).sigma;
  const double sigma_noise = active_level(noise_seg, vad).sigma;
  const double gain = sigma_speech / sigma_noise * db_to_linear(-snr_db);

  MixResult out;
  out.noise_gain = gain;
  out.mixture.sample_rate_hz = speech.sample_rate_hz;
  out.mixture.samples.resize(speech.size());
  for (std::size_t i = 0; i < speech.size(); ++i)
    out.mixture.samples[i] = speech.samples[i] + gain * noise_seg.samples[i];
  return out;
}

struct LevelScaleResult {
  Waveform mixture;
  Waveform target;
  double gain = 0.0;
};

/// One gain, applied to mixture and target alike, placing the target's
/// active level at level_dbfs. The SNR is untouched.
inline LevelScaleResult scale_to_level(const Waveform& mixture, const Waveform& target,
                                       double level_dbfs, const VadConfig& vad) {
  const double sigma_target = active_level(target, vad).sigma;
  const double gain = db_to_linear(level_dbfs) / sigma_target;
  return {scaled(mixture, gain), scaled(target, gain), gain};
}

/// One augmented training example. mixture - target is exactly the scaled,
/// filtered noise.
struct MixedExample {
  Waveform mixture;
  Waveform target;
  AugmentSpec spec;       // with noise_offset resolved
  double sigma_s = 0.0;   // active level of the scaled target
  double noise_gain = 0.0;
  double level_gain = 0.0;
  std::size_t clipped_samples = 0;  // |sample| > 1.0 in mixture or target
};

/// Full pipeline: per-source biquad shaping, noise crop, active-level
/// measurement, SNR mixing, then joint level scaling of mixture and target.
inline MixedExample synthesize_example(const Waveform& speech, const Waveform& noise,
                                       const AugmentSpec& spec, const VadConfig& vad) {
  if (speech.sample_rate_hz != noise.sample_rate_hz)
    throw Error(ErrorCode::InvalidArgument, "speech/noise sample rates differ");
  if (noise.size() < speech.size())
    throw Error(ErrorCode::NoiseTooShort, "noise shorter than speech");

  const Waveform shaped_speech = apply_biquad(speech, spec.speech_filter);
  const Waveform shaped_noise = apply_biquad(noise, spec.noise_filter);

  std::size_t offset;
  if (spec.noise_offset) {
    offset = *spec.noise_offset;
    if (offset + speech.size() > noise.size())
      throw Error(ErrorCode::InvalidArgument, "noise offset out of range");
  } else {
    const std::size_t slack = noise.size() - speech.size();
    Rng rng(mix_bits(spec.seed ^ 0x6e6f697365ULL));  // independent crop stream
    offset = (slack == 0) ? 0 : static_cast<std::size_t>(rng.uniform_index(slack + 1));
  }
  Waveform noise_crop;
  noise_crop.sample_rate_hz = shaped_noise.sample_rate_hz;
  noise_crop.samples.assign(shaped_noise.samples.begin() + offset,
                            shaped_noise.samples.begin() + offset + speech.size());

  MixResult mixed = mix_at_snr(shaped_speech, noise_crop, spec.snr_db, vad);
  LevelScaleResult leveled =
      scale_to_level(mixed.mixture, shaped_speech, spec.level_dbfs, vad);

  MixedExample out;
  out.mixture = std::move(leveled.mixture);
  out.target = std::move(leveled.target);
  out.spec = spec;
  out.spec.noise_offset = offset;
  out.noise_gain = mixed.noise_gain;
  out.level_gain = leveled.gain;
  out.sigma_s = active_level(out.target, vad).sigma;
  for (double s : out.mixture.samples)
    if (std::abs(s) > 1.0) ++out.clipped_samples;
  for (double s : out.target.samples)
    if (std::abs(s) > 1.0) ++out.clipped_samples;
  return out;
}

}  // namespace noiselab
