#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>
#include <string>

#include "noiselab/core.hpp"
#include "noiselab/rng.hpp"
#include "noiselab/waveform.hpp"

namespace noiselab {

/// Deterministic synthetic test signals standing in for recorded corpora.
enum class TestSignalKind { SpeechLike, White, Pink, Tone };

inline TestSignalKind parse_signal_kind(const std::string& name) {
  if (name == "speech-like") return TestSignalKind::SpeechLike;
  if (name == "white") return TestSignalKind::White;
  if (name == "pink") return TestSignalKind::Pink;
  if (name == "tone") return TestSignalKind::Tone;
  throw Error(ErrorCode::InvalidArgument, "unknown signal kind: " + name);
}

namespace detail {

inline Waveform synth_white(std::size_t n, int sr, Rng& rng) {
  Waveform w;
  w.sample_rate_hz = sr;
  w.samples.resize(n);
  for (auto& s : w.samples) s = rng.gaussian(0.0, 0.1);
  return w;
}

// White noise through a cascade of leaky integrators; roughly -3 dB/octave.
inline Waveform synth_pink(std::size_t n, int sr, Rng& rng) {
  Waveform w;
  w.sample_rate_hz = sr;
  w.samples.resize(n);
  double b0 = 0.0, b1 = 0.0, b2 = 0.0;
  for (auto& s : w.samples) {
    const double white = rng.gaussian(0.0, 1.0);
    b0 = 0.99765 * b0 + white * 0.0990460;
    b1 = 0.96300 * b1 + white * 0.2965164;
    b2 = 0.57000 * b2 + white * 1.0526913;
    s = 0.05 * (b0 + b1 + b2 + white * 0.1848);
  }
  return w;
}

inline Waveform synth_tone(std::size_t n, int sr) {
  Waveform w;
  w.sample_rate_hz = sr;
  w.samples.resize(n);
  const double omega = 2.0 * std::numbers::pi * 1000.0 / sr;
  for (std::size_t i = 0; i < n; ++i) w.samples[i] = 0.5 * std::sin(omega * i);
  return w;
}

// Amplitude-modulated harmonic complex with hard pauses between "syllables";
// the pauses guarantee inactive frames for the VAD.
inline Waveform synth_speech_like(std::size_t n, int sr, Rng& rng) {
  Waveform w;
  w.sample_rate_hz = sr;
  w.samples.assign(n, 0.0);
  const int num_harmonics = 10;
  const std::size_t ramp = static_cast<std::size_t>(0.01 * sr);

  std::size_t pos = 0;
  while (pos < n) {
    const std::size_t burst = static_cast<std::size_t>(rng.uniform(0.15, 0.40) * sr);
    const std::size_t pause = static_cast<std::size_t>(rng.uniform(0.12, 0.25) * sr);
    const double f0 = rng.uniform(90.0, 220.0);
    const double vibrato = rng.uniform(2.0, 6.0);
    const double am_rate = rng.uniform(2.5, 5.0);
    const double am_phase = rng.uniform(0.0, 2.0 * std::numbers::pi);
    double phase = rng.uniform(0.0, 2.0 * std::numbers::pi);
    const std::size_t end = std::min(n, pos + burst);
    for (std::size_t i = pos; i < end; ++i) {
      const double t = static_cast<double>(i - pos) / sr;
      const double inst_f0 = f0 * (1.0 + 0.02 * std::sin(2.0 * std::numbers::pi * vibrato * t));
      phase += 2.0 * std::numbers::pi * inst_f0 / sr;
      double sample = 0.0;
      for (int h = 1; h <= num_harmonics; ++h)
        sample += std::sin(h * phase) / (h * h);
      const double am =
          0.55 + 0.45 * std::sin(2.0 * std::numbers::pi * am_rate * t + am_phase);
      // Raised-cosine edges keep burst boundaries click-free.
      double edge = 1.0;
      const std::size_t into = i - pos;
      const std::size_t left = end - 1 - i;
      if (into < ramp) edge = 0.5 - 0.5 * std::cos(std::numbers::pi * into / ramp);
      if (left < ramp)
        edge = std::min(edge, 0.5 - 0.5 * std::cos(std::numbers::pi * left / ramp));
      w.samples[i] = 0.25 * am * edge * sample;
    }
    pos = end + pause;
  }
  return w;
}

}  // namespace detail

/// One synthetic test signal; fully determined by (kind, duration, seed).
/// Speech-like output always contains silent stretches so a threshold VAD
/// sees inactive frames.
inline Waveform synth_test_signal(TestSignalKind kind, double duration_s,
                                  std::uint64_t seed, int sample_rate_hz = 16000) {
  if (duration_s < 0.5)
    throw Error(ErrorCode::InvalidArgument, "duration must be at least 0.5 s");
  const std::size_t n = static_cast<std::size_t>(duration_s * sample_rate_hz);
  Rng rng(mix_bits(seed ^ 0x73796e7468ULL));
  switch (kind) {
    case TestSignalKind::White: return detail::synth_white(n, sample_rate_hz, rng);
    case TestSignalKind::Pink: return detail::synth_pink(n, sample_rate_hz, rng);
    case TestSignalKind::Tone: return detail::synth_tone(n, sample_rate_hz);
    case TestSignalKind::SpeechLike:
      return detail::synth_speech_like(n, sample_rate_hz, rng);
  }
  throw Error(ErrorCode::InvalidArgument, "unknown signal kind");
}

}  // namespace noiselab
