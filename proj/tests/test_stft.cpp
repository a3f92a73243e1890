#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <complex>
#include <numbers>
#include <vector>

#include "noiselab/rng.hpp"
#include "noiselab/stft.hpp"

using namespace noiselab;

namespace {

Waveform random_waveform(std::size_t n, std::uint64_t seed, double amp = 0.5) {
  Rng rng(seed);
  Waveform w;
  w.samples.resize(n);
  for (auto& s : w.samples) s = rng.uniform(-amp, amp);
  return w;
}

Waveform sine(std::size_t n, double freq_hz, int sr = 16000, double amp = 1.0) {
  Waveform w;
  w.sample_rate_hz = sr;
  w.samples.resize(n);
  for (std::size_t i = 0; i < n; ++i)
    w.samples[i] = amp * std::sin(2.0 * std::numbers::pi * freq_hz * i / sr);
  return w;
}

// Relative L2 error restricted to [begin, end).
double rel_error(const std::vector<double>& a, const std::vector<double>& b,
                 std::size_t begin, std::size_t end) {
  double num = 0.0, den = 0.0;
  for (std::size_t i = begin; i < end; ++i) {
    num += (a[i] - b[i]) * (a[i] - b[i]);
    den += a[i] * a[i];
  }
  return std::sqrt(num / den);
}

}  // namespace

TEST_CASE("frame config validates geometry") {
  REQUIRE_NOTHROW(make_frame_config());
  REQUIRE_THROWS_AS(make_frame_config(512, 512, 96), Error);   // hop doesn't divide
  REQUIRE_THROWS_AS(make_frame_config(500, 500, 250), Error);  // not a power of two
  const FrameConfig cfg = make_frame_config();
  REQUIRE(cfg.num_bins() == 257);
  REQUIRE(cfg.window.size() == 512);
}

TEST_CASE("sqrt-Hann window satisfies COLA at 50% overlap") {
  const FrameConfig cfg = make_frame_config();
  // Sum of squared windows across overlapping frames, interior samples.
  for (int t = 0; t < cfg.hop; ++t) {
    const double sum = cfg.window[t] * cfg.window[t] +
                       cfg.window[t + cfg.hop] * cfg.window[t + cfg.hop];
    REQUIRE(std::abs(sum - 1.0) < 1e-9);
  }
}

TEST_CASE("stft of DC peaks at bin zero") {
  const FrameConfig cfg = make_frame_config();
  Waveform w;
  w.samples.assign(4096, 1.0);
  const Spectrogram spec = stft(w, cfg);
  // The sqrt-Hann window transform spreads a pure DC input over neighbouring
  // bins (1/3 at k=1, ~1/k^2 beyond), so bin 0 dominates but the leakage
  // floor is finite.
  for (std::size_t n = 0; n < spec.num_frames(); ++n) {
    const double dc = std::abs(spec.bins(0, n));
    REQUIRE(dc > 0.0);
    for (std::size_t k = 1; k < spec.num_bins(); ++k)
      REQUIRE(std::abs(spec.bins(k, n)) < 0.34 * dc);
    for (std::size_t k = 8; k < spec.num_bins(); ++k)
      REQUIRE(std::abs(spec.bins(k, n)) < 0.01 * dc);
  }
}

TEST_CASE("bin-centred sinusoid peaks at its bin") {
  const FrameConfig cfg = make_frame_config();
  // Bin 8 at 16 kHz / 512 = 250 Hz.
  const Waveform w = sine(4096, 250.0);
  const Spectrogram spec = stft(w, cfg);
  for (std::size_t n = 0; n < spec.num_frames(); ++n) {
    std::size_t peak = 0;
    double best = 0.0;
    for (std::size_t k = 0; k < spec.num_bins(); ++k) {
      if (std::abs(spec.bins(k, n)) > best) {
        best = std::abs(spec.bins(k, n));
        peak = k;
      }
    }
    REQUIRE(peak == 8);
  }
}

TEST_CASE("stft rejects too-short input") {
  const FrameConfig cfg = make_frame_config();
  Waveform w;
  w.samples.assign(100, 0.1);
  try {
    stft(w, cfg);
    FAIL("expected InsufficientLength");
  } catch (const Error& e) {
    REQUIRE(e.code() == ErrorCode::InsufficientLength);
  }
}

TEST_CASE("istft rejects wrong row count") {
  const FrameConfig cfg = make_frame_config();
  Spectrogram spec;
  spec.config = cfg;
  spec.bins = ComplexMatrix(100, 4);
  try {
    istft(spec);
    FAIL("expected ShapeMismatch");
  } catch (const Error& e) {
    REQUIRE(e.code() == ErrorCode::ShapeMismatch);
  }
}

TEST_CASE("round trip reconstructs the interior") {
  const FrameConfig cfg = make_frame_config();
  const Waveform w = random_waveform(16000, 42);  // 1 s
  const Waveform back = istft(stft(w, cfg), w.size());
  // Skip one window at each edge.
  const double err = rel_error(w.samples, back.samples, cfg.window_len,
                               w.size() - 2 * cfg.window_len);
  REQUIRE(err <= 1e-6);
}

TEST_CASE("istft of silence is silence") {
  const FrameConfig cfg = make_frame_config();
  Waveform w;
  w.samples.assign(4096, 0.0);
  const Waveform back = istft(stft(w, cfg));
  for (double s : back.samples) REQUIRE(s == 0.0);
}

TEST_CASE("single-frame impulse round trip gives back the impulse") {
  const FrameConfig cfg = make_frame_config();
  Waveform w;
  w.samples.assign(512, 0.0);
  w.samples[200] = 1.0;
  const Spectrogram spec = stft(w, cfg);
  REQUIRE(spec.num_frames() == 1);
  const Waveform back = istft(spec);
  // Window-energy normalization undoes the single analysis window where the
  // window is nonzero.
  for (std::size_t i = 0; i < back.size(); ++i) {
    const double expected = (i == 200) ? 1.0 : 0.0;
    REQUIRE(std::abs(back.samples[i] - expected) < 1e-9);
  }
}

TEST_CASE("stft is linear") {
  const FrameConfig cfg = make_frame_config();
  const Waveform w1 = random_waveform(8000, 1);
  const Waveform w2 = random_waveform(8000, 2);
  const double a = 1.7, b = -0.4;
  Waveform mix;
  mix.samples.resize(8000);
  for (std::size_t i = 0; i < 8000; ++i)
    mix.samples[i] = a * w1.samples[i] + b * w2.samples[i];

  const Spectrogram s1 = stft(w1, cfg);
  const Spectrogram s2 = stft(w2, cfg);
  const Spectrogram sm = stft(mix, cfg);
  double num = 0.0, den = 0.0;
  for (std::size_t i = 0; i < sm.bins.size(); ++i) {
    const std::complex<double> combo = a * s1.bins.data()[i] + b * s2.bins.data()[i];
    num += std::norm(sm.bins.data()[i] - combo);
    den += std::norm(sm.bins.data()[i]);
  }
  REQUIRE(std::sqrt(num / den) < 1e-9);
}

TEST_CASE("one-sided spectrum satisfies Parseval per frame") {
  const FrameConfig cfg = make_frame_config();
  const Waveform w = random_waveform(8000, 7);
  const Spectrogram spec = stft(w, cfg);

  double windowed_energy = 0.0;
  for (std::size_t m = 0; m < spec.num_frames(); ++m)
    for (int i = 0; i < cfg.window_len; ++i) {
      const double v = cfg.window[i] * w.samples[m * cfg.hop + i];
      windowed_energy += v * v;
    }

  double spectral_energy = 0.0;
  const std::size_t nyquist = spec.num_bins() - 1;
  for (std::size_t m = 0; m < spec.num_frames(); ++m) {
    spectral_energy += std::norm(spec.bins(0, m)) + std::norm(spec.bins(nyquist, m));
    for (std::size_t k = 1; k < nyquist; ++k)
      spectral_energy += 2.0 * std::norm(spec.bins(k, m));
  }
  spectral_energy /= cfg.fft_size;
  REQUIRE(std::abs(spectral_energy - windowed_energy) <= 1e-6 * windowed_energy);
}

TEST_CASE("frame rms matches stft frame count and analytic values") {
  const FrameConfig cfg = make_frame_config();

  SECTION("constant signal") {
    Waveform w;
    w.samples.assign(4096, 0.25);
    const auto rms_values = frame_rms(w, cfg);
    REQUIRE(rms_values.size() == stft(w, cfg).num_frames());
    for (double r : rms_values) REQUIRE(std::abs(r - 0.25) < 1e-12);
  }

  SECTION("silence") {
    Waveform w;
    w.samples.assign(4096, 0.0);
    for (double r : frame_rms(w, cfg)) REQUIRE(r == 0.0);
  }

  SECTION("unit sine") {
    const Waveform w = sine(16000, 440.0);
    const auto rms_values = frame_rms(w, cfg);
    for (std::size_t m = 1; m + 1 < rms_values.size(); ++m)
      REQUIRE(std::abs(rms_values[m] - 1.0 / std::sqrt(2.0)) <
              0.01 / std::sqrt(2.0));
  }
}

TEST_CASE("round trip property over random lengths") {
  const FrameConfig cfg = make_frame_config();
  Rng rng(99);
  for (int trial = 0; trial < 8; ++trial) {
    const std::size_t n =
        4 * cfg.window_len + static_cast<std::size_t>(rng.uniform_index(8000));
    const Waveform w = random_waveform(n, 1000 + trial);
    const Waveform back = istft(stft(w, cfg), w.size());
    const std::size_t tail_cover =
        (stft_frame_count(n, cfg) - 1) * cfg.hop + cfg.window_len;
    const double err = rel_error(w.samples, back.samples, cfg.window_len,
                                 std::min(n, tail_cover) - cfg.window_len);
    REQUIRE(err <= 1e-6);
  }
}
