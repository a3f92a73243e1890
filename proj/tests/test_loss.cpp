#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <complex>
#include <vector>

#include "noiselab/enhance.hpp"
#include "noiselab/loss.hpp"
#include "noiselab/rng.hpp"

using namespace noiselab;

namespace {

Spectrogram random_spec(std::size_t rows, std::size_t cols, std::uint64_t seed,
                        double min_mag = 0.05, double max_mag = 1.0) {
  Rng rng(seed);
  Spectrogram spec;
  spec.config = make_frame_config();
  spec.bins = ComplexMatrix(rows, cols);
  for (auto& v : spec.bins.data()) {
    const double mag = rng.uniform(min_mag, max_mag);
    const double phase = rng.uniform(0.0, 2.0 * 3.141592653589793);
    v = std::polar(mag, phase);
  }
  return spec;
}

RealMatrix random_gain(std::size_t rows, std::size_t cols, std::uint64_t seed,
                       double lo = 0.1, double hi = 0.9) {
  Rng rng(seed);
  RealMatrix g(rows, cols);
  for (auto& v : g.data()) v = rng.uniform(lo, hi);
  return g;
}

// Independent reference for the compressed loss: literal element-by-element
// evaluation via polar decomposition, sharing no code with the library path.
double reference_loss(const Spectrogram& clean, const Spectrogram& estimate,
                      double c, double alpha) {
  double complex_sum = 0.0, magnitude_sum = 0.0;
  for (std::size_t i = 0; i < clean.bins.size(); ++i) {
    const std::complex<double> s = clean.bins.data()[i];
    const std::complex<double> e = estimate.bins.data()[i];
    const std::complex<double> cs = std::polar(std::pow(std::abs(s), c), std::arg(s));
    const std::complex<double> ce = std::polar(std::pow(std::abs(e), c), std::arg(e));
    complex_sum += std::norm(cs - ce);
    const double md = std::pow(std::abs(s), c) - std::pow(std::abs(e), c);
    magnitude_sum += md * md;
  }
  return alpha * complex_sum + (1.0 - alpha) * magnitude_sum;
}

}  // namespace

TEST_CASE("loss is zero when the estimate equals the reference") {
  const Spectrogram s = random_spec(8, 8, 1);
  const LossReport report = compressed_loss(s, s);
  REQUIRE(report.value == 0.0);
  REQUIRE(report.complex_term == 0.0);
  REQUIRE(report.magnitude_term == 0.0);
}

TEST_CASE("single unit-magnitude bin against zero estimate gives exactly one") {
  Spectrogram s, e;
  s.config = e.config = make_frame_config();
  s.bins = ComplexMatrix(1, 1, std::complex<double>(1.0, 0.0));
  e.bins = ComplexMatrix(1, 1, std::complex<double>(0.0, 0.0));
  for (double alpha : {0.0, 0.3, 0.5, 1.0}) {
    LossConfig cfg;
    cfg.complex_weight = alpha;
    REQUIRE(compressed_loss(s, e, cfg).value == Catch::Approx(1.0).epsilon(1e-12));
  }
}

TEST_CASE("implementation agrees with the brute-force reference") {
  for (int trial = 0; trial < 100; ++trial) {
    const Spectrogram s = random_spec(8, 8, 1000 + trial);
    const Spectrogram e = random_spec(8, 8, 2000 + trial);
    const LossConfig cfg;
    const double expected =
        reference_loss(s, e, cfg.compression, cfg.complex_weight);
    const double actual = compressed_loss(s, e, cfg).value;
    REQUIRE(actual == Catch::Approx(expected).epsilon(1e-9));
  }
}

TEST_CASE("value decomposes into the blended terms on an alpha grid") {
  const Spectrogram s = random_spec(16, 10, 11);
  const Spectrogram e = random_spec(16, 10, 12);
  double ct = -1.0, mt = -1.0;
  for (double alpha : {0.0, 0.3, 0.5, 1.0}) {
    LossConfig cfg;
    cfg.complex_weight = alpha;
    const LossReport report = compressed_loss(s, e, cfg);
    REQUIRE(report.value ==
            Catch::Approx(alpha * report.complex_term +
                          (1.0 - alpha) * report.magnitude_term)
                .epsilon(1e-9));
    // The terms themselves do not depend on the blend factor.
    if (ct >= 0.0) {
      REQUIRE(report.complex_term == ct);
      REQUIRE(report.magnitude_term == mt);
    }
    ct = report.complex_term;
    mt = report.magnitude_term;
  }
}

TEST_CASE("shape mismatch is rejected") {
  const Spectrogram s = random_spec(8, 8, 1);
  const Spectrogram e = random_spec(8, 7, 2);
  try {
    compressed_loss(s, e);
    FAIL("expected ShapeMismatch");
  } catch (const Error& err) {
    REQUIRE(err.code() == ErrorCode::ShapeMismatch);
  }
}

TEST_CASE("unnormalized loss scales as a^(2c)") {
  const Spectrogram s = random_spec(8, 8, 21);
  const Spectrogram e = random_spec(8, 8, 22);
  const LossConfig cfg;
  const double base = compressed_loss(s, e, cfg).value;
  for (double a : {10.0, 100.0}) {
    Spectrogram sa = s, ea = e;
    for (auto& v : sa.bins.data()) v *= a;
    for (auto& v : ea.bins.data()) v *= a;
    const double expected = std::pow(a, 2.0 * cfg.compression) * base;
    REQUIRE(compressed_loss(sa, ea, cfg).value ==
            Catch::Approx(expected).epsilon(0.01));
  }
}

TEST_CASE("sigma of one reduces the normalized loss to the standard one") {
  const Spectrogram s = random_spec(8, 8, 31);
  const Spectrogram x = random_spec(8, 8, 32);
  const RealMatrix g = random_gain(8, 8, 33);
  const double normalized = normalized_loss(s, x, g, 1.0).value;
  const double standard = compressed_loss(s, apply_gain(x, g)).value;
  REQUIRE(normalized == Catch::Approx(standard).epsilon(1e-12));
}

TEST_CASE("joint scaling of signals and sigma cancels exactly") {
  const Spectrogram s = random_spec(8, 8, 41);
  const Spectrogram x = random_spec(8, 8, 42);
  const RealMatrix g = random_gain(8, 8, 43);
  const double sigma = 0.07;
  const double base = normalized_loss(s, x, g, sigma).value;
  for (double a : {1e-2, 1e2, 100.0}) {
    Spectrogram sa = s, xa = x;
    for (auto& v : sa.bins.data()) v *= a;
    for (auto& v : xa.bins.data()) v *= a;
    const double scaled = normalized_loss(sa, xa, g, a * sigma).value;
    REQUIRE(scaled == Catch::Approx(base).epsilon(1e-9));
  }
}

TEST_CASE("two utterances 40 dB apart: normalized equal, standard ~a^(2c) apart") {
  const LossConfig cfg;
  const Spectrogram s = random_spec(8, 8, 51);
  const Spectrogram x = random_spec(8, 8, 52);
  const RealMatrix g = random_gain(8, 8, 53);
  const double sigma = 0.1;
  const double a = 100.0;  // 40 dB
  Spectrogram s_loud = s, x_loud = x;
  for (auto& v : s_loud.bins.data()) v *= a;
  for (auto& v : x_loud.bins.data()) v *= a;

  const double norm_soft = normalized_loss(s, x, g, sigma, cfg).value;
  const double norm_loud = normalized_loss(s_loud, x_loud, g, a * sigma, cfg).value;
  REQUIRE(norm_loud == Catch::Approx(norm_soft).epsilon(1e-6));

  const double std_soft = compressed_loss(s, apply_gain(x, g), cfg).value;
  const double std_loud = compressed_loss(s_loud, apply_gain(x_loud, g), cfg).value;
  REQUIRE(std_loud / std_soft ==
          Catch::Approx(std::pow(a, 2.0 * cfg.compression)).epsilon(0.01));
}

TEST_CASE("nonpositive sigma is rejected") {
  const Spectrogram s = random_spec(4, 4, 61);
  const Spectrogram x = random_spec(4, 4, 62);
  const RealMatrix g = random_gain(4, 4, 63);
  try {
    normalized_loss(s, x, g, 0.0);
    FAIL("expected NonPositiveSigma");
  } catch (const Error& err) {
    REQUIRE(err.code() == ErrorCode::NonPositiveSigma);
  }
}

TEST_CASE("gradient vanishes at the exact mask on noiseless input") {
  const Spectrogram s = random_spec(8, 8, 71);
  const RealMatrix ones(8, 8, 1.0);
  // Noisy equals clean, gain of one: estimate == reference.
  const RealMatrix grad = loss_grad_gain(s, s, ones, LossConfig{});
  for (double v : grad.data()) REQUIRE(std::abs(v) < 1e-9);
}

TEST_CASE("analytic gradient matches central finite differences") {
  const LossConfig cfg;
  const double step = 1e-5;
  for (bool normalized : {false, true}) {
    const double sigma = normalized ? 0.3 : 1.0;
    for (int trial = 0; trial < 10; ++trial) {
      const Spectrogram s = random_spec(6, 5, 8000 + trial, 0.1, 1.0);
      const Spectrogram x = random_spec(6, 5, 9000 + trial, 0.1, 1.0);
      RealMatrix g = random_gain(6, 5, 9900 + trial);
      const RealMatrix grad = loss_grad_gain(s, x, g, cfg, normalized, sigma);

      auto forward = [&](const RealMatrix& gain) {
        if (normalized) return normalized_loss(s, x, gain, sigma, cfg).value;
        return compressed_loss(s, apply_gain(x, gain), cfg).value;
      };

      double max_rel = 0.0;
      for (std::size_t i = 0; i < g.size(); ++i) {
        RealMatrix plus = g, minus = g;
        plus.data()[i] += step;
        minus.data()[i] -= step;
        const double fd = (forward(plus) - forward(minus)) / (2.0 * step);
        const double denom = std::max({std::abs(fd), std::abs(grad.data()[i]), 1e-10});
        max_rel = std::max(max_rel, std::abs(grad.data()[i] - fd) / denom);
      }
      REQUIRE(max_rel <= 1e-4);
    }
  }
}

TEST_CASE("gradient of the normalized loss is invariant to joint scaling") {
  const LossConfig cfg;
  const Spectrogram s = random_spec(6, 6, 81);
  const Spectrogram x = random_spec(6, 6, 82);
  const RealMatrix g = random_gain(6, 6, 83);
  const double sigma = 0.2;
  const RealMatrix base = loss_grad_gain(s, x, g, cfg, true, sigma);

  const double a = 37.5;
  Spectrogram sa = s, xa = x;
  for (auto& v : sa.bins.data()) v *= a;
  for (auto& v : xa.bins.data()) v *= a;
  const RealMatrix scaled = loss_grad_gain(sa, xa, g, cfg, true, a * sigma);
  for (std::size_t i = 0; i < base.size(); ++i)
    REQUIRE(scaled.data()[i] == Catch::Approx(base.data()[i]).epsilon(1e-9).margin(1e-12));
}

TEST_CASE("mean reduction rescales value and gradient consistently") {
  const Spectrogram s = random_spec(8, 4, 91);
  const Spectrogram x = random_spec(8, 4, 92);
  const RealMatrix g = random_gain(8, 4, 93);
  LossConfig sum_cfg, mean_cfg;
  mean_cfg.reduction = BinReduction::Mean;
  const LossReport sum_report = normalized_loss(s, x, g, 0.5, sum_cfg);
  const LossReport mean_report = normalized_loss(s, x, g, 0.5, mean_cfg);
  const double n = static_cast<double>(s.bins.size());
  REQUIRE(mean_report.value == Catch::Approx(sum_report.value / n).epsilon(1e-12));
  for (std::size_t i = 0; i < g.size(); ++i)
    REQUIRE(mean_report.grad_gain.data()[i] ==
            Catch::Approx(sum_report.grad_gain.data()[i] / n).epsilon(1e-12));
}

TEST_CASE("loss is nonnegative and positive when signals differ") {
  for (int trial = 0; trial < 20; ++trial) {
    const Spectrogram s = random_spec(8, 8, 300 + trial);
    const Spectrogram e = random_spec(8, 8, 400 + trial);
    const double v = compressed_loss(s, e).value;
    REQUIRE(v >= 0.0);
    REQUIRE(v > 0.0);
  }
}
