#pragma once

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "noiselab/augment.hpp"
#include "noiselab/core.hpp"
#include "noiselab/enhance.hpp"
#include "noiselab/loss.hpp"
#include "noiselab/metrics.hpp"
#include "noiselab/rng.hpp"
#include "noiselab/stft.hpp"

namespace noiselab {

inline double sigmoid(double z) {
  if (z >= 0.0) return 1.0 / (1.0 + std::exp(-z));
  const double e = std::exp(z);
  return e / (1.0 + e);
}

/// Smallest mask estimator that can exhibit batch-level imbalance: one
/// affine map from a frame's normalized log-power features to that frame's
/// gains, squashed to (0, 1). DC and Nyquist gains are pinned to 1.
struct ToyMaskModel {
  RealMatrix weights;        // [out x in], out == in == bins-2
  std::vector<double> bias;  // [out]
  FeatureStats stats;        // feature normalization used at train time

  std::size_t parameter_count() const { return weights.size() + bias.size(); }

  /// Per-frame gains for a feature matrix; output has two extra pinned rows.
  GainMask gains(const FeatureMatrix& features) const {
    const std::size_t dim = bias.size();
    if (features.values.rows() != dim)
      throw Error(ErrorCode::ShapeMismatch, "feature rows != model input size");
    const std::size_t frames = features.values.cols();
    GainMask mask(dim + 2, frames);
    std::vector<double> z(dim);
    for (std::size_t n = 0; n < frames; ++n) {
      const double* f = features.values.col(n);
      for (std::size_t i = 0; i < dim; ++i) z[i] = bias[i];
      for (std::size_t j = 0; j < dim; ++j) {
        const double* wcol = weights.col(j);
        const double fj = f[j];
        for (std::size_t i = 0; i < dim; ++i) z[i] += wcol[i] * fj;
      }
      double* g = mask.col(n);
      g[0] = 1.0;
      g[dim + 1] = 1.0;
      for (std::size_t i = 0; i < dim; ++i) g[i + 1] = sigmoid(z[i]);
    }
    return mask;
  }
};

inline ToyMaskModel init_toy_model(std::size_t dim, std::uint64_t seed,
                                   const FeatureStats& stats, double weight_scale = 0.01) {
  ToyMaskModel model;
  model.weights = RealMatrix(dim, dim);
  model.bias.assign(dim, 0.0);
  model.stats = stats;
  Rng rng(mix_bits(seed ^ 0x746f796d6f64656cULL));
  for (auto& w : model.weights.data()) w = rng.gaussian(0.0, weight_scale);
  return model;
}

struct TrainOptions {
  double learning_rate = 1e-4;
  int epochs = 100;
  std::size_t batch_size = 8;
  bool normalized_loss = false;  // divide by sigma_s before the loss
  LossConfig loss;
  std::uint64_t seed = 1;
  double init_weight_scale = 0.01;
};

struct EpochStat {
  int epoch = 0;
  double train_loss = 0.0;   // mean per-utterance loss over the epoch
  double val_si_sdr = 0.0;   // mean SI-SDR of enhanced validation utterances
};

struct TrainResult {
  ToyMaskModel model;
  std::vector<EpochStat> trace;
};

/// Supplies one epoch's worth of training examples; called once per epoch so
/// augmentation can be re-drawn on the fly.
using EpochSource = std::function<std::vector<MixedExample>(int epoch)>;

namespace detail {

struct ExampleGrad {
  double loss = 0.0;
  RealMatrix d_weights;
  std::vector<double> d_bias;
};

// Forward + analytic backward for one example: features -> affine -> sigmoid
// -> gain mask -> selected loss. Returns gradients w.r.t. model parameters.
inline ExampleGrad example_gradient(const ToyMaskModel& model, const MixedExample& ex,
                                    const FrameConfig& frame, const TrainOptions& opt,
                                    bool with_grad) {
  const Spectrogram noisy = stft(ex.mixture, frame);
  const Spectrogram clean = stft(ex.target, frame);
  const FeatureMatrix features = extract_features(noisy, model.stats);
  const GainMask mask = model.gains(features);

  const double sigma = opt.normalized_loss ? ex.sigma_s : 1.0;
  const LossReport report = masked_loss(clean, noisy, mask, sigma, opt.loss, with_grad);

  ExampleGrad out;
  out.loss = report.value;
  if (!with_grad) return out;

  const std::size_t dim = model.bias.size();
  out.d_weights = RealMatrix(dim, dim);
  out.d_bias.assign(dim, 0.0);
  std::vector<double> dz(dim);
  for (std::size_t n = 0; n < mask.cols(); ++n) {
    const double* g = mask.col(n);
    const double* dg = report.grad_gain.col(n);
    const double* f = features.values.col(n);
    for (std::size_t i = 0; i < dim; ++i) {
      const double gi = g[i + 1];
      dz[i] = dg[i + 1] * gi * (1.0 - gi);
      out.d_bias[i] += dz[i];
    }
    for (std::size_t j = 0; j < dim; ++j) {
      double* wcol = out.d_weights.col(j);
      const double fj = f[j];
      for (std::size_t i = 0; i < dim; ++i) wcol[i] += dz[i] * fj;
    }
  }
  return out;
}

}  // namespace detail

/// Mean SI-SDR of the model's enhanced output over a validation set.
inline double validate_toy_model(const ToyMaskModel& model,
                                 const std::vector<MixedExample>& validation,
                                 const FrameConfig& frame) {
  double acc = 0.0;
  for (const MixedExample& ex : validation) {
    const Spectrogram noisy = stft(ex.mixture, frame);
    const FeatureMatrix features = extract_features(noisy, model.stats);
    const GainMask mask = model.gains(features);
    const Waveform enhanced = istft(apply_gain(noisy, mask), ex.mixture.size());
    acc += si_sdr(ex.target, enhanced);
  }
  return validation.empty() ? 0.0 : acc / static_cast<double>(validation.size());
}

/// Plain fixed-step gradient descent over on-the-fly batches. Feature stats
/// are computed once from the first epoch's examples and then frozen; the
/// loss variant is selected by opt.normalized_loss and sees the same
/// features either way.
inline TrainResult train_toy_model(const EpochSource& epoch_source,
                                   const std::vector<MixedExample>& validation,
                                   const TrainOptions& opt,
                                   const FrameConfig& frame = make_frame_config()) {
  std::vector<MixedExample> epoch_examples = epoch_source(0);
  if (epoch_examples.empty())
    throw Error(ErrorCode::EmptyCorpus, "epoch source yielded no examples");

  std::vector<Spectrogram> stat_specs;
  stat_specs.reserve(epoch_examples.size());
  for (const MixedExample& ex : epoch_examples)
    stat_specs.push_back(stft(ex.mixture, frame));
  const FeatureStats stats = compute_feature_stats(stat_specs);
  stat_specs.clear();

  const std::size_t dim = static_cast<std::size_t>(frame.num_bins()) - 2;
  TrainResult result;
  result.model = init_toy_model(dim, opt.seed, stats, opt.init_weight_scale);

  for (int epoch = 0; epoch < opt.epochs; ++epoch) {
    if (epoch > 0) epoch_examples = epoch_source(epoch);
    double epoch_loss = 0.0;
    std::size_t seen = 0;
    for (std::size_t begin = 0; begin < epoch_examples.size();
         begin += opt.batch_size) {
      const std::size_t end = std::min(begin + opt.batch_size, epoch_examples.size());
      const double inv_batch = 1.0 / static_cast<double>(end - begin);
      RealMatrix d_weights(dim, dim);
      std::vector<double> d_bias(dim, 0.0);
      for (std::size_t i = begin; i < end; ++i) {
        detail::ExampleGrad grad = detail::example_gradient(
            result.model, epoch_examples[i], frame, opt, /*with_grad=*/true);
        epoch_loss += grad.loss;
        ++seen;
        for (std::size_t k = 0; k < d_weights.size(); ++k)
          d_weights.data()[k] += grad.d_weights.data()[k] * inv_batch;
        for (std::size_t k = 0; k < dim; ++k)
          d_bias[k] += grad.d_bias[k] * inv_batch;
      }
      for (std::size_t k = 0; k < d_weights.size(); ++k)
        result.model.weights.data()[k] -= opt.learning_rate * d_weights.data()[k];
      for (std::size_t k = 0; k < dim; ++k)
        result.model.bias[k] -= opt.learning_rate * d_bias[k];
    }
    EpochStat stat;
    stat.epoch = epoch;
    stat.train_loss = epoch_loss / static_cast<double>(seen);
    if (!std::isfinite(stat.train_loss))
      throw Error(ErrorCode::TrainingDiverged,
                  "loss became non-finite at epoch " + std::to_string(epoch));
    stat.val_si_sdr = validate_toy_model(result.model, validation, frame);
    result.trace.push_back(stat);
  }
  return result;
}

}  // namespace noiselab
