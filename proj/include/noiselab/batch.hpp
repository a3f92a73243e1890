#pragma once

#include <cstddef>
#include <cstdint>
#include <utility>
#include <vector>

#include "noiselab/augment.hpp"
#include "noiselab/manifest.hpp"
#include "noiselab/rng.hpp"
#include "noiselab/synth.hpp"
#include "noiselab/wav_io.hpp"

namespace noiselab {

/// In-memory pool of source signals; everything here is desk scale.
struct SourcePool {
  std::vector<Waveform> items;

  std::size_t size() const { return items.size(); }

  static SourcePool from_manifest(const Manifest& m) {
    SourcePool pool;
    pool.items.reserve(m.size());
    for (const ManifestEntry& e : m.entries) pool.items.push_back(read_wav(e.path));
    return pool;
  }

  static SourcePool synthetic(TestSignalKind kind, std::size_t count,
                              double duration_s, std::uint64_t seed) {
    SourcePool pool;
    pool.items.reserve(count);
    for (std::size_t i = 0; i < count; ++i)
      pool.items.push_back(synth_test_signal(kind, duration_s, derive_seed(seed, 0x706f6f6cULL, i)));
    return pool;
  }
};

/// Deterministic on-the-fly batch recipe: (pools, plan) fully determine the
/// example sequence. Pairings and augmentation draws are re-derived per
/// (seed, epoch, index), so every epoch sees fresh mixtures.
struct BatchPlan {
  std::uint64_t global_seed = 1;
  std::size_t batch_size = 8;
  std::size_t examples_per_epoch = 0;  // 0: one example per speech item
  AugmentConfig aug;
  VadConfig vad;
};

class BatchGenerator {
 public:
  BatchGenerator(SourcePool speech, SourcePool noise, BatchPlan plan)
      : speech_(std::move(speech)), noise_(std::move(noise)), plan_(std::move(plan)) {
    if (speech_.size() == 0 || noise_.size() == 0)
      throw Error(ErrorCode::EmptyCorpus, "speech and noise pools must be nonempty");
  }

  std::size_t examples_per_epoch() const {
    return plan_.examples_per_epoch ? plan_.examples_per_epoch : speech_.size();
  }

  AugmentSpec spec_for(std::uint64_t epoch, std::size_t index) const {
    return sample_augment_spec(derive_seed(plan_.global_seed, epoch, index), plan_.aug);
  }

  /// (speech index, noise index) for one example.
  std::pair<std::size_t, std::size_t> pairing_for(std::uint64_t epoch,
                                                  std::size_t index) const {
    Rng rng(derive_seed(plan_.global_seed ^ 0x7061697272ULL, epoch, index));
    return {static_cast<std::size_t>(rng.uniform_index(speech_.size())),
            static_cast<std::size_t>(rng.uniform_index(noise_.size()))};
  }

  MixedExample example(std::uint64_t epoch, std::size_t index) const {
    const auto [si, ni] = pairing_for(epoch, index);
    return synthesize_example(speech_.items[si], noise_.items[ni],
                              spec_for(epoch, index), plan_.vad);
  }

  /// All examples of one epoch; failed examples (e.g. silent sources) are
  /// skipped and counted rather than aborting the stream.
  std::vector<MixedExample> epoch_examples(std::uint64_t epoch) const {
    std::vector<MixedExample> out;
    const std::size_t n = examples_per_epoch();
    out.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
      try {
        out.push_back(example(epoch, i));
      } catch (const Error&) {
        ++skipped_;
      }
    }
    return out;
  }

  std::size_t skipped() const { return skipped_; }
  const BatchPlan& plan() const { return plan_; }

 private:
  SourcePool speech_;
  SourcePool noise_;
  BatchPlan plan_;
  mutable std::size_t skipped_ = 0;
};

}  // namespace noiselab
