#pragma once

#include <atomic>
#include <cstddef>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include <json.hpp>

#include "noiselab/augment.hpp"
#include "noiselab/batch.hpp"
#include "noiselab/core.hpp"
#include "noiselab/manifest.hpp"
#include "noiselab/wav_io.hpp"

namespace noiselab {

inline constexpr int kSidecarVersion = 1;

/// Sidecar record for one synthesized pair. Every random decision is stored
/// explicitly (never just the seed), so the pair can be regenerated from the
/// sidecar plus the source files even if the RNG implementation changes.
struct Sidecar {
  int schema_version = kSidecarVersion;
  std::string example_id;
  std::string speech_id, speech_path;
  std::string noise_id, noise_path;
  AugmentSpec spec;  // noise_offset resolved
  double vad_threshold_db = -40.0;
  double noise_gain = 0.0;
  double level_gain = 0.0;
  double sigma_s = 0.0;
  std::size_t clipped_samples = 0;
};

inline nlohmann::json sidecar_to_json(const Sidecar& s) {
  if (!s.spec.noise_offset)
    throw Error(ErrorCode::InvalidArgument, "sidecar requires a resolved noise offset");
  return nlohmann::json{
      {"schema_version", s.schema_version},
      {"example_id", s.example_id},
      {"speech", {{"id", s.speech_id}, {"path", s.speech_path}}},
      {"noise", {{"id", s.noise_id}, {"path", s.noise_path}}},
      {"seed", s.spec.seed},
      {"speech_filter", {s.spec.speech_filter.r1, s.spec.speech_filter.r2,
                         s.spec.speech_filter.r3, s.spec.speech_filter.r4}},
      {"noise_filter", {s.spec.noise_filter.r1, s.spec.noise_filter.r2,
                        s.spec.noise_filter.r3, s.spec.noise_filter.r4}},
      {"snr_db", s.spec.snr_db},
      {"level_dbfs", s.spec.level_dbfs},
      {"noise_offset", *s.spec.noise_offset},
      {"vad_threshold_db", s.vad_threshold_db},
      {"noise_gain", s.noise_gain},
      {"level_gain", s.level_gain},
      {"sigma_s", s.sigma_s},
      {"clipped_samples", s.clipped_samples}};
}

inline Sidecar sidecar_from_json(const nlohmann::json& j) {
  Sidecar s;
  s.schema_version = j.at("schema_version").get<int>();
  if (s.schema_version != kSidecarVersion)
    throw Error(ErrorCode::UnsupportedFormat,
                "unknown sidecar schema version " + std::to_string(s.schema_version));
  s.example_id = j.at("example_id").get<std::string>();
  s.speech_id = j.at("speech").at("id").get<std::string>();
  s.speech_path = j.at("speech").at("path").get<std::string>();
  s.noise_id = j.at("noise").at("id").get<std::string>();
  s.noise_path = j.at("noise").at("path").get<std::string>();
  const auto& sf = j.at("speech_filter");
  s.spec.speech_filter = {sf.at(0), sf.at(1), sf.at(2), sf.at(3)};
  const auto& nf = j.at("noise_filter");
  s.spec.noise_filter = {nf.at(0), nf.at(1), nf.at(2), nf.at(3)};
  s.spec.seed = j.at("seed").get<std::uint64_t>();
  s.spec.snr_db = j.at("snr_db").get<double>();
  s.spec.level_dbfs = j.at("level_dbfs").get<double>();
  s.spec.noise_offset = j.at("noise_offset").get<std::size_t>();
  s.vad_threshold_db = j.at("vad_threshold_db").get<double>();
  s.noise_gain = j.at("noise_gain").get<double>();
  s.level_gain = j.at("level_gain").get<double>();
  s.sigma_s = j.at("sigma_s").get<double>();
  s.clipped_samples = j.at("clipped_samples").get<std::size_t>();
  return s;
}

inline Sidecar load_sidecar(const std::filesystem::path& path) {
  std::ifstream f(path);
  if (!f) throw Error(ErrorCode::IoError, "cannot open: " + path.string());
  nlohmann::json j;
  f >> j;
  return sidecar_from_json(j);
}

/// Re-runs the augmentation pipeline from a sidecar's recorded decisions.
inline MixedExample regenerate_example(const Sidecar& s, const VadConfig& vad) {
  const Waveform speech = read_wav(s.speech_path);
  const Waveform noise = read_wav(s.noise_path);
  return synthesize_example(speech, noise, s.spec, vad);
}

struct SynthesisJob {
  Manifest speech;
  Manifest noise;
  BatchPlan plan;           // global seed, distributions, VAD
  std::size_t count = 0;    // examples to render
  int jobs = 1;             // worker threads
  std::filesystem::path out_dir;
};

struct SynthesisSummary {
  std::size_t written = 0;
  std::size_t skipped = 0;
  std::size_t clipped_examples = 0;
  std::vector<std::string> skip_reasons;
};

namespace detail {

inline std::string example_name(std::size_t index) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "ex_%05zu", index);
  return buf;
}

}  // namespace detail

/// Renders `count` augmented pairs to out_dir as <id>_mix.wav, <id>_target.wav
/// and a <id>.json sidecar. Examples are derived per index, so worker count
/// never changes the result; outputs are written in index order by the
/// calling thread.
inline SynthesisSummary synthesize_corpus(const SynthesisJob& job) {
  namespace fs = std::filesystem;
  if (job.count == 0)
    throw Error(ErrorCode::InvalidArgument, "count must be positive");
  fs::create_directories(job.out_dir);

  BatchGenerator gen(SourcePool::from_manifest(job.speech),
                     SourcePool::from_manifest(job.noise), job.plan);

  struct Rendered {
    bool ok = false;
    std::string error;
    MixedExample example;
    std::size_t speech_idx = 0, noise_idx = 0;
  };
  std::vector<Rendered> results(job.count);

  const int workers = std::max(1, job.jobs);
  std::atomic<std::size_t> next{0};
  auto work = [&]() {
    while (true) {
      const std::size_t i = next.fetch_add(1);
      if (i >= job.count) break;
      Rendered& r = results[i];
      const auto [si, ni] = gen.pairing_for(0, i);
      r.speech_idx = si;
      r.noise_idx = ni;
      try {
        r.example = gen.example(0, i);
        r.ok = true;
      } catch (const Error& e) {
        r.error = e.what();
      }
    }
  };
  if (workers == 1) {
    work();
  } else {
    std::vector<std::thread> threads;
    for (int t = 0; t < workers; ++t) threads.emplace_back(work);
    for (auto& t : threads) t.join();
  }

  SynthesisSummary summary;
  for (std::size_t i = 0; i < job.count; ++i) {
    const Rendered& r = results[i];
    const std::string name = detail::example_name(i);
    if (!r.ok) {
      ++summary.skipped;
      summary.skip_reasons.push_back(name + ": " + r.error);
      continue;
    }
    write_wav(job.out_dir / (name + "_mix.wav"), r.example.mixture);
    write_wav(job.out_dir / (name + "_target.wav"), r.example.target);

    Sidecar sc;
    sc.example_id = name;
    sc.speech_id = job.speech.entries[r.speech_idx].id;
    sc.speech_path = job.speech.entries[r.speech_idx].path;
    sc.noise_id = job.noise.entries[r.noise_idx].id;
    sc.noise_path = job.noise.entries[r.noise_idx].path;
    sc.spec = r.example.spec;
    sc.vad_threshold_db = job.plan.vad.threshold_db;
    sc.noise_gain = r.example.noise_gain;
    sc.level_gain = r.example.level_gain;
    sc.sigma_s = r.example.sigma_s;
    sc.clipped_samples = r.example.clipped_samples;
    std::ofstream f(job.out_dir / (name + ".json"), std::ios::trunc);
    f << sidecar_to_json(sc).dump(2) << "\n";

    ++summary.written;
    if (r.example.clipped_samples > 0) ++summary.clipped_examples;
  }
  return summary;
}

}  // namespace noiselab
