// noiselab: corpus synthesis, augmentation debugging, objective evaluation,
// and the desk-scale mask-training experiment.

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "noiselab/noiselab.hpp"

namespace fs = std::filesystem;
using namespace noiselab;

namespace {

enum class LogLevel { Debug = 0, Info = 1, Warn = 2, Error = 3 };

LogLevel g_log_level = LogLevel::Info;

void init_log_level() {
  const char* env = std::getenv("NOISELAB_LOG");
  if (!env) return;
  const std::string v = env;
  if (v == "debug") g_log_level = LogLevel::Debug;
  else if (v == "info") g_log_level = LogLevel::Info;
  else if (v == "warn") g_log_level = LogLevel::Warn;
  else if (v == "error") g_log_level = LogLevel::Error;
}

void log(LogLevel level, const std::string& msg) {
  static const char* names[] = {"debug", "info", "warn", "error"};
  if (level >= g_log_level)
    std::fprintf(stderr, "[%s] %s\n", names[static_cast<int>(level)], msg.c_str());
}

struct CommonOptions {
  std::uint64_t seed = 1;
  std::string config_path;
  std::string out_dir = ".";
  int jobs = 1;
  bool error_json = false;
};

struct PipelineConfig {
  AugmentConfig aug;
  VadConfig vad;
  std::uint64_t seed = 1;
  std::size_t batch_size = 8;
};

PipelineConfig load_pipeline_config(const CommonOptions& common, bool seed_from_cli) {
  PipelineConfig cfg;
  cfg.seed = common.seed;
  if (common.config_path.empty()) return cfg;
  std::ifstream f(common.config_path);
  if (!f) throw Error(ErrorCode::IoError, "cannot open config: " + common.config_path);
  nlohmann::json j;
  f >> j;
  cfg.aug.snr_mean_db = j.value("snr_mean_db", cfg.aug.snr_mean_db);
  cfg.aug.snr_std_db = j.value("snr_std_db", cfg.aug.snr_std_db);
  cfg.aug.level_mean_dbfs = j.value("level_mean_dbfs", cfg.aug.level_mean_dbfs);
  cfg.aug.level_std_db = j.value("level_std_db", cfg.aug.level_std_db);
  cfg.aug.biquad_coeff_range = j.value("biquad_coeff_range", cfg.aug.biquad_coeff_range);
  cfg.vad.threshold_db = j.value("vad_threshold_db", cfg.vad.threshold_db);
  cfg.batch_size = j.value("batch_size", cfg.batch_size);
  if (!seed_from_cli) cfg.seed = j.value("seed", cfg.seed);
  return cfg;
}

void add_common(CLI::App* cmd, CommonOptions& common, bool* seed_given) {
  cmd->add_option("--seed", common.seed, "Global RNG seed")
      ->each([seed_given](const std::string&) { *seed_given = true; });
  cmd->add_option("--config", common.config_path, "Declarative JSON config file");
  cmd->add_option("--out-dir", common.out_dir, "Output directory");
  cmd->add_option("--jobs", common.jobs, "Worker threads")->check(CLI::PositiveNumber);
  cmd->add_flag("--error-json", common.error_json,
                "On failure, print a machine-readable error JSON to stdout");
}

Manifest ingest_dir(const std::string& dir, SourceKind kind) {
  IngestReport report = ingest({fs::path(dir)}, kind);
  for (const std::string& issue : report.issues) log(LogLevel::Warn, issue);
  log(LogLevel::Info, std::string(source_kind_name(kind)) + " manifest: " +
                          std::to_string(report.manifest.size()) + " entries");
  return std::move(report.manifest);
}

// ---------------------------------------------------------------------------
// synthesize
// ---------------------------------------------------------------------------

int run_synthesize(const CommonOptions& common, const PipelineConfig& cfg,
                   const std::string& speech_dir, const std::string& noise_dir,
                   std::size_t count, const std::string& manifest_out) {
  SynthesisJob job;
  job.speech = ingest_dir(speech_dir, SourceKind::Speech);
  job.noise = ingest_dir(noise_dir, SourceKind::Noise);
  job.plan.global_seed = cfg.seed;
  job.plan.aug = cfg.aug;
  job.plan.vad = cfg.vad;
  job.count = count ? count : job.speech.size();
  job.jobs = common.jobs;
  job.out_dir = common.out_dir;

  const SynthesisSummary summary = synthesize_corpus(job);
  for (const std::string& reason : summary.skip_reasons) log(LogLevel::Warn, reason);
  if (!manifest_out.empty()) {
    save_manifest(job.speech, fs::path(common.out_dir) / ("speech_" + manifest_out));
    save_manifest(job.noise, fs::path(common.out_dir) / ("noise_" + manifest_out));
  }
  std::printf("written %zu pairs to %s (skipped %zu, clipping in %zu)\n",
              summary.written, common.out_dir.c_str(), summary.skipped,
              summary.clipped_examples);
  return summary.written > 0 ? 0 : 1;
}

// ---------------------------------------------------------------------------
// augment (single-file debugging + sidecar regeneration)
// ---------------------------------------------------------------------------

int run_augment(const CommonOptions& common, const PipelineConfig& cfg,
                const std::string& in_path, const std::string& out_path,
                const std::vector<double>& filter, std::optional<double> level_dbfs,
                const std::string& sidecar_path) {
  if (!sidecar_path.empty()) {
    const Sidecar sc = load_sidecar(sidecar_path);
    VadConfig vad = cfg.vad;
    vad.threshold_db = sc.vad_threshold_db;
    const MixedExample ex = regenerate_example(sc, vad);
    fs::create_directories(common.out_dir);
    write_wav(fs::path(common.out_dir) / (sc.example_id + "_mix.wav"), ex.mixture);
    write_wav(fs::path(common.out_dir) / (sc.example_id + "_target.wav"), ex.target);
    std::printf("regenerated %s from sidecar\n", sc.example_id.c_str());
    return 0;
  }

  Waveform w = read_wav(in_path);
  if (!filter.empty()) {
    if (filter.size() != 4)
      throw Error(ErrorCode::InvalidArgument, "--filter needs r1,r2,r3,r4");
    w = apply_biquad(w, {filter[0], filter[1], filter[2], filter[3]});
    log(LogLevel::Info, "applied biquad filter");
  }
  if (level_dbfs) {
    const LevelScaleResult scaled = scale_to_level(w, w, *level_dbfs, cfg.vad);
    w = scaled.target;
    log(LogLevel::Info, "scaled to " + std::to_string(*level_dbfs) + " dBFS (gain " +
                            std::to_string(scaled.gain) + ")");
  }
  write_wav(out_path, w);
  std::printf("wrote %s\n", out_path.c_str());
  return 0;
}

// ---------------------------------------------------------------------------
// evaluate
// ---------------------------------------------------------------------------

int run_evaluate(const CommonOptions& common, const std::string& reference_dir,
                 const std::string& estimate_dir, const std::string& out_name,
                 const std::string& format, const std::string& condition) {
  std::map<std::string, fs::path> references;
  for (const auto& entry : fs::directory_iterator(reference_dir))
    if (entry.path().extension() == ".wav")
      references[entry.path().filename().string()] = entry.path();
  if (references.empty())
    throw Error(ErrorCode::EmptyCorpus, "no WAV files in " + reference_dir);

  fs::create_directories(common.out_dir);
  const fs::path out_path = fs::path(common.out_dir) / out_name;
  std::ofstream out(out_path, std::ios::trunc);
  if (!out) throw Error(ErrorCode::IoError, "cannot write " + out_path.string());
  if (format == "csv")
    out << "id,condition,si_sdr_db,fw_seg_snr_db,cepstral_distance,seg_snr_db\n";

  std::size_t done = 0;
  for (const auto& [name, ref_path] : references) {
    const fs::path est_path = fs::path(estimate_dir) / name;
    if (!fs::exists(est_path)) {
      log(LogLevel::Warn, "no estimate for " + name + ", skipped");
      continue;
    }
    const Waveform ref = read_wav(ref_path);
    Waveform est = read_wav(est_path);
    if (est.size() != ref.size()) est.samples.resize(ref.size(), 0.0);
    const MetricReport report = evaluate_pair(ref, est);
    const std::string id = ref_path.stem().string();
    if (format == "csv") {
      char line[256];
      std::snprintf(line, sizeof(line), "%s,%s,%.6f,%.6f,%.6f,%.6f\n", id.c_str(),
                    condition.c_str(), report.si_sdr_db, report.fw_seg_snr_db,
                    report.cepstral_distance, report.seg_snr_db);
      out << line;
    } else {
      out << nlohmann::json{{"id", id},
                            {"condition", condition},
                            {"si_sdr_db", report.si_sdr_db},
                            {"fw_seg_snr_db", report.fw_seg_snr_db},
                            {"cepstral_distance", report.cepstral_distance},
                            {"seg_snr_db", report.seg_snr_db}}
                 .dump()
          << "\n";
    }
    ++done;
  }
  std::printf("evaluated %zu pairs -> %s\n", done, out_path.string().c_str());
  return done > 0 ? 0 : 1;
}

// ---------------------------------------------------------------------------
// train-toy
// ---------------------------------------------------------------------------

struct ToyCorpus {
  SourcePool speech;
  SourcePool noise;
};

ToyCorpus build_toy_corpus(const std::string& speech_dir, const std::string& noise_dir,
                           std::size_t train_utts, double duration_s,
                           std::uint64_t seed) {
  ToyCorpus corpus;
  if (!speech_dir.empty() && !noise_dir.empty()) {
    corpus.speech = SourcePool::from_manifest(ingest_dir(speech_dir, SourceKind::Speech));
    corpus.noise = SourcePool::from_manifest(ingest_dir(noise_dir, SourceKind::Noise));
    return corpus;
  }
  // Synthetic desk-scale corpus: speech-like bursts against white/pink noise.
  corpus.speech = SourcePool::synthetic(TestSignalKind::SpeechLike, train_utts,
                                        duration_s, derive_seed(seed, 0x5350, 0));
  SourcePool white = SourcePool::synthetic(TestSignalKind::White, (train_utts + 1) / 2,
                                           duration_s + 0.5, derive_seed(seed, 0x4e57, 0));
  SourcePool pink = SourcePool::synthetic(TestSignalKind::Pink, train_utts / 2,
                                          duration_s + 0.5, derive_seed(seed, 0x4e50, 0));
  corpus.noise.items = std::move(white.items);
  for (auto& w : pink.items) corpus.noise.items.push_back(std::move(w));
  return corpus;
}

int run_train_toy(const CommonOptions& common, const PipelineConfig& cfg,
                  const std::string& loss_kind, bool level_aug,
                  const std::string& speech_dir, const std::string& noise_dir,
                  int epochs, double learning_rate, std::size_t train_utts,
                  std::size_t val_utts, double duration_s) {
  AugmentConfig aug = cfg.aug;
  if (!level_aug) aug.level_std_db = 0.0;

  const ToyCorpus corpus =
      build_toy_corpus(speech_dir, noise_dir, train_utts, duration_s, cfg.seed);

  BatchPlan train_plan;
  train_plan.global_seed = derive_seed(cfg.seed, 0x545241494eULL, 0);
  train_plan.batch_size = cfg.batch_size;
  train_plan.aug = aug;
  train_plan.vad = cfg.vad;
  BatchGenerator train_gen(corpus.speech, corpus.noise, train_plan);

  // Validation set: same generator recipe under an independent seed, built
  // once; identical for both loss variants at a given --seed.
  BatchPlan val_plan = train_plan;
  val_plan.global_seed = derive_seed(cfg.seed, 0x56414cULL, 1);
  val_plan.examples_per_epoch = val_utts;
  BatchGenerator val_gen(corpus.speech, corpus.noise, val_plan);
  const std::vector<MixedExample> validation = val_gen.epoch_examples(0);

  TrainOptions opt;
  opt.learning_rate = learning_rate;
  opt.epochs = epochs;
  opt.batch_size = cfg.batch_size;
  opt.normalized_loss = (loss_kind == "normalized");
  opt.seed = cfg.seed;

  log(LogLevel::Info, "training toy model: loss=" + loss_kind +
                          " level_aug=" + (level_aug ? "on" : "off") +
                          " epochs=" + std::to_string(epochs));
  const TrainResult result = train_toy_model(
      [&](int epoch) { return train_gen.epoch_examples(static_cast<std::uint64_t>(epoch)); },
      validation, opt);

  fs::create_directories(common.out_dir);
  const std::string tag = loss_kind + (level_aug ? "_levelaug" : "_nolevelaug") +
                          "_seed" + std::to_string(cfg.seed);
  save_model(result.model, fs::path(common.out_dir) / ("model_" + tag + ".json"));
  save_trace_csv(result.trace, fs::path(common.out_dir) / ("trace_" + tag + ".csv"));

  const double final_val = result.trace.empty() ? 0.0 : result.trace.back().val_si_sdr;
  std::printf("final val SI-SDR: %.4f dB (loss=%s, level-aug=%s, seed=%llu)\n",
              final_val, loss_kind.c_str(), level_aug ? "on" : "off",
              static_cast<unsigned long long>(cfg.seed));
  std::printf("trace: %s\n",
              (fs::path(common.out_dir) / ("trace_" + tag + ".csv")).string().c_str());
  return 0;
}

// ---------------------------------------------------------------------------
// synth-signal
// ---------------------------------------------------------------------------

int run_synth_signal(const CommonOptions& common, const std::string& kind,
                     double duration_s, const std::string& out_name,
                     std::size_t count) {
  fs::create_directories(common.out_dir);
  for (std::size_t i = 0; i < count; ++i) {
    const Waveform w = synth_test_signal(parse_signal_kind(kind), duration_s,
                                         derive_seed(common.seed, 0x534947ULL, i));
    std::string name = out_name;
    if (count > 1) {
      char buf[32];
      std::snprintf(buf, sizeof(buf), "_%03zu", i);
      const std::size_t dot = name.rfind('.');
      name.insert(dot == std::string::npos ? name.size() : dot, buf);
    }
    write_wav(fs::path(common.out_dir) / name, w);
  }
  std::printf("wrote %zu %s signal(s) to %s\n", count, kind.c_str(),
              common.out_dir.c_str());
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  init_log_level();
  CLI::App app{"noiselab: speech-enhancement corpus synthesis and evaluation"};
  app.require_subcommand(1);

  CommonOptions common;
  bool seed_given = false;

  // synthesize ---------------------------------------------------------
  auto* synth_cmd = app.add_subcommand(
      "synthesize", "Render augmented mixture/target pairs with sidecars");
  std::string speech_dir, noise_dir, manifest_out;
  std::size_t count = 0;
  synth_cmd->add_option("--speech-dir", speech_dir, "Directory of speech WAVs")
      ->required();
  synth_cmd->add_option("--noise-dir", noise_dir, "Directory of noise WAVs")
      ->required();
  synth_cmd->add_option("--count", count, "Number of pairs (default: one per speech file)");
  synth_cmd->add_option("--write-manifests", manifest_out,
                        "Also save ingested manifests under this name");
  add_common(synth_cmd, common, &seed_given);

  // augment ------------------------------------------------------------
  auto* augment_cmd = app.add_subcommand(
      "augment", "Apply individual augmentation stages to one WAV, or "
                 "regenerate a pair from a sidecar");
  std::string in_path, out_path = "augmented.wav", sidecar_path;
  std::vector<double> filter;
  double level_dbfs_value = 0.0;
  augment_cmd->add_option("--in", in_path, "Input WAV");
  augment_cmd->add_option("--out", out_path, "Output WAV path");
  augment_cmd->add_option("--filter", filter, "Biquad coefficients r1,r2,r3,r4")
      ->delimiter(',')
      ->expected(0, 4);
  auto* level_opt = augment_cmd->add_option("--level-dbfs", level_dbfs_value,
                                            "Scale active level to this dBFS");
  augment_cmd->add_option("--sidecar", sidecar_path,
                          "Regenerate the pair recorded in this sidecar JSON");
  add_common(augment_cmd, common, &seed_given);

  // evaluate -----------------------------------------------------------
  auto* eval_cmd = app.add_subcommand(
      "evaluate", "Objective metrics for matching reference/estimate WAVs");
  std::string reference_dir, estimate_dir, out_name = "metrics.csv";
  std::string format = "csv", condition = "default";
  eval_cmd->add_option("--reference-dir", reference_dir, "Reference WAVs")->required();
  eval_cmd->add_option("--estimate-dir", estimate_dir, "Estimate WAVs")->required();
  eval_cmd->add_option("--out", out_name, "Report file name");
  eval_cmd->add_option("--format", format, "csv or json")
      ->check(CLI::IsMember({"csv", "json"}));
  eval_cmd->add_option("--condition", condition, "Condition label column");
  add_common(eval_cmd, common, &seed_given);

  // train-toy ----------------------------------------------------------
  auto* train_cmd = app.add_subcommand(
      "train-toy", "Desk-scale mask-estimator training comparing loss variants");
  std::string loss_kind = "standard", level_aug = "on";
  std::string train_speech_dir, train_noise_dir;
  int epochs = 120;
  double learning_rate = 4e-5;
  std::size_t train_utts = 16, val_utts = 8;
  double duration_s = 1.0;
  train_cmd->add_option("--loss", loss_kind, "standard or normalized")
      ->check(CLI::IsMember({"standard", "normalized"}));
  train_cmd->add_option("--level-aug", level_aug, "on or off")
      ->check(CLI::IsMember({"on", "off"}));
  train_cmd->add_option("--speech-dir", train_speech_dir,
                        "Speech WAVs (default: synthetic corpus)");
  train_cmd->add_option("--noise-dir", train_noise_dir,
                        "Noise WAVs (default: synthetic corpus)");
  train_cmd->add_option("--epochs", epochs, "Training epochs");
  train_cmd->add_option("--learning-rate", learning_rate, "Gradient-descent step");
  train_cmd->add_option("--train-utts", train_utts, "Synthetic training utterances");
  train_cmd->add_option("--val-utts", val_utts, "Validation utterances");
  train_cmd->add_option("--duration", duration_s, "Synthetic utterance seconds");
  add_common(train_cmd, common, &seed_given);

  // synth-signal -------------------------------------------------------
  auto* sig_cmd = app.add_subcommand(
      "synth-signal", "Write deterministic synthetic test signals");
  std::string kind = "speech-like", sig_out = "signal.wav";
  double sig_duration = 2.0;
  std::size_t sig_count = 1;
  sig_cmd->add_option("--kind", kind, "speech-like, white, pink, or tone")
      ->check(CLI::IsMember({"speech-like", "white", "pink", "tone"}));
  sig_cmd->add_option("--duration", sig_duration, "Seconds");
  sig_cmd->add_option("--name", sig_out, "Output file name");
  sig_cmd->add_option("--count", sig_count, "How many signals (suffix _NNN)");
  add_common(sig_cmd, common, &seed_given);

  CLI11_PARSE(app, argc, argv);

  try {
    const PipelineConfig cfg = load_pipeline_config(common, seed_given);
    if (synth_cmd->parsed())
      return run_synthesize(common, cfg, speech_dir, noise_dir, count, manifest_out);
    if (augment_cmd->parsed()) {
      std::optional<double> level;
      if (level_opt->count() > 0) level = level_dbfs_value;
      return run_augment(common, cfg, in_path, out_path, filter, level, sidecar_path);
    }
    if (eval_cmd->parsed())
      return run_evaluate(common, reference_dir, estimate_dir, out_name, format,
                          condition);
    if (train_cmd->parsed())
      return run_train_toy(common, cfg, loss_kind, level_aug == "on",
                           train_speech_dir, train_noise_dir, epochs, learning_rate,
                           train_utts, val_utts, duration_s);
    if (sig_cmd->parsed())
      return run_synth_signal(common, kind, sig_duration, sig_out, sig_count);
  } catch (const Error& e) {
    if (common.error_json)
      std::printf("%s\n", nlohmann::json{{"error", e.code_name()},
                                         {"message", e.what()}}
                              .dump()
                              .c_str());
    log(LogLevel::Error, e.what());
    return 1;
  } catch (const std::exception& e) {
    if (common.error_json)
      std::printf("%s\n",
                  nlohmann::json{{"error", "Unhandled"}, {"message", e.what()}}
                      .dump()
                      .c_str());
    log(LogLevel::Error, e.what());
    return 1;
  }
  return 0;
}
