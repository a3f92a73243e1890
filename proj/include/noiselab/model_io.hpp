#pragma once

#include <filesystem>
#include <fstream>
#include <vector>

#include <json.hpp>

#include "noiselab/core.hpp"
#include "noiselab/toy_model.hpp"

namespace noiselab {

/// Checkpoint: weights, bias, and the feature stats the model was trained
/// with, as a single JSON document.
inline void save_model(const ToyMaskModel& model, const std::filesystem::path& path) {
  nlohmann::json j{{"format", "noiselab-toy-model"},
                   {"version", 1},
                   {"input_dim", model.weights.cols()},
                   {"output_dim", model.weights.rows()},
                   {"feature_mean", model.stats.mean},
                   {"feature_variance", model.stats.variance},
                   {"weights", model.weights.data()},
                   {"bias", model.bias}};
  std::ofstream f(path, std::ios::trunc);
  if (!f) throw Error(ErrorCode::IoError, "cannot open for writing: " + path.string());
  f << j.dump() << "\n";
}

inline ToyMaskModel load_model(const std::filesystem::path& path) {
  std::ifstream f(path);
  if (!f) throw Error(ErrorCode::IoError, "cannot open: " + path.string());
  nlohmann::json j;
  f >> j;
  if (j.value("format", "") != "noiselab-toy-model")
    throw Error(ErrorCode::UnsupportedFormat, "not a model checkpoint: " + path.string());
  ToyMaskModel model;
  const std::size_t rows = j.at("output_dim").get<std::size_t>();
  const std::size_t cols = j.at("input_dim").get<std::size_t>();
  model.weights = RealMatrix(rows, cols);
  model.weights.data() = j.at("weights").get<std::vector<double>>();
  if (model.weights.data().size() != rows * cols)
    throw Error(ErrorCode::ShapeMismatch, "weight count mismatch in checkpoint");
  model.bias = j.at("bias").get<std::vector<double>>();
  if (model.bias.size() != rows)
    throw Error(ErrorCode::ShapeMismatch, "bias count mismatch in checkpoint");
  model.stats.mean = j.at("feature_mean").get<double>();
  model.stats.variance = j.at("feature_variance").get<double>();
  return model;
}

/// Plot-ready training trace: one CSV row per epoch.
inline void save_trace_csv(const std::vector<EpochStat>& trace,
                           const std::filesystem::path& path) {
  std::ofstream f(path, std::ios::trunc);
  if (!f) throw Error(ErrorCode::IoError, "cannot open for writing: " + path.string());
  f << "epoch,train_loss,val_si_sdr\n";
  char buf[96];
  for (const EpochStat& s : trace) {
    std::snprintf(buf, sizeof(buf), "%d,%.10g,%.10g\n", s.epoch, s.train_loss,
                  s.val_si_sdr);
    f << buf;
  }
}

}  // namespace noiselab
