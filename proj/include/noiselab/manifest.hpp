#pragma once

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <set>
#include <string>
#include <vector>

#include <json.hpp>

#include "noiselab/core.hpp"
#include "noiselab/wav_io.hpp"

namespace noiselab {

enum class SourceKind { Speech, Noise };

inline const char* source_kind_name(SourceKind kind) {
  return kind == SourceKind::Speech ? "speech" : "noise";
}

inline SourceKind parse_source_kind(const std::string& name) {
  if (name == "speech") return SourceKind::Speech;
  if (name == "noise") return SourceKind::Noise;
  throw Error(ErrorCode::InvalidArgument, "unknown source kind: " + name);
}

struct ManifestEntry {
  std::string id;
  std::string path;
  SourceKind kind = SourceKind::Speech;
  double duration_s = 0.0;
  int sample_rate_hz = 0;
};

inline constexpr int kManifestVersion = 1;

struct Manifest {
  std::vector<ManifestEntry> entries;
  int version = kManifestVersion;

  std::size_t size() const { return entries.size(); }
  bool empty() const { return entries.empty(); }
};

struct IngestReport {
  Manifest manifest;
  std::vector<std::string> issues;  // skipped files with reasons
};

/// Scans paths (files or directories) for WAV files, validating that each
/// decodes at the expected sample rate. Decode failures are collected as
/// issues, not fatal; duplicate ids keep the first occurrence.
inline IngestReport ingest(const std::vector<std::filesystem::path>& paths,
                           SourceKind kind, int expected_rate_hz = 16000) {
  namespace fs = std::filesystem;
  std::vector<fs::path> files;
  for (const fs::path& p : paths) {
    if (fs::is_directory(p)) {
      for (const auto& entry : fs::directory_iterator(p))
        if (entry.is_regular_file() && entry.path().extension() == ".wav")
          files.push_back(entry.path());
    } else if (fs::exists(p)) {
      files.push_back(p);
    }
  }
  std::sort(files.begin(), files.end());

  IngestReport report;
  std::set<std::string> seen;
  for (const fs::path& file : files) {
    const std::string id = file.stem().string();
    if (!seen.insert(id).second) {
      report.issues.push_back(file.string() + ": duplicate id '" + id + "', skipped");
      continue;
    }
    try {
      const Waveform w = read_wav(file);
      if (w.sample_rate_hz != expected_rate_hz)
        throw Error(ErrorCode::UnsupportedFormat,
                    "sample rate " + std::to_string(w.sample_rate_hz) + " != " +
                        std::to_string(expected_rate_hz) + " (resampling unsupported)");
      ManifestEntry entry;
      entry.id = id;
      entry.path = file.string();
      entry.kind = kind;
      entry.duration_s = w.duration_s();
      entry.sample_rate_hz = w.sample_rate_hz;
      report.manifest.entries.push_back(std::move(entry));
    } catch (const Error& e) {
      report.issues.push_back(file.string() + ": " + e.what());
    }
  }
  if (report.manifest.empty())
    throw Error(ErrorCode::EmptyCorpus, "no usable WAV files found");
  return report;
}

/// JSON-lines manifest, one entry per line.
inline void save_manifest(const Manifest& m, const std::filesystem::path& path) {
  std::ofstream f(path, std::ios::trunc);
  if (!f) throw Error(ErrorCode::IoError, "cannot open for writing: " + path.string());
  for (const ManifestEntry& e : m.entries) {
    nlohmann::json j{{"id", e.id},
                     {"path", e.path},
                     {"kind", source_kind_name(e.kind)},
                     {"duration_s", e.duration_s},
                     {"sample_rate", e.sample_rate_hz},
                     {"version", m.version}};
    f << j.dump() << "\n";
  }
}

/// Loads a manifest from JSON lines (.jsonl) or CSV with a header row.
inline Manifest load_manifest(const std::filesystem::path& path) {
  std::ifstream f(path);
  if (!f) throw Error(ErrorCode::IoError, "cannot open: " + path.string());
  Manifest m;
  std::string line;
  const bool csv = path.extension() == ".csv";
  bool header_skipped = false;
  while (std::getline(f, line)) {
    if (line.empty()) continue;
    ManifestEntry e;
    if (csv) {
      if (!header_skipped) {
        header_skipped = true;
        continue;
      }
      std::vector<std::string> fields;
      std::size_t start = 0;
      while (true) {
        const std::size_t comma = line.find(',', start);
        fields.push_back(line.substr(start, comma - start));
        if (comma == std::string::npos) break;
        start = comma + 1;
      }
      if (fields.size() < 5)
        throw Error(ErrorCode::InvalidArgument, "bad CSV manifest row: " + line);
      e.id = fields[0];
      e.path = fields[1];
      e.kind = parse_source_kind(fields[2]);
      e.duration_s = std::stod(fields[3]);
      e.sample_rate_hz = std::stoi(fields[4]);
    } else {
      const nlohmann::json j = nlohmann::json::parse(line);
      e.id = j.at("id").get<std::string>();
      e.path = j.at("path").get<std::string>();
      e.kind = parse_source_kind(j.at("kind").get<std::string>());
      e.duration_s = j.at("duration_s").get<double>();
      e.sample_rate_hz = j.at("sample_rate").get<int>();
    }
    m.entries.push_back(std::move(e));
  }
  if (m.empty()) throw Error(ErrorCode::EmptyCorpus, "manifest has no entries");
  std::set<std::string> ids;
  int rate = 0;
  for (const ManifestEntry& e : m.entries) {
    if (!ids.insert(e.id).second)
      throw Error(ErrorCode::InvalidArgument, "duplicate manifest id: " + e.id);
    if (rate == 0) rate = e.sample_rate_hz;
    if (e.sample_rate_hz != rate)
      throw Error(ErrorCode::InvalidArgument, "mixed sample rates in manifest");
  }
  return m;
}

}  // namespace noiselab
