#pragma once

#include <bit>
#include <cstdint>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include "noiselab/core.hpp"
#include "noiselab/waveform.hpp"

namespace noiselab {

namespace detail {

static_assert(std::endian::native == std::endian::little,
              "WAV I/O assumes a little-endian host");

template <typename T>
void put_le(std::string& out, T value) {
  char bytes[sizeof(T)];
  std::memcpy(bytes, &value, sizeof(T));
  out.append(bytes, sizeof(T));
}

template <typename T>
T get_le(const char* p) {
  T value;
  std::memcpy(&value, p, sizeof(T));
  return value;
}

}  // namespace detail

/// Writes mono IEEE float32 WAV. Samples beyond full scale are written as-is;
/// float encoding does not clip.
inline void write_wav(const std::filesystem::path& path, const Waveform& w) {
  const std::uint32_t n = static_cast<std::uint32_t>(w.size());
  const std::uint32_t data_bytes = n * 4;
  std::string out;
  out.reserve(58 + data_bytes);
  out.append("RIFF");
  detail::put_le<std::uint32_t>(out, 4 + 26 + 12 + 8 + data_bytes);
  out.append("WAVE");
  out.append("fmt ");
  detail::put_le<std::uint32_t>(out, 18);
  detail::put_le<std::uint16_t>(out, 3);  // IEEE float
  detail::put_le<std::uint16_t>(out, 1);  // mono
  detail::put_le<std::uint32_t>(out, static_cast<std::uint32_t>(w.sample_rate_hz));
  detail::put_le<std::uint32_t>(out, static_cast<std::uint32_t>(w.sample_rate_hz) * 4);
  detail::put_le<std::uint16_t>(out, 4);
  detail::put_le<std::uint16_t>(out, 32);
  detail::put_le<std::uint16_t>(out, 0);  // cbSize
  out.append("fact");
  detail::put_le<std::uint32_t>(out, 4);
  detail::put_le<std::uint32_t>(out, n);
  out.append("data");
  detail::put_le<std::uint32_t>(out, data_bytes);
  for (double s : w.samples)
    detail::put_le<float>(out, static_cast<float>(s));

  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) throw Error(ErrorCode::IoError, "cannot open for writing: " + path.string());
  f.write(out.data(), static_cast<std::streamsize>(out.size()));
  if (!f) throw Error(ErrorCode::IoError, "short write: " + path.string());
}

/// Reads mono WAV; accepts IEEE float32 and 16-bit PCM.
inline Waveform read_wav(const std::filesystem::path& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw Error(ErrorCode::IoError, "cannot open: " + path.string());
  std::string buf((std::istreambuf_iterator<char>(f)),
                  std::istreambuf_iterator<char>());
  if (buf.size() < 44 || buf.compare(0, 4, "RIFF") != 0 ||
      buf.compare(8, 4, "WAVE") != 0)
    throw Error(ErrorCode::UnsupportedFormat, "not a RIFF/WAVE file: " + path.string());

  std::uint16_t format = 0, channels = 0, bits = 0;
  std::uint32_t sample_rate = 0;
  const char* data = nullptr;
  std::uint32_t data_len = 0;

  std::size_t pos = 12;
  while (pos + 8 <= buf.size()) {
    const std::string id = buf.substr(pos, 4);
    const std::uint32_t len = detail::get_le<std::uint32_t>(buf.data() + pos + 4);
    if (pos + 8 + len > buf.size())
      throw Error(ErrorCode::UnsupportedFormat, "truncated chunk in " + path.string());
    const char* body = buf.data() + pos + 8;
    if (id == "fmt ") {
      if (len < 16)
        throw Error(ErrorCode::UnsupportedFormat, "bad fmt chunk in " + path.string());
      format = detail::get_le<std::uint16_t>(body);
      channels = detail::get_le<std::uint16_t>(body + 2);
      sample_rate = detail::get_le<std::uint32_t>(body + 4);
      bits = detail::get_le<std::uint16_t>(body + 14);
    } else if (id == "data") {
      data = body;
      data_len = len;
    }
    pos += 8 + len + (len & 1);  // chunks are word-aligned
  }
  if (!data || format == 0)
    throw Error(ErrorCode::UnsupportedFormat, "missing fmt/data chunk: " + path.string());
  if (channels != 1)
    throw Error(ErrorCode::UnsupportedFormat,
                "only mono supported (" + std::to_string(channels) + " channels): " +
                    path.string());

  Waveform w;
  w.sample_rate_hz = static_cast<int>(sample_rate);
  if (format == 3 && bits == 32) {
    const std::uint32_t n = data_len / 4;
    w.samples.resize(n);
    for (std::uint32_t i = 0; i < n; ++i)
      w.samples[i] = detail::get_le<float>(data + 4 * i);
  } else if (format == 1 && bits == 16) {
    const std::uint32_t n = data_len / 2;
    w.samples.resize(n);
    for (std::uint32_t i = 0; i < n; ++i)
      w.samples[i] = detail::get_le<std::int16_t>(data + 2 * i) / 32768.0;
  } else {
    throw Error(ErrorCode::UnsupportedFormat,
                "unsupported encoding (format " + std::to_string(format) + ", " +
                    std::to_string(bits) + " bit): " + path.string());
  }
  return w;
}

}  // namespace noiselab
