#pragma once

// RIFF/WAVE PCM I/O. Reads 16-bit mono at any rate (resampled to 22050 Hz);
// always writes 16-bit mono at the buffer's rate after resampling to 22050.

#include "../core/error.hpp"
#include "audio.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <iterator>
#include <numbers>
#include <string>
#include <vector>

namespace susing::dsp {

/// Kaiser-windowed sinc interpolation with `taps` taps per output sample.
/// The cutoff follows the lower of the two Nyquist rates.
inline AudioBuffer resample(const AudioBuffer& in, double outRate, std::size_t taps = 64,
                            double beta = 8.6)
{
  if (!(outRate > 0.0)) throw ArgumentError("resample: target rate must be positive");
  if (in.sampleRate == outRate || in.samples.empty())
  {
    AudioBuffer same = in;
    same.sampleRate = outRate;
    return same;
  }
  const double ratio = outRate / in.sampleRate;
  const double cutoff = std::min(1.0, ratio);
  const auto   outLen =
      static_cast<std::size_t>(std::llround(double(in.size()) * ratio));
  const double half = double(taps) / 2.0;
  const double i0Beta = std::cyl_bessel_i(0.0, beta);
  const auto   n = static_cast<std::ptrdiff_t>(in.size());

  AudioBuffer out;
  out.sampleRate = outRate;
  out.samples.resize(outLen);
  for (std::size_t m = 0; m < outLen; ++m)
  {
    const double         pos = double(m) / ratio;
    const auto           base = static_cast<std::ptrdiff_t>(std::floor(pos));
    double               acc = 0.0;
    for (std::ptrdiff_t k = base - std::ptrdiff_t(half) + 1; k <= base + std::ptrdiff_t(half); ++k)
    {
      if (k < 0 || k >= n) continue;
      const double d = pos - double(k);
      const double r = d / half;
      if (std::abs(r) >= 1.0) continue;
      const double x = std::numbers::pi * cutoff * d;
      const double sinc = d == 0.0 ? 1.0 : std::sin(x) / x;
      const double win = std::cyl_bessel_i(0.0, beta * std::sqrt(1.0 - r * r)) / i0Beta;
      acc += in.samples[static_cast<std::size_t>(k)] * cutoff * sinc * win;
    }
    out.samples[m] = acc;
  }
  return out;
}

namespace detail {

inline std::uint32_t readU32(const unsigned char* p)
{
  return std::uint32_t(p[0]) | std::uint32_t(p[1]) << 8 | std::uint32_t(p[2]) << 16 |
         std::uint32_t(p[3]) << 24;
}

inline std::uint16_t readU16(const unsigned char* p)
{
  return std::uint16_t(p[0] | p[1] << 8);
}

inline void putU32(std::vector<unsigned char>& b, std::uint32_t v)
{
  for (int i = 0; i < 4; ++i) b.push_back(static_cast<unsigned char>(v >> (8 * i)));
}

inline void putU16(std::vector<unsigned char>& b, std::uint16_t v)
{
  b.push_back(static_cast<unsigned char>(v));
  b.push_back(static_cast<unsigned char>(v >> 8));
}

} // namespace detail

/// Parses a WAV image held in memory; returns samples at the file's rate.
inline AudioBuffer decodeWav(const std::vector<unsigned char>& bytes)
{
  using detail::readU16;
  using detail::readU32;
  if (bytes.size() < 12 || std::memcmp(bytes.data(), "RIFF", 4) != 0 ||
      std::memcmp(bytes.data() + 8, "WAVE", 4) != 0)
    throw IoError("wav: not a RIFF/WAVE file");
  std::size_t   pos = 12;
  bool          haveFmt = false;
  std::uint32_t rate = 0;
  AudioBuffer   out;
  while (pos + 8 <= bytes.size())
  {
    const unsigned char* chunk = bytes.data() + pos;
    const std::uint32_t  size = readU32(chunk + 4);
    if (pos + 8 + size > bytes.size()) throw IoError("wav: truncated chunk");
    if (std::memcmp(chunk, "fmt ", 4) == 0)
    {
      if (size < 16) throw IoError("wav: short fmt chunk");
      const auto format = readU16(chunk + 8), channels = readU16(chunk + 10),
                 bits = readU16(chunk + 22);
      rate = readU32(chunk + 12);
      if (format != 1) throw IoError("wav: only PCM is supported");
      if (channels != 1) throw IoError("wav: only mono is supported");
      if (bits != 16) throw IoError("wav: only 16-bit samples are supported");
      if (rate == 0) throw IoError("wav: zero sample rate");
      haveFmt = true;
    }
    else if (std::memcmp(chunk, "data", 4) == 0)
    {
      if (!haveFmt) throw IoError("wav: data chunk before fmt chunk");
      const std::size_t count = size / 2;
      out.samples.resize(count);
      for (std::size_t i = 0; i < count; ++i)
        out.samples[i] =
            double(static_cast<std::int16_t>(readU16(chunk + 8 + 2 * i))) / 32768.0;
      out.sampleRate = rate;
      return out;
    }
    pos += 8 + size + (size & 1u);
  }
  throw IoError("wav: no data chunk");
}

inline std::vector<unsigned char> encodeWav(const AudioBuffer& audio)
{
  const auto                 rate = static_cast<std::uint32_t>(std::lround(audio.sampleRate));
  const auto                 dataBytes = static_cast<std::uint32_t>(audio.size() * 2);
  std::vector<unsigned char> b;
  b.reserve(44 + dataBytes);
  b.insert(b.end(), {'R', 'I', 'F', 'F'});
  detail::putU32(b, 36 + dataBytes);
  b.insert(b.end(), {'W', 'A', 'V', 'E', 'f', 'm', 't', ' '});
  detail::putU32(b, 16);
  detail::putU16(b, 1); // PCM
  detail::putU16(b, 1); // mono
  detail::putU32(b, rate);
  detail::putU32(b, rate * 2);
  detail::putU16(b, 2);
  detail::putU16(b, 16);
  b.insert(b.end(), {'d', 'a', 't', 'a'});
  detail::putU32(b, dataBytes);
  for (double s : audio.samples)
  {
    const double c = std::clamp(s, -1.0, 1.0);
    const auto   q = static_cast<std::int16_t>(std::lround(c * 32767.0));
    detail::putU16(b, static_cast<std::uint16_t>(q));
  }
  return b;
}

/// Reads a WAV file and resamples it to 22050 Hz.
inline AudioBuffer readWav(const std::filesystem::path& path)
{
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  std::vector<unsigned char> bytes((std::istreambuf_iterator<char>(in)),
                                   std::istreambuf_iterator<char>());
  auto audio = decodeWav(bytes);
  return audio.sampleRate == kSampleRate ? audio : resample(audio, kSampleRate);
}

inline void writeWav(const std::filesystem::path& path, const AudioBuffer& audio)
{
  const auto    out22k = audio.sampleRate == kSampleRate ? audio : resample(audio, kSampleRate);
  const auto    bytes = encodeWav(out22k);
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write " + path.string());
  out.write(reinterpret_cast<const char*>(bytes.data()), std::streamsize(bytes.size()));
  if (!out) throw IoError("write failed: " + path.string());
}

} // namespace susing::dsp
