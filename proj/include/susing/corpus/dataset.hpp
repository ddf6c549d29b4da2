#pragma once

// Prepared corpus on disk: generated files plus cache/<utt>.mag, the float32
// STFT magnitude of each WAV ("SUSM", u32 bins, u32 frames, bins x frames
// values in row-major order).

#include "../core/error.hpp"
#include "../dsp/stft.hpp"
#include "../dsp/wav.hpp"
#include "../score/align.hpp"
#include "../train/segments.hpp"
#include "generate.hpp"

#include <cstdint>
#include <cstring>
#include <filesystem>
#include <fstream>

namespace susing::corpus {

inline std::filesystem::path cachePath(const std::filesystem::path& dir, const std::string& utt)
{
  return dir / "cache" / (utt + ".mag");
}

inline void writeMagnitudes(const std::filesystem::path& path, const Tensor<float>& mags)
{
  std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot write " + path.string());
  const std::uint32_t dims[2] = {std::uint32_t(mags.dim(0)), std::uint32_t(mags.dim(1))};
  out.write("SUSM", 4);
  out.write(reinterpret_cast<const char*>(dims), sizeof dims);
  out.write(reinterpret_cast<const char*>(mags.ptr()), std::streamsize(mags.size() * sizeof(float)));
  if (!out) throw IoError("write failed: " + path.string());
}

inline Tensor<float> readMagnitudes(const std::filesystem::path& path)
{
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  char          magic[4];
  std::uint32_t dims[2];
  in.read(magic, 4);
  in.read(reinterpret_cast<char*>(dims), sizeof dims);
  if (!in || std::memcmp(magic, "SUSM", 4) != 0) throw IntegrityError(path.string() + ": not a magnitude cache");
  Tensor<float> mags({dims[0], dims[1]});
  in.read(reinterpret_cast<char*>(mags.ptr()), std::streamsize(mags.size() * sizeof(float)));
  if (!in || in.peek() != std::char_traits<char>::eof())
    throw IntegrityError(path.string() + ": wrong size for " + std::to_string(dims[0]) + "x" +
                         std::to_string(dims[1]));
  return mags;
}

inline Tensor<float> magnitudesOf(const dsp::AudioBuffer& audio)
{
  return dsp::stft(audio).spec.mags.cast<float>();
}

/// Caches the STFT magnitude of every utterance in the manifest.
inline void cacheSpectrograms(const std::filesystem::path& dir, const Manifest& m)
{
  for (const auto* split : {&m.train, &m.test})
    for (const auto& utt : *split) writeMagnitudes(cachePath(dir, utt), magnitudesOf(dsp::readWav(wavPath(dir, utt))));
}

struct Utterance
{
  std::string       id;
  score::FrameScore score;
  Tensor<float>     mags; ///< [bins, frames], from the cache when present
};

inline Utterance loadUtterance(const std::filesystem::path& dir, const std::string& utt,
                               const score::PhonemeInventory& inv)
{
  Utterance u;
  u.id = utt;
  u.score = score::alignFrames(score::loadNotes(notesPath(dir, utt)),
                               score::loadPhonemes(phonesPath(dir, utt), inv), inv);
  const auto cached = cachePath(dir, utt);
  u.mags = std::filesystem::exists(cached) ? readMagnitudes(cached)
                                           : magnitudesOf(dsp::readWav(wavPath(dir, utt)));
  return u;
}

/// Reads every training utterance up front, so an unreadable corpus fails
/// before any training starts.
inline std::vector<Utterance> loadSplit(const std::filesystem::path& dir, const std::vector<std::string>& ids,
                                        const score::PhonemeInventory& inv)
{
  std::vector<Utterance> out;
  for (const auto& id : ids) out.push_back(loadUtterance(dir, id, inv));
  return out;
}

inline std::vector<train::Segment<float>> trainingSegments(const std::vector<Utterance>& utts, std::size_t S)
{
  std::vector<train::Segment<float>> all;
  for (const auto& u : utts)
    for (auto& s : train::makeSegments(u.score, u.mags, S)) all.push_back(std::move(s));
  return all;
}

} // namespace susing::corpus
