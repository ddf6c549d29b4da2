#pragma once

#include "../core/error.hpp"
#include "../core/rng.hpp"
#include "../dsp/wav.hpp"
#include "../score/events.hpp"
#include "toy_voice.hpp"

#include <json.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

namespace susing::corpus {

struct ToyScore
{
  std::vector<score::NoteEvent>    notes;
  std::vector<score::PhonemeEvent> phonemes;
};

struct CorpusConfig
{
  std::size_t    utterances = 8;
  std::size_t    testUtterances = 2;
  std::uint64_t  seed = 0;
  double         meanDurationSec = 2.0;
  double         durationSpreadSec = 0.5;
  int            lowestMidi = 57; ///< A3
  int            highestMidi = 72; ///< C5
  ToyVoiceConfig voice;

  void validate() const
  {
    if (utterances == 0) throw ArgumentError("corpus: need at least one utterance");
    if (testUtterances >= utterances)
      throw ArgumentError("corpus: the test split must leave at least one training utterance");
    if (!(durationSpreadSec >= 0.0) || !(meanDurationSec - durationSpreadSec >= 0.5))
      throw ArgumentError("corpus: utterances must last at least 0.5 s");
    if (lowestMidi > highestMidi || lowestMidi < 0 || highestMidi > 127)
      throw ArgumentError("corpus: bad MIDI range");
  }
};

inline std::string uttId(std::size_t i)
{
  char buf[16];
  std::snprintf(buf, sizeof buf, "utt%02zu", i);
  return buf;
}

/// A random melody: leading and trailing rests, notes of 250-500 ms with the
/// occasional rest between them, and per note an optional consonant of
/// 40-80 ms before a vowel. Times are whole milliseconds.
inline ToyScore randomToyScore(Rng& rng, const CorpusConfig& cfg)
{
  static const std::vector<std::string> vowels{"a", "i", "u", "e", "o"};
  static const std::vector<std::string> consonants{"k", "s", "t", "n", "h", "m", "r", "g",
                                                   "d", "b", "p", "sh", "ch", "ts", "y", "w"};
  const auto ms = [](long v) { return double(v) / 1000.0; };
  const long total = std::lround(
      1000.0 * rng.uniform(cfg.meanDurationSec - cfg.durationSpreadSec,
                           cfg.meanDurationSec + cfg.durationSpreadSec));
  const long tail = 100 + long(rng.below(101));
  long       t = 100 + long(rng.below(101));

  ToyScore s;
  auto     rest = [&](long from, long to) {
    s.notes.push_back({ms(from), ms(to), std::nullopt});
    s.phonemes.push_back({ms(from), ms(to), score::kSilence});
  };
  rest(0, t);
  const long last = total - tail;
  bool first = true;
  while (t < last)
  {
    if (!first && rng.uniform() < 0.15 && last - t > 400)
    {
      const long r = 100 + long(rng.below(101));
      rest(t, t + r);
      t += r;
    }
    long len = 250 + long(rng.below(251));
    if (last - (t + len) < 150) len = last - t; // absorb a short remainder
    const int midi = cfg.lowestMidi + int(rng.below(std::uint64_t(cfg.highestMidi - cfg.lowestMidi + 1)));
    s.notes.push_back({ms(t), ms(t + len), midi});
    long v = t;
    if (rng.uniform() < 0.5)
    {
      const long c = 40 + long(rng.below(41));
      s.phonemes.push_back({ms(t), ms(t + c), consonants[rng.below(consonants.size())]});
      v = t + c;
    }
    s.phonemes.push_back({ms(v), ms(t + len), vowels[rng.below(vowels.size())]});
    t += len;
    first = false;
  }
  rest(t, total);
  return s;
}

/// Utterance i uses generators seeded from (seed, i) only, so any utterance
/// can be regenerated on its own.
inline ToyScore toyScoreFor(const CorpusConfig& cfg, std::size_t i)
{
  Rng rng(cfg.seed * 1000003ULL + i);
  return randomToyScore(rng, cfg);
}

inline dsp::AudioBuffer toyAudioFor(const CorpusConfig& cfg, std::size_t i, const ToyScore& s)
{
  auto voice = cfg.voice;
  voice.seed = cfg.seed * 1000003ULL + i + 0x9e3779b9ULL;
  return toySynth(s.notes, s.phonemes, voice);
}

struct Manifest
{
  std::vector<std::string> train;
  std::vector<std::string> test;
  double                   sampleRate = dsp::kSampleRate;
};

inline void writeManifest(const std::filesystem::path& path, const Manifest& m)
{
  const nlohmann::json j{{"train", m.train}, {"test", m.test}, {"sample_rate", m.sampleRate}};
  std::ofstream        out(path);
  if (!out) throw IoError("cannot write " + path.string());
  out << j.dump(2) << '\n';
}

inline Manifest readManifest(const std::filesystem::path& path)
{
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path.string());
  try
  {
    const auto j = nlohmann::json::parse(in);
    return {j.at("train").get<std::vector<std::string>>(), j.at("test").get<std::vector<std::string>>(),
            j.at("sample_rate").get<double>()};
  }
  catch (const nlohmann::json::exception& e)
  {
    throw IoError("malformed manifest " + path.string() + ": " + e.what());
  }
}

inline std::filesystem::path notesPath(const std::filesystem::path& dir, const std::string& utt)
{
  return dir / (utt + ".notes.tsv");
}

inline std::filesystem::path phonesPath(const std::filesystem::path& dir, const std::string& utt)
{
  return dir / (utt + ".phones.tsv");
}

inline std::filesystem::path wavPath(const std::filesystem::path& dir, const std::string& utt)
{
  return dir / (utt + ".wav");
}

/// Writes <utt>.wav, <utt>.notes.tsv, <utt>.phones.tsv per utterance and
/// manifest.json. The last `testUtterances` utterances form the test split.
inline Manifest generateCorpus(const std::filesystem::path& dir, const CorpusConfig& cfg, bool force = false)
{
  cfg.validate();
  namespace fs = std::filesystem;
  if (fs::exists(dir) && !fs::is_empty(dir) && !force)
    throw IoError(dir.string() + " is not empty (use --force to overwrite)");
  fs::create_directories(dir);

  Manifest m;
  for (std::size_t i = 0; i < cfg.utterances; ++i)
  {
    const auto id = uttId(i);
    const auto s = toyScoreFor(cfg, i);
    dsp::writeWav(wavPath(dir, id), toyAudioFor(cfg, i, s));
    std::ofstream notes(notesPath(dir, id)), phones(phonesPath(dir, id));
    if (!notes || !phones) throw IoError("cannot write score files for " + id);
    score::writeNotes(notes, s.notes);
    score::writePhonemes(phones, s.phonemes);
    (i + cfg.testUtterances < cfg.utterances ? m.train : m.test).push_back(id);
  }
  writeManifest(dir / "manifest.json", m);
  return m;
}

} // namespace susing::corpus
