#pragma once

// Score-driven harmonic synthesiser used as a stand-in singer.

#include "../core/error.hpp"
#include "../core/rng.hpp"
#include "../dsp/audio.hpp"
#include "../score/events.hpp"
#include "../score/inventory.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <set>
#include <string>
#include <vector>

namespace susing::corpus {

struct ToyVoiceConfig
{
  std::size_t           nHarmonics = 10;
  std::set<std::string> unvoiced{"k", "s", "t", "h", "p", "sh", "ch", "ts", "ky", "hy", "py", "f"};
  std::set<std::string> silent{score::kSilence, "cl"}; ///< closures sound like rests
  double                rampSec = 0.010;
  double                gain = 0.25;      ///< keeps the 1/k harmonic sum inside [-1, 1]
  double                noiseLevel = 0.5; ///< band-passed noise amplitude before `gain`
  double                noiseCentreHz = 5000.0;
  std::uint64_t         seed = 0;
  double                sampleRate = dsp::kSampleRate;

  void validate() const
  {
    if (nHarmonics == 0) throw ArgumentError("toy voice: n_harmonics must be at least 1");
    if (!(rampSec >= 0.0)) throw ArgumentError("toy voice: ramp must be non-negative");
    if (!(sampleRate > 0.0)) throw ArgumentError("toy voice: sample rate must be positive");
  }
};

inline double midiToHz(double midi) { return 440.0 * std::pow(2.0, (midi - 69.0) / 12.0); }

inline double hzToCents(double hz, double refHz) { return 1200.0 * std::log2(hz / refHz); }

namespace detail {

// Index of the event covering time t, advancing a cursor over sorted events.
template <typename E>
const E* active(const std::vector<E>& events, std::size_t& cursor, double t)
{
  while (cursor < events.size() && events[cursor].offsetSec <= t) ++cursor;
  if (cursor < events.size() && events[cursor].onsetSec <= t) return &events[cursor];
  return nullptr;
}

} // namespace detail

/// Voiced phonemes over pitched notes sound as sum_k (1/k) sin(k * phase)
/// with the phase integrated from the note's F0 (continuous across note
/// changes); unvoiced phonemes as seeded band-passed noise; everything else
/// is silence. Every change of phoneme or of sound source is faded with
/// linear ramps of `rampSec`. Harmonics at or above Nyquist are dropped.
inline dsp::AudioBuffer toySynth(const std::vector<score::NoteEvent>&    notes,
                                 const std::vector<score::PhonemeEvent>& phonemes,
                                 const ToyVoiceConfig&                   cfg = {})
{
  cfg.validate();
  double end = 0.0;
  for (const auto& n : notes) end = std::max(end, n.offsetSec);
  for (const auto& p : phonemes) end = std::max(end, p.offsetSec);
  auto checkRamp = [&](double on, double off) {
    if (off - on <= cfg.rampSec)
      throw ArgumentError("toy voice: ramp is not shorter than the event at " +
                          score::formatSeconds(on) + " s");
  };
  for (const auto& n : notes) checkRamp(n.onsetSec, n.offsetSec);
  for (const auto& p : phonemes) checkRamp(p.onsetSec, p.offsetSec);

  const double      sr = cfg.sampleRate;
  const auto        N = static_cast<std::size_t>(std::llround(end * sr));
  dsp::AudioBuffer  out;
  out.sampleRate = sr;
  out.samples.assign(N, 0.0);

  // 0 silence, 1 voiced, 2 noise; `segment` changes whenever the source or
  // the phoneme event changes and drives the ramps.
  std::vector<unsigned char> source(N, 0);
  std::vector<std::size_t>   segment(N, 0);
  std::vector<double>        f0(N, 0.0);
  std::size_t                nc = 0, pc = 0;
  for (std::size_t i = 0; i < N; ++i)
  {
    const double t = double(i) / sr;
    const auto*  p = detail::active(phonemes, pc, t);
    const auto*  n = detail::active(notes, nc, t);
    if (!p || cfg.silent.count(p->phoneme)) source[i] = 0;
    else if (cfg.unvoiced.count(p->phoneme)) source[i] = 2;
    else if (n && !n->isRest())
    {
      source[i] = 1;
      f0[i] = midiToHz(double(*n->midi));
    }
    segment[i] = pc * 3 + source[i];
  }

  // distance in samples to the nearest segment boundary on either side
  const double        rampSamples = cfg.rampSec * sr;
  std::vector<double> env(N, 1.0);
  if (rampSamples > 0.0)
  {
    std::size_t since = 0;
    for (std::size_t i = 0; i < N; ++i)
    {
      since = (i == 0 || segment[i] != segment[i - 1]) ? 0 : since + 1;
      env[i] = std::min(1.0, (double(since) + 0.5) / rampSamples);
    }
    std::size_t until = 0;
    for (std::size_t i = N; i-- > 0;)
    {
      until = (i == N - 1 || segment[i] != segment[i + 1]) ? 0 : until + 1;
      env[i] = std::min(env[i], (double(until) + 0.5) / rampSamples);
    }
  }

  // RBJ band-pass biquad (0 dB peak gain) over uniform white noise
  const double w0 = 2.0 * std::numbers::pi * cfg.noiseCentreHz / sr;
  const double alpha = std::sin(w0) / (2.0 * 0.7);
  const double a0 = 1.0 + alpha;
  const double b0 = alpha / a0, b2 = -alpha / a0;
  const double a1 = -2.0 * std::cos(w0) / a0, a2 = (1.0 - alpha) / a0;
  double       x1 = 0.0, x2 = 0.0, y1 = 0.0, y2 = 0.0;
  Rng          rng(cfg.seed);

  double phase = 0.0, lastF0 = 0.0;
  for (std::size_t i = 0; i < N; ++i)
  {
    const double x = rng.uniform(-1.0, 1.0);
    const double noise = b0 * x + b2 * x2 - a1 * y1 - a2 * y2;
    x2 = x1;
    x1 = x;
    y2 = y1;
    y1 = noise;

    double v = 0.0;
    if (source[i] == 1)
    {
      for (std::size_t k = 1; k <= cfg.nHarmonics && double(k) * f0[i] < sr / 2.0; ++k)
        v += std::sin(double(k) * phase) / double(k);
      lastF0 = f0[i];
    }
    else if (source[i] == 2)
      v = cfg.noiseLevel * noise;
    out.samples[i] = cfg.gain * env[i] * v;
    phase = std::fmod(phase + 2.0 * std::numbers::pi * (source[i] == 1 ? f0[i] : lastF0) / sr,
                      2.0 * std::numbers::pi);
  }
  return out;
}

} // namespace susing::corpus
