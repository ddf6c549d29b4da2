#pragma once

#include "../core/error.hpp"
#include "../dsp/mcd.hpp"
#include "../dsp/mel.hpp"
#include "../dsp/stft.hpp"
#include "../dsp/vuv.hpp"
#include "../dsp/yin.hpp"
#include "toy_voice.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

namespace susing::corpus {

struct EvalEntry
{
  std::string utt;
  double      mcdDb = 0.0;
  double      f0RmseCents = 0.0;  ///< over frames voiced in both tracks; 0 if there are none
  double      f0VuvPct = 100.0;   ///< agreement of the YIN voicing decisions
  double      vuvPct = 100.0;     ///< agreement of the energy-based voicing masks
};

/// Cent differences syn - ref on frames both YIN tracks call voiced.
inline std::vector<double> voicedCentErrors(const dsp::F0Track& ref, const dsp::F0Track& syn)
{
  std::vector<double> out;
  for (std::size_t t = 0; t < std::min(ref.size(), syn.size()); ++t)
    if (ref.voiced[t] && syn.voiced[t]) out.push_back(hzToCents(syn.f0Hz[t], ref.f0Hz[t]));
  return out;
}

/// Median absolute F0 error in cents over mutually voiced frames; NaN when
/// there are none.
inline double f0MedianAbsCents(const dsp::AudioBuffer& ref, const dsp::AudioBuffer& syn)
{
  auto e = voicedCentErrors(dsp::yinF0(ref), dsp::yinF0(syn));
  if (e.empty()) return std::nan("");
  for (auto& v : e) v = std::abs(v);
  const auto mid = e.begin() + std::ptrdiff_t(e.size() / 2);
  std::nth_element(e.begin(), mid, e.end());
  if (e.size() % 2) return *mid;
  return 0.5 * (*mid + *std::max_element(e.begin(), mid));
}

/// Both signals are trimmed to the shorter length before analysis.
inline EvalEntry evaluate(const std::string& utt, const dsp::AudioBuffer& ref, const dsp::AudioBuffer& syn,
                          const dsp::MelConfig& mel = {})
{
  if (ref.sampleRate != syn.sampleRate) throw ArgumentError("evaluate: sample rates differ");
  const dsp::StftConfig stftCfg;
  if (ref.size() < stftCfg.nFft || syn.size() < stftCfg.nFft)
    throw ArgumentError("evaluate: both signals need at least one full frame");
  const std::size_t n = std::min(ref.size(), syn.size());
  dsp::AudioBuffer  a = ref, b = syn;
  a.samples.resize(n);
  b.samples.resize(n);

  EvalEntry e;
  e.utt = utt;
  e.mcdDb = dsp::mcd(a, b, mel);
  const auto fa = dsp::yinF0(a), fb = dsp::yinF0(b);
  const auto cents = voicedCentErrors(fa, fb);
  double     sq = 0.0;
  for (double c : cents) sq += c * c;
  e.f0RmseCents = cents.empty() ? 0.0 : std::sqrt(sq / double(cents.size()));
  e.f0VuvPct = dsp::maskAgreementPct(fa.voiced, fb.voiced);
  e.vuvPct = dsp::maskAgreementPct(dsp::vuvDetect(a), dsp::vuvDetect(b));
  return e;
}

inline EvalEntry meanEntry(const std::vector<EvalEntry>& entries)
{
  if (entries.empty()) throw ArgumentError("report: no entries");
  EvalEntry m{"mean", 0.0, 0.0, 0.0, 0.0};
  for (const auto& e : entries)
  {
    m.mcdDb += e.mcdDb;
    m.f0RmseCents += e.f0RmseCents;
    m.f0VuvPct += e.f0VuvPct;
    m.vuvPct += e.vuvPct;
  }
  const double n = double(entries.size());
  m.mcdDb /= n;
  m.f0RmseCents /= n;
  m.f0VuvPct /= n;
  m.vuvPct /= n;
  return m;
}

/// CSV `utt,mcd_db,f0_rmse_cents,f0_vuv_pct,vuv_pct`, one row per entry and a
/// final `mean` row.
inline void writeReport(const std::filesystem::path& path, const std::vector<EvalEntry>& entries)
{
  const auto    mean = meanEntry(entries);
  std::ofstream out(path);
  if (!out) throw IoError("cannot write " + path.string());
  out.precision(10);
  out << "utt,mcd_db,f0_rmse_cents,f0_vuv_pct,vuv_pct\n";
  auto row = [&](const EvalEntry& e) {
    out << e.utt << ',' << e.mcdDb << ',' << e.f0RmseCents << ',' << e.f0VuvPct << ',' << e.vuvPct
        << '\n';
  };
  for (const auto& e : entries) row(e);
  row(mean);
  if (!out) throw IoError("write failed: " + path.string());
}

/// Log-mel matrix as CSV: n_mels rows, one column per frame.
inline void writeMelCsv(const std::filesystem::path& path, const dsp::AudioBuffer& audio,
                        const dsp::MelConfig& cfg = {})
{
  const auto    logMel = dsp::logMelSpectrogram(dsp::stft(audio).spec, cfg);
  std::ofstream out(path);
  if (!out) throw IoError("cannot write " + path.string());
  out.precision(8);
  for (std::size_t m = 0; m < logMel.dim(0); ++m)
  {
    for (std::size_t t = 0; t < logMel.dim(1); ++t) out << (t ? "," : "") << logMel(m, t);
    out << '\n';
  }
}

} // namespace susing::corpus
