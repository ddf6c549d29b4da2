#pragma once

#include "../core/error.hpp"
#include "mel.hpp"
#include "stft.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace susing::dsp {

/// dB factor 10 / ln 10 applied to sqrt(2 * sum of squared cepstral deltas).
inline constexpr double kMcdScale = 10.0 / std::numbers::ln10;

/// Mean per-frame mel-cepstral distortion between two cepstrum matrices
/// [T, order]; the longer one is trimmed (inputs are frame-aligned).
inline double mcdFromCepstra(const Tensor<double>& ref, const Tensor<double>& syn)
{
  if (ref.rank() != 2 || syn.rank() != 2 || ref.dim(1) != syn.dim(1))
    throw DimensionError("mcd: cepstrum shapes " + shapeString(ref.shape()) + " vs " +
                         shapeString(syn.shape()));
  const std::size_t T = std::min(ref.dim(0), syn.dim(0)), D = ref.dim(1);
  double            total = 0.0;
  for (std::size_t t = 0; t < T; ++t)
  {
    double sq = 0.0;
    for (std::size_t d = 0; d < D; ++d)
    {
      const double diff = ref(t, d) - syn(t, d);
      sq += diff * diff;
    }
    total += kMcdScale * std::sqrt(2.0 * sq);
  }
  return total / double(T);
}

inline double mcd(const Spectrogram& ref, const Spectrogram& syn, const MelConfig& cfg = {})
{
  const auto a = melCepstrum(logMelSpectrogram(ref, cfg), cfg.cepstralOrder);
  const auto b = melCepstrum(logMelSpectrogram(syn, cfg), cfg.cepstralOrder);
  return mcdFromCepstra(a, b);
}

inline double mcd(const AudioBuffer& ref, const AudioBuffer& syn, const MelConfig& cfg = {},
                  const StftConfig& stftCfg = {})
{
  if (ref.size() < stftCfg.nFft || syn.size() < stftCfg.nFft)
    throw ArgumentError("mcd: both inputs need at least one full frame");
  return mcd(stft(ref, stftCfg).spec, stft(syn, stftCfg).spec, cfg);
}

} // namespace susing::dsp
