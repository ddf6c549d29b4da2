#pragma once

#include "../core/error.hpp"
#include "../core/tensor.hpp"
#include "stft.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace susing::dsp {

struct MelConfig
{
  std::size_t nMels = 80;
  double      fMin = 0.0;
  double      fMax = 11025.0;
  std::size_t cepstralOrder = 13; ///< c1..cN; c0 is excluded
  double      sampleRate = kSampleRate;
  double      logFloor = 1e-5;

  void validate(std::size_t bins) const
  {
    if (nMels == 0 || nMels >= bins)
      throw ArgumentError("mel: n_mels must be in [1, bins)");
    if (!(fMax <= sampleRate / 2.0) || !(fMin >= 0.0) || !(fMin < fMax))
      throw ArgumentError("mel: need 0 <= fmin < fmax <= sample_rate / 2");
    if (cepstralOrder == 0 || cepstralOrder >= nMels)
      throw ArgumentError("mel: cepstral order must be in [1, n_mels)");
  }
};

// Slaney's auditory-toolbox mel scale: linear below 1 kHz, logarithmic above.
inline double hzToMel(double hz)
{
  constexpr double fSp = 200.0 / 3.0, minLogHz = 1000.0, minLogMel = minLogHz / fSp;
  const double     logStep = std::log(6.4) / 27.0;
  return hz < minLogHz ? hz / fSp : minLogMel + std::log(hz / minLogHz) / logStep;
}

inline double melToHz(double mel)
{
  constexpr double fSp = 200.0 / 3.0, minLogHz = 1000.0, minLogMel = minLogHz / fSp;
  const double     logStep = std::log(6.4) / 27.0;
  return mel < minLogMel ? mel * fSp : minLogHz * std::exp(logStep * (mel - minLogMel));
}

/// Triangular filters with area normalisation, [nMels, bins].
inline Tensor<double> melFilterbank(const MelConfig& cfg, std::size_t nFft)
{
  const std::size_t bins = nFft / 2 + 1;
  cfg.validate(bins);
  const double        lo = hzToMel(cfg.fMin), hi = hzToMel(cfg.fMax);
  std::vector<double> edges(cfg.nMels + 2);
  for (std::size_t i = 0; i < edges.size(); ++i)
    edges[i] = melToHz(lo + (hi - lo) * double(i) / double(cfg.nMels + 1));
  Tensor<double> fb({cfg.nMels, bins});
  for (std::size_t m = 0; m < cfg.nMels; ++m)
  {
    const double l = edges[m], c = edges[m + 1], r = edges[m + 2];
    const double enorm = 2.0 / (r - l);
    for (std::size_t k = 0; k < bins; ++k)
    {
      const double f = double(k) * cfg.sampleRate / double(nFft);
      const double w = std::max(0.0, std::min((f - l) / (c - l), (r - f) / (r - c)));
      fb(m, k) = w * enorm;
    }
  }
  return fb;
}

/// Filterbank applied to linear magnitudes, [nMels, frames].
inline Tensor<double> melSpectrogram(const Spectrogram& s, const MelConfig& cfg)
{
  const auto     fb = melFilterbank(cfg, s.config.nFft);
  const auto     bins = s.bins(), T = s.frames();
  Tensor<double> out({cfg.nMels, T});
  for (std::size_t m = 0; m < cfg.nMels; ++m)
    for (std::size_t k = 0; k < bins; ++k)
    {
      const double w = fb(m, k);
      if (w == 0.0) continue;
      for (std::size_t t = 0; t < T; ++t) out(m, t) += w * s.mags(k, t);
    }
  return out;
}

inline Tensor<double> logCompress(Tensor<double> x, double floor = 1e-5)
{
  for (auto& v : x.data()) v = std::log(std::max(v, floor));
  return x;
}

inline Tensor<double> logMelSpectrogram(const Spectrogram& s, const MelConfig& cfg)
{
  return logCompress(melSpectrogram(s, cfg), cfg.logFloor);
}

/// Orthonormal DCT-II along the mel axis of a log-mel matrix [nMels, T];
/// returns c1..c_order per frame as [T, order].
inline Tensor<double> melCepstrum(const Tensor<double>& logMel, std::size_t order)
{
  const std::size_t N = logMel.dim(0), T = logMel.dim(1);
  if (order >= N) throw ArgumentError("melCepstrum: order must be below n_mels");
  Tensor<double> basis({order, N});
  const double   scale = std::sqrt(2.0 / double(N));
  for (std::size_t d = 1; d <= order; ++d)
    for (std::size_t n = 0; n < N; ++n)
      basis(d - 1, n) =
          scale * std::cos(std::numbers::pi * double(d) * (2.0 * double(n) + 1.0) /
                           (2.0 * double(N)));
  Tensor<double> c({T, order});
  for (std::size_t t = 0; t < T; ++t)
    for (std::size_t d = 0; d < order; ++d)
    {
      double acc = 0.0;
      for (std::size_t n = 0; n < N; ++n) acc += basis(d, n) * logMel(n, t);
      c(t, d) = acc;
    }
  return c;
}

} // namespace susing::dsp
