#pragma once

#include "../core/error.hpp"
#include "audio.hpp"
#include "stft.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

namespace susing::dsp {

struct F0Track
{
  std::vector<double> f0Hz; ///< 0 where unvoiced
  std::vector<bool>   voiced;

  std::size_t size() const { return f0Hz.size(); }
};

struct YinConfig
{
  double      fMin = 60.0;
  double      fMax = 1200.0;
  double      threshold = 0.15;
  std::size_t hop = 256;
};

/// Plain YIN on frames centred at t * hop (same grid as stft). Each frame
/// integrates over max(1024, 2 / fMin seconds) samples. A frame is voiced
/// when the cumulative-mean-normalised difference dips below the threshold
/// inside the lag range; the first such dip is followed to its local minimum
/// and refined by parabolic interpolation.
inline F0Track yinF0(const AudioBuffer& audio, const YinConfig& cfg = {})
{
  if (!(cfg.fMin > 0.0) || !(cfg.fMin < cfg.fMax))
    throw ArgumentError("yin: need 0 < fmin < fmax");
  if (cfg.hop == 0) throw ArgumentError("yin: hop must be positive");
  const double sr = audio.sampleRate;
  const auto   tauMax = static_cast<std::size_t>(std::ceil(sr / cfg.fMin));
  const auto   tauMin = std::max<std::size_t>(2, static_cast<std::size_t>(sr / cfg.fMax));
  const auto   window = std::max<std::size_t>(
      1024, static_cast<std::size_t>(std::ceil(2.0 * sr / cfg.fMin)));
  const std::size_t span = window + tauMax + 1;

  const std::size_t T = audio.samples.empty() ? 0 : 1 + audio.size() / cfg.hop;
  F0Track           track{std::vector<double>(T, 0.0), std::vector<bool>(T, false)};
  std::vector<double> frame(span), diff(tauMax + 2), cmnd(tauMax + 2);

  for (std::size_t t = 0; t < T; ++t)
  {
    const auto start =
        static_cast<std::ptrdiff_t>(t * cfg.hop) - static_cast<std::ptrdiff_t>(window / 2);
    for (std::size_t i = 0; i < span; ++i)
    {
      const std::ptrdiff_t idx = start + static_cast<std::ptrdiff_t>(i);
      frame[i] = (idx >= 0 && idx < static_cast<std::ptrdiff_t>(audio.size()))
                     ? audio.samples[static_cast<std::size_t>(idx)]
                     : 0.0;
    }
    for (std::size_t tau = 1; tau <= tauMax + 1; ++tau)
    {
      double acc = 0.0;
      for (std::size_t j = 0; j < window; ++j)
      {
        const double d = frame[j] - frame[j + tau];
        acc += d * d;
      }
      diff[tau] = acc;
    }
    cmnd[0] = 1.0;
    double running = 0.0;
    for (std::size_t tau = 1; tau <= tauMax + 1; ++tau)
    {
      running += diff[tau];
      cmnd[tau] = running > 0.0 ? diff[tau] * double(tau) / running : 1.0;
    }

    std::size_t best = 0;
    for (std::size_t tau = tauMin; tau <= tauMax; ++tau)
      if (cmnd[tau] < cfg.threshold)
      {
        while (tau + 1 <= tauMax && cmnd[tau + 1] < cmnd[tau]) ++tau;
        best = tau;
        break;
      }
    if (best == 0) continue;

    double       lag = double(best);
    const double a = cmnd[best - 1], b = cmnd[best], c = cmnd[best + 1];
    const double denom = a - 2.0 * b + c;
    if (denom > 0.0) lag += std::clamp(0.5 * (a - c) / denom, -0.5, 0.5);
    const double f0 = sr / lag;
    if (f0 < cfg.fMin || f0 > cfg.fMax) continue;
    track.f0Hz[t] = f0;
    track.voiced[t] = true;
  }
  return track;
}

} // namespace susing::dsp
