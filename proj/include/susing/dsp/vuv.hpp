#pragma once

#include "../core/error.hpp"
#include "audio.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

namespace susing::dsp {

struct VuvConfig
{
  double      relDbThreshold = -40.0;
  std::size_t smoothFrames = 5;
  std::size_t hop = 256;
};

/// Median filter over a boolean sequence with edge replication; `width` odd.
inline std::vector<bool> medianFilter(const std::vector<bool>& x, std::size_t width)
{
  if (width <= 1 || x.empty()) return x;
  const auto        half = static_cast<std::ptrdiff_t>(width / 2);
  const auto        n = static_cast<std::ptrdiff_t>(x.size());
  std::vector<bool> out(x.size());
  for (std::ptrdiff_t i = 0; i < n; ++i)
  {
    std::size_t ones = 0;
    for (std::ptrdiff_t k = -half; k <= half; ++k)
      ones += x[static_cast<std::size_t>(std::clamp<std::ptrdiff_t>(i + k, 0, n - 1))];
    out[static_cast<std::size_t>(i)] = 2 * ones > std::size_t(2 * half + 1);
  }
  return out;
}

/// Mute-threshold voicing: a frame (hop-length window centred at t * hop) is
/// voiced (true) when its RMS is within `relDbThreshold` of the loudest frame.
/// The mask is median-smoothed.
inline std::vector<bool> vuvDetect(const AudioBuffer& audio, const VuvConfig& cfg = {})
{
  if (audio.samples.empty()) throw ArgumentError("vuv_detect: empty audio");
  if (cfg.hop == 0) throw ArgumentError("vuv_detect: hop must be positive");
  const std::size_t   T = 1 + audio.size() / cfg.hop;
  std::vector<double> rms(T, 0.0);
  const auto          n = static_cast<std::ptrdiff_t>(audio.size());
  for (std::size_t t = 0; t < T; ++t)
  {
    const auto start =
        static_cast<std::ptrdiff_t>(t * cfg.hop) - static_cast<std::ptrdiff_t>(cfg.hop / 2);
    double acc = 0.0;
    for (std::ptrdiff_t i = std::max<std::ptrdiff_t>(start, 0);
         i < std::min<std::ptrdiff_t>(start + std::ptrdiff_t(cfg.hop), n); ++i)
      acc += audio.samples[static_cast<std::size_t>(i)] *
             audio.samples[static_cast<std::size_t>(i)];
    rms[t] = std::sqrt(acc / double(cfg.hop));
  }
  const double      loudest = *std::max_element(rms.begin(), rms.end());
  std::vector<bool> mask(T, false);
  if (loudest <= 0.0) return mask;
  for (std::size_t t = 0; t < T; ++t)
    mask[t] = rms[t] > 0.0 && 20.0 * std::log10(rms[t] / loudest) > cfg.relDbThreshold;
  return medianFilter(mask, cfg.smoothFrames | 1u);
}

/// Percentage of frames on which two masks agree, over the shorter length.
inline double maskAgreementPct(const std::vector<bool>& a, const std::vector<bool>& b)
{
  const std::size_t n = std::min(a.size(), b.size());
  if (n == 0) return 100.0;
  std::size_t same = 0;
  for (std::size_t i = 0; i < n; ++i) same += a[i] == b[i];
  return 100.0 * double(same) / double(n);
}

} // namespace susing::dsp
