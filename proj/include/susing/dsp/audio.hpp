#pragma once

#include "../core/error.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

namespace susing::dsp {

inline constexpr double kSampleRate = 22050.0;

struct AudioBuffer
{
  std::vector<double> samples;
  double              sampleRate = kSampleRate;

  std::size_t size() const noexcept { return samples.size(); }
  double      duration() const { return double(samples.size()) / sampleRate; }

  void validate() const
  {
    if (!(sampleRate > 0.0)) throw ArgumentError("sample rate must be positive");
    for (double s : samples)
      if (!std::isfinite(s)) throw NumericError("audio contains non-finite samples");
  }

  double peak() const
  {
    double p = 0.0;
    for (double s : samples) p = std::max(p, std::abs(s));
    return p;
  }

  /// Scales so the largest magnitude equals `target`; silent buffers stay silent.
  void normalizePeak(double target)
  {
    const double p = peak();
    if (p <= 0.0) return;
    const double g = target / p;
    for (double& s : samples) s *= g;
  }
};

} // namespace susing::dsp
