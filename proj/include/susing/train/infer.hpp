#pragma once

#include "../model/acoustic.hpp"
#include "segments.hpp"

namespace susing::train {

/// Autoregressive synthesis: windows of S frames, the first conditioned on
/// silence and each later one on the model's own previous output. Returns
/// [bins, frames] non-negative magnitudes.
template <typename T>
Tensor<T> inferAutoregressive(const score::FrameScore& fs, const model::ParamSet<T>& params,
                              const model::ModelConfig& cfg, std::size_t S)
{
  if (S < 2) throw ArgumentError("infer: segment length must be at least 2");
  const std::size_t n = fs.frames(), bins = cfg.embed.bins;
  if (n == 0) throw ArgumentError("infer: empty score");
  model::AcousticModel<T> m(cfg, params);
  Tensor<T>               out({bins, n});
  Tensor<T>               prev({bins, S});
  for (std::size_t start = 0; start < n; start += S)
  {
    auto y = m.forward(scoreWindow(fs, start, S), prev);
    for (auto& v : y.data()) v = std::max(v, T{0});
    for (std::size_t b = 0; b < bins; ++b)
      for (std::size_t i = 0; i < S && start + i < n; ++i) out(b, start + i) = y(b, i);
    prev = std::move(y);
  }
  return out;
}

} // namespace susing::train
