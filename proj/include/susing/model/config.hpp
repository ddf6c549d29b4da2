#pragma once

#include "../core/error.hpp"

#include <algorithm>
#include <cstddef>
#include <string>
#include <vector>

namespace susing::model {

struct EmbedderConfig
{
  std::size_t phonemeDim = 256;
  std::size_t noteDim = 32;
  std::size_t phonemeVocab = 35;
  std::size_t noteVocab = 129;
  std::size_t bins = 513; ///< dense output width = spectrum bins
  std::size_t prenetKernel = 5;

  std::size_t concatDim() const { return phonemeDim + noteDim; }

  void validate() const
  {
    if (phonemeDim == 0 || noteDim == 0 || phonemeVocab == 0 || noteVocab == 0 || bins == 0)
      throw ArgumentError("embedder: dimensions must be positive");
    if (prenetKernel % 2 == 0) throw ArgumentError("embedder: pre-net kernel must be odd");
  }

  bool operator==(const EmbedderConfig&) const = default;
};

struct SUNetConfig
{
  std::size_t depth = 7;
  std::size_t kernel = 5;
  std::size_t stride = 2;
  std::size_t padding = 2;
  std::size_t dilation = 1;
  std::size_t baseChannels = 16;
  std::size_t maxChannels = 512;
  std::size_t inChannels = 2;
  std::size_t outChannels = 1;
  std::size_t stripeKernel = 3;
  double      leakySlope = 0.2;
  bool        useStripe = true;
  bool        useSkips = true;

  /// Output channels of down layer k (1-based): base * 2^(k-1), capped.
  std::size_t channels(std::size_t k) const
  {
    if (k == 0) return inChannels;
    std::size_t c = baseChannels;
    for (std::size_t i = 1; i < k && c < maxChannels; ++i) c *= 2;
    return std::min(c, maxChannels);
  }

  void validate() const
  {
    if (depth == 0) throw ArgumentError("sunet: depth must be positive");
    if (dilation != 1) throw ArgumentError("sunet: only dilation 1 is supported");
    if (stride == 0 || kernel == 0) throw ArgumentError("sunet: kernel and stride must be positive");
    if (baseChannels == 0 || maxChannels < baseChannels)
      throw ArgumentError("sunet: need 0 < base_channels <= max_channels");
    if (inChannels == 0 || outChannels == 0) throw ArgumentError("sunet: channel counts must be positive");
    if (stripeKernel % 2 == 0) throw ArgumentError("sunet: stripe kernel must be odd");
  }

  bool operator==(const SUNetConfig&) const = default;
};

struct ModelConfig
{
  EmbedderConfig embed;
  SUNetConfig    sunet;

  void validate() const
  {
    embed.validate();
    sunet.validate();
    if (sunet.inChannels != 2)
      throw ArgumentError("acoustic model stacks exactly 2 input planes (score, previous spectrum)");
  }

  bool operator==(const ModelConfig&) const = default;
};

/// Small network for gradient checks and quick tests.
inline ModelConfig tinyModelConfig(std::size_t bins = 33)
{
  ModelConfig cfg;
  cfg.embed.phonemeDim = 4;
  cfg.embed.noteDim = 3;
  cfg.embed.bins = bins;
  cfg.sunet.depth = 3;
  cfg.sunet.baseChannels = 2;
  return cfg;
}

} // namespace susing::model
