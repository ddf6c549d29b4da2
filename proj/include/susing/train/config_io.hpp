#pragma once

// JSON (de)serialisation of the model and training configurations. Reading is
// strict: unknown keys are rejected, missing keys keep their defaults.

#include "../core/error.hpp"
#include "../model/config.hpp"
#include "step.hpp"

#include <json.hpp>

#include <set>
#include <string>

namespace susing {

namespace detail {

inline void rejectUnknownKeys(const nlohmann::json& j, const std::set<std::string>& known,
                              const std::string& section)
{
  if (!j.is_object()) throw ParseError(section + ": expected an object", 0);
  for (const auto& [key, _] : j.items())
    if (!known.count(key)) throw ArgumentError(section + ": unknown key '" + key + "'");
}

template <typename V>
void readKey(const nlohmann::json& j, const char* key, V& out)
{
  if (j.contains(key)) out = j.at(key).get<V>();
}

} // namespace detail

namespace model {

inline void to_json(nlohmann::json& j, const EmbedderConfig& c)
{
  j = {{"phoneme_dim", c.phonemeDim}, {"note_dim", c.noteDim},      {"phoneme_vocab", c.phonemeVocab},
       {"note_vocab", c.noteVocab},   {"bins", c.bins},             {"prenet_kernel", c.prenetKernel}};
}

inline void from_json(const nlohmann::json& j, EmbedderConfig& c)
{
  susing::detail::rejectUnknownKeys(
      j, {"phoneme_dim", "note_dim", "phoneme_vocab", "note_vocab", "bins", "prenet_kernel"}, "embedder");
  using susing::detail::readKey;
  readKey(j, "phoneme_dim", c.phonemeDim);
  readKey(j, "note_dim", c.noteDim);
  readKey(j, "phoneme_vocab", c.phonemeVocab);
  readKey(j, "note_vocab", c.noteVocab);
  readKey(j, "bins", c.bins);
  readKey(j, "prenet_kernel", c.prenetKernel);
}

inline void to_json(nlohmann::json& j, const SUNetConfig& c)
{
  j = {{"depth", c.depth},
       {"kernel", c.kernel},
       {"stride", c.stride},
       {"padding", c.padding},
       {"dilation", c.dilation},
       {"base_channels", c.baseChannels},
       {"max_channels", c.maxChannels},
       {"in_channels", c.inChannels},
       {"out_channels", c.outChannels},
       {"stripe_kernel", c.stripeKernel},
       {"leaky_slope", c.leakySlope},
       {"use_stripe", c.useStripe},
       {"use_skips", c.useSkips}};
}

inline void from_json(const nlohmann::json& j, SUNetConfig& c)
{
  susing::detail::rejectUnknownKeys(j,
                                    {"depth", "kernel", "stride", "padding", "dilation",
                                     "base_channels", "max_channels", "in_channels", "out_channels",
                                     "stripe_kernel", "leaky_slope", "use_stripe", "use_skips"},
                                    "sunet");
  using susing::detail::readKey;
  readKey(j, "depth", c.depth);
  readKey(j, "kernel", c.kernel);
  readKey(j, "stride", c.stride);
  readKey(j, "padding", c.padding);
  readKey(j, "dilation", c.dilation);
  readKey(j, "base_channels", c.baseChannels);
  readKey(j, "max_channels", c.maxChannels);
  readKey(j, "in_channels", c.inChannels);
  readKey(j, "out_channels", c.outChannels);
  readKey(j, "stripe_kernel", c.stripeKernel);
  readKey(j, "leaky_slope", c.leakySlope);
  readKey(j, "use_stripe", c.useStripe);
  readKey(j, "use_skips", c.useSkips);
}

inline void to_json(nlohmann::json& j, const ModelConfig& c)
{
  j = {{"embedder", c.embed}, {"sunet", c.sunet}};
}

inline void from_json(const nlohmann::json& j, ModelConfig& c)
{
  susing::detail::rejectUnknownKeys(j, {"embedder", "sunet"}, "model");
  susing::detail::readKey(j, "embedder", c.embed);
  susing::detail::readKey(j, "sunet", c.sunet);
}

} // namespace model

namespace train {

inline void to_json(nlohmann::json& j, const TrainConfig& c)
{
  j = {{"segment_frames", c.segmentFrames},
       {"batch_size", c.batchSize},
       {"lr", c.adam.lr},
       {"adam_beta1", c.adam.beta1},
       {"adam_beta2", c.adam.beta2},
       {"adam_eps", c.adam.eps},
       {"max_steps", c.maxSteps},
       {"seed", c.seed},
       {"grad_clip_norm", c.gradClipNorm},
       {"checkpoint_every", c.checkpointEvery}};
}

inline void from_json(const nlohmann::json& j, TrainConfig& c)
{
  susing::detail::rejectUnknownKeys(j,
                                    {"segment_frames", "batch_size", "lr", "adam_beta1", "adam_beta2",
                                     "adam_eps", "max_steps", "seed", "grad_clip_norm",
                                     "checkpoint_every"},
                                    "train");
  using susing::detail::readKey;
  readKey(j, "segment_frames", c.segmentFrames);
  readKey(j, "batch_size", c.batchSize);
  readKey(j, "lr", c.adam.lr);
  readKey(j, "adam_beta1", c.adam.beta1);
  readKey(j, "adam_beta2", c.adam.beta2);
  readKey(j, "adam_eps", c.adam.eps);
  readKey(j, "max_steps", c.maxSteps);
  readKey(j, "seed", c.seed);
  readKey(j, "grad_clip_norm", c.gradClipNorm);
  readKey(j, "checkpoint_every", c.checkpointEvery);
}

} // namespace train

} // namespace susing
