#pragma once

#include "../core/rng.hpp"
#include "../score/align.hpp"
#include "config.hpp"
#include "encoders.hpp"
#include "params.hpp"
#include "sunet.hpp"

#include <cstdint>

namespace susing::model {

/// Fresh parameters for `cfg`, fully determined by `seed`.
template <typename T>
ParamSet<T> initParams(const ModelConfig& cfg, std::uint64_t seed)
{
  cfg.validate();
  Rng         rng(seed);
  ParamSet<T> p;
  addEncoderParams(p, cfg.embed, cfg.sunet.leakySlope, rng);
  addSUNetParams(p, cfg.sunet, rng);
  return p;
}

/// Score and previous spectrum, each encoded to [bins, T], stacked as the two
/// input planes of the SU-net. Output is the predicted [bins, T] magnitude.
template <typename T>
class AcousticModel
{
public:
  AcousticModel(const ModelConfig& cfg, const ParamSet<T>& params, ParamSet<T>* grads = nullptr)
      : mCfg(cfg), mScore(Binder<T>(params, grads), cfg.embed, cfg.sunet.leakySlope),
        mSpec(Binder<T>(params, grads, "spec_prenet/"), cfg.embed.prenetKernel, cfg.sunet.leakySlope),
        mNet(Binder<T>(params, grads, "sunet/"), cfg.sunet)
  {}

  Tensor<T> forward(const score::FrameScore& fs, const Tensor<T>& prev)
  {
    const std::size_t bins = mCfg.embed.bins;
    if (prev.rank() != 2 || prev.dim(0) != bins)
      throw DimensionError("acoustic model: previous spectrum must be [" + std::to_string(bins) +
                           ",T], got " + shapeString(prev.shape()));
    if (fs.frames() != prev.dim(1))
      throw ArgumentError("acoustic model: score has " + std::to_string(fs.frames()) +
                          " frames, previous spectrum " + std::to_string(prev.dim(1)));
    const std::size_t T_ = fs.frames();
    auto s = mScore.forward(fs).reshaped({1, bins, T_});
    auto p = mSpec.forward(prev).reshaped({1, bins, T_});
    return mNet.forward(concatChannels(s, p)).reshaped({bins, T_});
  }

  void backward(const Tensor<T>& gy)
  {
    const std::size_t bins = gy.dim(0), T_ = gy.dim(1);
    auto [gs, gp] = splitChannels(mNet.backward(gy.reshaped({1, bins, T_})), 1);
    mScore.backward(std::move(gs).reshaped({bins, T_}));
    mSpec.backward(std::move(gp).reshaped({bins, T_}));
  }

  const Pyramid& pyramid() const { return mNet.pyramid(); }

private:
  ModelConfig     mCfg;
  ScoreEncoder<T> mScore;
  Prenet<T>       mSpec;
  SUNet<T>        mNet;
};

template <typename T>
Tensor<T> sunetForward(const Tensor<T>& x, const ParamSet<T>& params, const SUNetConfig& cfg,
                       Pyramid* pyramid = nullptr, const std::string& prefix = "sunet/")
{
  SUNet<T> net(Binder<T>(params, nullptr, prefix), cfg);
  auto     y = net.forward(x);
  if (pyramid) *pyramid = net.pyramid();
  return y;
}

template <typename T>
Tensor<T> acousticForward(const score::FrameScore& fs, const Tensor<T>& prev,
                          const ParamSet<T>& params, const ModelConfig& cfg)
{
  AcousticModel<T> m(cfg, params);
  return m.forward(fs, prev);
}

} // namespace susing::model
