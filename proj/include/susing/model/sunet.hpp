#pragma once

#include "../core/layers.hpp"
#include "../core/ops.hpp"
#include "../core/rng.hpp"
#include "config.hpp"
#include "params.hpp"
#include "stripe_pool.hpp"

#include <cmath>
#include <memory>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace susing::model {

namespace detail {

inline std::string level(const char* what, std::size_t k) { return what + std::to_string(k); }

template <typename T>
Tensor<T> gaussian(Shape shape, double stddev, Rng& rng)
{
  Tensor<T> t(std::move(shape));
  for (auto& v : t.data()) v = T(rng.normal() * stddev);
  return t;
}

} // namespace detail

/// Input channels of the up layer that produces level k - 1 (k = depth..1).
inline std::size_t upInputChannels(const SUNetConfig& cfg, std::size_t k)
{
  const std::size_t c = cfg.channels(k);
  return (k == cfg.depth || !cfg.useSkips) ? c : 2 * c;
}

inline std::size_t upOutputChannels(const SUNetConfig& cfg, std::size_t k)
{
  return k > 1 ? cfg.channels(k - 1) : cfg.baseChannels;
}

inline std::size_t outputInputChannels(const SUNetConfig& cfg)
{
  return cfg.baseChannels + (cfg.useSkips ? cfg.inChannels : 0);
}

/// Down convs (He init for the leaky activation), stripe modules, up deconvs
/// and the 1x1 output conv. The output bias starts slightly positive so the
/// clamping relu passes gradient at initialisation.
template <typename T>
void addSUNetParams(ParamSet<T>& p, const SUNetConfig& cfg, Rng& rng,
                    const std::string& prefix = "sunet/", double outputBias = 0.05)
{
  cfg.validate();
  const std::size_t K = cfg.kernel;
  const double      leakGain = 2.0 / (1.0 + cfg.leakySlope * cfg.leakySlope);
  for (std::size_t k = 1; k <= cfg.depth; ++k)
  {
    const std::size_t in = cfg.channels(k - 1), out = cfg.channels(k);
    const auto        name = prefix + detail::level("down", k);
    p.add(name + ".kernel",
          detail::gaussian<T>({out, in, K, K}, std::sqrt(leakGain / double(in * K * K)), rng));
    p.add(name + ".bias", Tensor<T>({out}));
    if (cfg.useStripe)
      addStripePoolParams(p, prefix + detail::level("stripe", k) + "/", out, cfg.stripeKernel, rng);
  }
  for (std::size_t k = cfg.depth; k >= 1; --k)
  {
    const std::size_t in = upInputChannels(cfg, k), out = upOutputChannels(cfg, k);
    const double      fanIn = double(in * K * K) / double(cfg.stride * cfg.stride);
    const auto        name = prefix + detail::level("up", k);
    p.add(name + ".kernel", detail::gaussian<T>({in, out, K, K}, std::sqrt(2.0 / fanIn), rng));
    p.add(name + ".bias", Tensor<T>({out}));
  }
  const std::size_t oin = outputInputChannels(cfg);
  p.add(prefix + "out.kernel",
        detail::gaussian<T>({cfg.outChannels, oin, 1, 1}, std::sqrt(1.0 / double(oin)), rng));
  p.add(prefix + "out.bias", Tensor<T>({cfg.outChannels}, T(outputBias)));
}

/// Spatial sizes and channel counts seen by one forward pass; index 0 is the
/// input, index k the output of down layer k.
struct Pyramid
{
  std::vector<std::size_t> heights, widths, channels;
};

template <typename T>
class SUNet
{
public:
  SUNet(const Binder<T>& bind, const SUNetConfig& cfg) : mCfg(cfg)
  {
    cfg.validate();
    const ConvGeometry g{cfg.stride, cfg.padding, cfg.dilation};
    for (std::size_t k = 1; k <= cfg.depth; ++k)
    {
      const auto name = detail::level("down", k);
      mDown.emplace_back(bind(name + ".kernel"), bind(name + ".bias"), g);
      mDownAct.emplace_back(Activation::leakyRelu(cfg.leakySlope));
      if (cfg.useStripe)
        mStripe.push_back(std::make_unique<StripePool<T>>(
            bind.scoped(detail::level("stripe", k) + "/"), cfg.stripeKernel));
    }
    for (std::size_t k = cfg.depth; k >= 1; --k)
    {
      const auto name = detail::level("up", k);
      mUp.emplace_back(bind(name + ".kernel"), bind(name + ".bias"), g);
      mUpAct.emplace_back(Activation::relu());
    }
    mOut.emplace(bind("out.kernel"), bind("out.bias"), ConvGeometry{});
  }

  /// x: [in_channels, H, W] -> [out_channels, H, W], elementwise >= 0.
  Tensor<T> forward(const Tensor<T>& x)
  {
    if (x.rank() != 3 || x.dim(0) != mCfg.inChannels)
      throw DimensionError("sunet expects [" + std::to_string(mCfg.inChannels) + ",H,W], got " +
                           shapeString(x.shape()));
    const std::size_t D = mCfg.depth;
    mPyramid = Pyramid{{x.dim(1)}, {x.dim(2)}, {x.dim(0)}};
    std::vector<Tensor<T>> acts{x};
    for (std::size_t k = 1; k <= D; ++k)
    {
      auto h = mDownAct[k - 1].forward(mDown[k - 1].forward(acts.back()));
      if (mCfg.useStripe) h = mStripe[k - 1]->forward(h);
      mPyramid.heights.push_back(h.dim(1));
      mPyramid.widths.push_back(h.dim(2));
      mPyramid.channels.push_back(h.dim(0));
      acts.push_back(std::move(h));
    }
    Tensor<T> u = acts[D];
    for (std::size_t k = D, i = 0; k >= 1; --k, ++i)
    {
      if (k < D && mCfg.useSkips) u = concatChannels(u, acts[k]);
      u = mUpAct[i].forward(
          mUp[i].forward(u, {mPyramid.heights[k - 1], mPyramid.widths[k - 1]}));
    }
    if (mCfg.useSkips) u = concatChannels(u, x);
    return mOutAct.forward(mOut->forward(u));
  }

  /// Returns the gradient with respect to the input.
  Tensor<T> backward(const Tensor<T>& gy)
  {
    const std::size_t D = mCfg.depth;
    Tensor<T>         g = mOut->backward(mOutAct.backward(gy));
    std::optional<Tensor<T>> gInput;
    if (mCfg.useSkips)
    {
      auto [gu, gx] = splitChannels(g, mCfg.baseChannels);
      g = std::move(gu);
      gInput = std::move(gx);
    }
    // gradients flowing into each down activation through the skip paths
    std::vector<std::optional<Tensor<T>>> gSkip(D + 1);
    for (std::size_t i = D; i-- > 0;)
    {
      const std::size_t k = D - i;
      g = mUp[i].backward(mUpAct[i].backward(g));
      if (k < D && mCfg.useSkips)
      {
        auto [gu, gs] = splitChannels(g, mCfg.channels(k));
        g = std::move(gu);
        gSkip[k] = std::move(gs);
      }
    }
    for (std::size_t k = D; k >= 1; --k)
    {
      if (gSkip[k]) g += *gSkip[k];
      if (mCfg.useStripe) g = mStripe[k - 1]->backward(g);
      g = mDown[k - 1].backward(mDownAct[k - 1].backward(g));
    }
    if (gInput) g += *gInput;
    return g;
  }

  const Pyramid& pyramid() const { return mPyramid; }

private:
  SUNetConfig                                 mCfg;
  std::vector<Conv2dLayer<T>>                 mDown;
  std::vector<ActivationLayer<T>>             mDownAct;
  std::vector<std::unique_ptr<StripePool<T>>> mStripe;
  std::vector<TransposedConv2dLayer<T>>       mUp;
  std::vector<ActivationLayer<T>>             mUpAct;
  std::optional<Conv2dLayer<T>>               mOut;
  ActivationLayer<T>                          mOutAct{Activation::relu()};
  Pyramid                                     mPyramid;
};

} // namespace susing::model
