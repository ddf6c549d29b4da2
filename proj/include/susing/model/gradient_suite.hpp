#pragma once

// Finite-difference verification of every differentiable operator, from the
// single kernels up to the full acoustic model on a tiny configuration.

#include "../core/gradcheck.hpp"
#include "../core/layers.hpp"
#include "../core/rng.hpp"
#include "acoustic.hpp"
#include "stripe_pool.hpp"
#include "sunet.hpp"

#include <algorithm>
#include <string>
#include <vector>

namespace susing::model {

struct GradCheckEntry
{
  std::string     op;
  std::string     wrt;
  GradCheckResult result;
};

namespace detail {

inline Tensor<double> uniformTensor(Shape shape, Rng& rng, double lo = -1.0, double hi = 1.0)
{
  Tensor<double> t(std::move(shape));
  for (auto& v : t.data()) v = rng.uniform(lo, hi);
  return t;
}

/// Values in [0.1, 1] with random sign, away from activation kinks.
inline Tensor<double> offKinkTensor(Shape shape, Rng& rng)
{
  Tensor<double> t(std::move(shape));
  for (auto& v : t.data()) v = (rng.uniform() < 0.5 ? -1.0 : 1.0) * rng.uniform(0.1, 1.0);
  return t;
}

/// `run(P, G, gy)` evaluates the module with parameters (and input "x") from
/// P; when gy is non-null it also back-propagates gy, accumulating into G.
/// The scalar checked is sum(w * y) for a random w.
template <typename Run>
void checkModule(std::vector<GradCheckEntry>& out, const std::string& op,
                 const ParamSet<double>& P, Run run, Rng& rng, double eps,
                 std::size_t maxCoords)
{
  const auto        y = run(P, nullptr, nullptr);
  const auto        w = uniformTensor(y.shape(), rng, -1.0, 1.0);
  ParamSet<double>  G = P.zerosLike();
  run(P, &G, &w);
  for (std::size_t i = 0; i < P.size(); ++i)
  {
    auto loss = [&](const Tensor<double>& probe) {
      ParamSet<double> Q = P;
      Q.at(i) = probe;
      return dot(w, run(Q, nullptr, nullptr));
    };
    std::vector<std::size_t> coords;
    const std::size_t        n = P.at(i).size();
    if (n <= maxCoords)
      for (std::size_t c = 0; c < n; ++c) coords.push_back(c);
    else
      for (std::size_t c = 0; c < maxCoords; ++c) coords.push_back(rng.below(n));
    out.push_back({op, P.name(i), finiteDiffCheck(loss, P.at(i), G.at(i), eps, coords)});
  }
}

template <typename Layer>
Tensor<double> runLayer(Layer& layer, const ParamSet<double>& P, ParamSet<double>* G,
                        const Tensor<double>* gy)
{
  auto y = layer.forward(P["x"]);
  if (gy) G->operator[]("x") += layer.backward(*gy);
  return y;
}

/// Each gated down level shrinks activations by about 2-3x at the default
/// init, which leaves the deepest gradients near the finite-difference noise
/// floor. Scaled-up down kernels and random biases keep every level O(1).
inline void keepActivationsOrderOne(ParamSet<double>& P, const std::string& prefix, Rng& rng)
{
  for (std::size_t i = 0; i < P.size(); ++i)
  {
    const auto& name = P.name(i);
    if (name.rfind(prefix, 0) != 0) continue;
    if (name.rfind(prefix + "down", 0) == 0 && name.ends_with(".kernel")) P.at(i) *= 2.5;
    if (name.ends_with(".bias") && name != prefix + "out.bias")
      for (auto& v : P.at(i).data()) v = rng.uniform(-0.3, 0.3);
  }
}

} // namespace detail

/// Runs the whole suite; `maxCoords` bounds the coordinates probed per tensor.
inline std::vector<GradCheckEntry> runGradientSuite(std::uint64_t seed, double eps = 1e-5,
                                                    std::size_t maxCoords = 48)
{
  using detail::checkModule;
  using detail::keepActivationsOrderOne;
  using detail::offKinkTensor;
  using detail::runLayer;
  using detail::uniformTensor;
  using P_t = ParamSet<double>;
  using G_t = ParamSet<double>*;
  using Y_t = const Tensor<double>*;

  Rng                         rng(seed);
  std::vector<GradCheckEntry> out;

  {
    P_t P;
    P.add("x", uniformTensor({3, 7, 6}, rng));
    P.add("kernel", uniformTensor({4, 3, 3, 3}, rng));
    P.add("bias", uniformTensor({4}, rng));
    checkModule(out, "conv2d", P, [](const P_t& p, G_t g, Y_t gy) {
      Binder<double>      b(p, g);
      Conv2dLayer<double> l(b("kernel"), b("bias"), {2, 1, 1});
      return runLayer(l, p, g, gy);
    }, rng, eps, maxCoords);
  }
  {
    P_t P;
    P.add("x", uniformTensor({3, 4, 4}, rng));
    P.add("kernel", uniformTensor({3, 2, 5, 5}, rng));
    P.add("bias", uniformTensor({2}, rng));
    checkModule(out, "transposed_conv2d", P, [](const P_t& p, G_t g, Y_t gy) {
      Binder<double>                b(p, g);
      TransposedConv2dLayer<double> l(b("kernel"), b("bias"), {2, 2, 1});
      auto                          y = l.forward(p["x"], {7, 7});
      if (gy) (*g)["x"] += l.backward(*gy);
      return y;
    }, rng, eps, maxCoords);
  }
  {
    P_t P;
    P.add("x", uniformTensor({3, 9}, rng));
    P.add("kernel", uniformTensor({4, 3, 5}, rng));
    P.add("bias", uniformTensor({4}, rng));
    checkModule(out, "conv1d", P, [](const P_t& p, G_t g, Y_t gy) {
      Binder<double>      b(p, g);
      Conv1dLayer<double> l(b("kernel"), b("bias"), {1, 2, 1});
      return runLayer(l, p, g, gy);
    }, rng, eps, maxCoords);
  }
  {
    P_t P;
    P.add("x", uniformTensor({5, 6}, rng));
    P.add("weight", uniformTensor({4, 6}, rng));
    P.add("bias", uniformTensor({4}, rng));
    checkModule(out, "dense", P, [](const P_t& p, G_t g, Y_t gy) {
      Binder<double>     b(p, g);
      DenseLayer<double> l(b("weight"), b("bias"));
      return runLayer(l, p, g, gy);
    }, rng, eps, maxCoords);
  }
  for (auto [name, act] : {std::pair{"relu", Activation::relu()},
                           std::pair{"leaky_relu", Activation::leakyRelu(0.2)},
                           std::pair{"sigmoid", Activation::sigmoid()}})
  {
    P_t P;
    P.add("x", offKinkTensor({3, 4, 5}, rng));
    checkModule(out, name, P, [act](const P_t& p, G_t g, Y_t gy) {
      ActivationLayer<double> l(act);
      return runLayer(l, p, g, gy);
    }, rng, eps, maxCoords);
  }
  for (auto [name, axis] : {std::pair{"axis_mean_width", Axis::width},
                            std::pair{"axis_mean_height", Axis::height}})
  {
    P_t P;
    P.add("x", uniformTensor({3, 4, 5}, rng));
    checkModule(out, name, P, [axis](const P_t& p, G_t g, Y_t gy) {
      AxisMeanLayer<double> l(axis);
      return runLayer(l, p, g, gy);
    }, rng, eps, maxCoords);
  }
  {
    P_t P;
    P.add("x", uniformTensor({3, 6, 5}, rng));
    addStripePoolParams(P, "", 3, 3, rng);
    for (const char* bias : {"conv_h.bias", "conv_v.bias", "fuse.bias"})
      P[bias] = uniformTensor({3}, rng, -0.5, 0.5);
    checkModule(out, "stripe_pool", P, [](const P_t& p, G_t g, Y_t gy) {
      StripePool<double> l(Binder<double>(p, g), 3);
      return runLayer(l, p, g, gy);
    }, rng, eps, maxCoords);
  }
  {
    SUNetConfig cfg = tinyModelConfig().sunet;
    P_t         P;
    P.add("x", uniformTensor({2, 33, 8}, rng));
    addSUNetParams(P, cfg, rng, "", 0.5);
    keepActivationsOrderOne(P, "", rng);
    checkModule(out, "sunet", P, [cfg](const P_t& p, G_t g, Y_t gy) {
      SUNet<double> l(Binder<double>(p, g), cfg);
      return runLayer(l, p, g, gy);
    }, rng, eps, maxCoords);
  }
  {
    const ModelConfig cfg = tinyModelConfig(17);
    P_t               P = initParams<double>(cfg, rng.next());
    P["sunet/out.bias"].fill(0.5);
    keepActivationsOrderOne(P, "sunet/", rng);
    score::FrameScore fs;
    Tensor<double>    prev = uniformTensor({cfg.embed.bins, 6}, rng, 0.0, 2.0);
    for (std::size_t t = 0; t < 6; ++t)
    {
      fs.phonemeIds.push_back(rng.below(cfg.embed.phonemeVocab));
      fs.noteIds.push_back(rng.below(cfg.embed.noteVocab));
    }
    checkModule(out, "acoustic_model", P, [&](const P_t& p, G_t g, Y_t gy) {
      AcousticModel<double> m(cfg, p, g);
      auto                  y = m.forward(fs, prev);
      if (gy) m.backward(*gy);
      return y;
    }, rng, eps, maxCoords);
  }
  return out;
}

/// Collapses the per-tensor entries to the worst error per op, in suite order.
inline std::vector<GradCheckEntry> worstPerOp(const std::vector<GradCheckEntry>& entries)
{
  std::vector<GradCheckEntry> worst;
  for (const auto& e : entries)
  {
    auto it = std::find_if(worst.begin(), worst.end(), [&](const auto& w) { return w.op == e.op; });
    if (it == worst.end())
      worst.push_back(e);
    else if (e.result.maxRelError > it->result.maxRelError)
      *it = e;
  }
  return worst;
}

} // namespace susing::model
