#pragma once

// Score side: phoneme/note embedding lookup, dense projection to the bin count
// and a two-layer Conv1D pre-net. Spectrum side: the same Conv1D pre-net on the
// previous segment's magnitudes.

#include "../core/layers.hpp"
#include "../core/ops.hpp"
#include "../core/rng.hpp"
#include "../score/align.hpp"
#include "config.hpp"
#include "params.hpp"
#include "sunet.hpp"

#include <cmath>
#include <string>

namespace susing::model {

template <typename T>
void addPrenetParams(ParamSet<T>& p, const std::string& prefix, std::size_t bins,
                     std::size_t kernel, double leakySlope, Rng& rng)
{
  const double fan = double(bins * kernel);
  const double leakGain = 2.0 / (1.0 + leakySlope * leakySlope);
  p.add(prefix + "conv1.kernel",
        detail::gaussian<T>({bins, bins, kernel}, std::sqrt(leakGain / fan), rng));
  p.add(prefix + "conv1.bias", Tensor<T>({bins}));
  p.add(prefix + "conv2.kernel", detail::gaussian<T>({bins, bins, kernel}, std::sqrt(1.0 / fan), rng));
  p.add(prefix + "conv2.bias", Tensor<T>({bins}));
}

template <typename T>
void addEncoderParams(ParamSet<T>& p, const EmbedderConfig& cfg, double leakySlope, Rng& rng)
{
  cfg.validate();
  p.add("embed/phoneme", detail::gaussian<T>({cfg.phonemeVocab, cfg.phonemeDim}, 1.0, rng));
  p.add("embed/note", detail::gaussian<T>({cfg.noteVocab, cfg.noteDim}, 1.0, rng));
  p.add("score_prenet/dense.weight",
        detail::gaussian<T>({cfg.bins, cfg.concatDim()}, std::sqrt(1.0 / double(cfg.concatDim())), rng));
  p.add("score_prenet/dense.bias", Tensor<T>({cfg.bins}));
  addPrenetParams(p, "score_prenet/", cfg.bins, cfg.prenetKernel, leakySlope, rng);
  addPrenetParams(p, "spec_prenet/", cfg.bins, cfg.prenetKernel, leakySlope, rng);
}

/// conv1d -> leaky_relu -> conv1d, length preserving. [bins, T] -> [bins, T].
template <typename T>
class Prenet
{
public:
  Prenet(const Binder<T>& bind, std::size_t kernel, double leakySlope)
      : mConv1(bind("conv1.kernel"), bind("conv1.bias"), {1, kernel / 2, 1}),
        mAct(Activation::leakyRelu(leakySlope)),
        mConv2(bind("conv2.kernel"), bind("conv2.bias"), {1, kernel / 2, 1})
  {}

  Tensor<T> forward(const Tensor<T>& x) { return mConv2.forward(mAct.forward(mConv1.forward(x))); }
  Tensor<T> backward(const Tensor<T>& gy) { return mConv1.backward(mAct.backward(mConv2.backward(gy))); }

private:
  Conv1dLayer<T>     mConv1;
  ActivationLayer<T> mAct;
  Conv1dLayer<T>     mConv2;
};

/// Embedding lookup: per frame, phoneme vector then note vector, as [T, concat].
template <typename T>
Tensor<T> lookupEmbeddings(const score::FrameScore& fs, const Tensor<T>& phonemeTable,
                           const Tensor<T>& noteTable)
{
  const std::size_t T_ = fs.frames(), dp = phonemeTable.dim(1), dn = noteTable.dim(1);
  if (T_ == 0) throw ArgumentError("embed_score: empty frame score");
  if (fs.phonemeIds.size() != T_) throw DimensionError("embed_score: id arrays differ in length");
  Tensor<T> e({T_, dp + dn});
  for (std::size_t t = 0; t < T_; ++t)
  {
    const std::size_t p = fs.phonemeIds[t], n = fs.noteIds[t];
    if (p >= phonemeTable.dim(0))
      throw IndexError("embed_score: phoneme id " + std::to_string(p) + " out of range at frame " +
                       std::to_string(t));
    if (n >= noteTable.dim(0))
      throw IndexError("embed_score: note id " + std::to_string(n) + " out of range at frame " +
                       std::to_string(t));
    for (std::size_t d = 0; d < dp; ++d) e(t, d) = phonemeTable(p, d);
    for (std::size_t d = 0; d < dn; ++d) e(t, dp + d) = noteTable(n, d);
  }
  return e;
}

template <typename T>
class ScoreEncoder
{
public:
  ScoreEncoder(const Binder<T>& bind, const EmbedderConfig& cfg, double leakySlope)
      : mPhoneme(bind("embed/phoneme")), mNote(bind("embed/note")),
        mDense(bind("score_prenet/dense.weight"), bind("score_prenet/dense.bias")),
        mPrenet(bind.scoped("score_prenet/"), cfg.prenetKernel, leakySlope)
  {}

  /// [bins, T]
  Tensor<T> forward(const score::FrameScore& fs)
  {
    mScore = fs;
    const auto e = lookupEmbeddings(fs, *mPhoneme.value, *mNote.value);
    return mPrenet.forward(transpose2d(mDense.forward(e)));
  }

  void backward(const Tensor<T>& gy)
  {
    const auto ge = mDense.backward(transpose2d(mPrenet.backward(gy)));
    const std::size_t dp = mPhoneme.value->dim(1), dn = mNote.value->dim(1);
    if (mPhoneme.grad)
      for (std::size_t t = 0; t < mScore.frames(); ++t)
        for (std::size_t d = 0; d < dp; ++d) (*mPhoneme.grad)(mScore.phonemeIds[t], d) += ge(t, d);
    if (mNote.grad)
      for (std::size_t t = 0; t < mScore.frames(); ++t)
        for (std::size_t d = 0; d < dn; ++d) (*mNote.grad)(mScore.noteIds[t], d) += ge(t, dp + d);
  }

private:
  ParamRef<T>        mPhoneme, mNote;
  DenseLayer<T>      mDense;
  Prenet<T>          mPrenet;
  score::FrameScore  mScore;
};

// Forward-only entry points for the individual stages.

/// [concat, T]
template <typename T>
Tensor<T> embedScore(const score::FrameScore& fs, const ParamSet<T>& params)
{
  return transpose2d(lookupEmbeddings(fs, params["embed/phoneme"], params["embed/note"]));
}

/// [concat, T] -> [bins, T]
template <typename T>
Tensor<T> scorePrenet(const Tensor<T>& embedded, const ParamSet<T>& params,
                      const EmbedderConfig& cfg, double leakySlope = 0.2)
{
  const auto d = dense(transpose2d(embedded), params["score_prenet/dense.weight"],
                       params["score_prenet/dense.bias"]);
  Prenet<T> net(Binder<T>(params, nullptr, "score_prenet/"), cfg.prenetKernel, leakySlope);
  return net.forward(transpose2d(d));
}

/// [bins, T] -> [bins, T]
template <typename T>
Tensor<T> specPrenet(const Tensor<T>& prev, const ParamSet<T>& params, const EmbedderConfig& cfg,
                     double leakySlope = 0.2)
{
  if (prev.rank() != 2 || prev.dim(0) != cfg.bins)
    throw DimensionError("spec_prenet: expected " + std::to_string(cfg.bins) + " bins, got " +
                         shapeString(prev.shape()));
  Prenet<T> net(Binder<T>(params, nullptr, "spec_prenet/"), cfg.prenetKernel, leakySlope);
  return net.forward(prev);
}

} // namespace susing::model
