#pragma once

#include "../core/layers.hpp"
#include "../core/ops.hpp"
#include "../core/rng.hpp"
#include "params.hpp"

#include <Eigen/Core>

#include <cmath>
#include <string>

namespace susing::model {

/// Registers conv_h / conv_v (1-D, channel preserving) and the 1x1 fuse conv.
template <typename T>
void addStripePoolParams(ParamSet<T>& p, const std::string& prefix, std::size_t channels,
                         std::size_t kernel, Rng& rng)
{
  const double std1d = std::sqrt(1.0 / double(channels * kernel));
  const double stdFuse = std::sqrt(1.0 / double(channels));
  for (const char* dir : {"conv_h", "conv_v"})
  {
    Tensor<T> k({channels, channels, kernel});
    for (auto& v : k.data()) v = T(rng.normal() * std1d);
    p.add(prefix + dir + ".kernel", std::move(k));
    p.add(prefix + dir + ".bias", Tensor<T>({channels}));
  }
  Tensor<T> f({channels, channels, 1, 1});
  for (auto& v : f.data()) v = T(rng.normal() * stdFuse);
  p.add(prefix + "fuse.kernel", std::move(f));
  p.add(prefix + "fuse.bias", Tensor<T>({channels}));
}

/// z = x * sigmoid(fuse(broadcast(conv_h(row means)) + broadcast(conv_v(column
/// means)))). fuse is linear and pointwise, so it is applied to the two pooled
/// stripes before broadcasting instead of to the full C x H x W sum.
template <typename T>
class StripePool
{
public:
  StripePool(const Binder<T>& bind, std::size_t kernel)
      : mRowMean(Axis::width), mColMean(Axis::height),
        mConvH(bind("conv_h.kernel"), bind("conv_h.bias"), {1, kernel / 2, 1}),
        mConvV(bind("conv_v.kernel"), bind("conv_v.bias"), {1, kernel / 2, 1}),
        mFuse(bind("fuse.kernel")), mFuseBias(bind("fuse.bias"))
  {}

  Tensor<T> forward(const Tensor<T>& x)
  {
    if (x.rank() != 3) throw DimensionError("stripe_pool expects [C,H,W]");
    const std::size_t C = x.dim(0), H = x.dim(1), W = x.dim(2);
    if (mFuse.value->dim(0) != C || mFuse.value->dim(1) != C)
      throw DimensionError("stripe_pool: input has " + std::to_string(C) +
                           " channels, parameters expect " + std::to_string(mFuse.value->dim(0)));
    mYh = mConvH.forward(mRowMean.forward(x));
    mYv = mConvV.forward(mColMean.forward(x));
    const auto gh = fuse(mYh), gv = fuse(mYv);
    const auto& b = *mFuseBias.value;

    Tensor<T> gate({C, H, W}), z({C, H, W});
    for (std::size_t c = 0; c < C; ++c)
      for (std::size_t i = 0; i < H; ++i)
        for (std::size_t j = 0; j < W; ++j)
        {
          const T s = sigmoid(gh(c, i) + gv(c, j) + b[c]);
          gate(c, i, j) = s;
          z(c, i, j) = x(c, i, j) * s;
        }
    mInput.store(x);
    mGate.store(std::move(gate));
    return z;
  }

  Tensor<T> backward(const Tensor<T>& gz)
  {
    const auto& x = mInput.get("stripe_pool");
    const auto& s = mGate.get("stripe_pool");
    x.requireSameShape(gz, "stripe_pool backward");
    const std::size_t C = x.dim(0), H = x.dim(1), W = x.dim(2);

    Tensor<T> gx({C, H, W}), dgh({C, H}), dgv({C, W}), db({C});
    for (std::size_t c = 0; c < C; ++c)
      for (std::size_t i = 0; i < H; ++i)
        for (std::size_t j = 0; j < W; ++j)
        {
          const T sv = s(c, i, j), g = gz(c, i, j);
          gx(c, i, j) = g * sv;
          const T gg = g * x(c, i, j) * sv * (T{1} - sv);
          dgh(c, i) += gg;
          dgv(c, j) += gg;
          db[c] += gg;
        }
    accumulate(mFuseBias.grad, db);

    using Map = Eigen::Map<const Eigen::Matrix<T, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>>;
    const auto cc = static_cast<Eigen::Index>(C);
    Map        F(mFuse.value->ptr(), cc, cc);
    Map        DH(dgh.ptr(), cc, Eigen::Index(H)), DV(dgv.ptr(), cc, Eigen::Index(W));
    Map        YH(mYh.ptr(), cc, Eigen::Index(H)), YV(mYv.ptr(), cc, Eigen::Index(W));
    if (mFuse.grad)
    {
      Tensor<T> dF({C, C, 1, 1});
      Eigen::Map<Eigen::Matrix<T, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>>(dF.ptr(), cc, cc)
          .noalias() = DH * YH.transpose() + DV * YV.transpose();
      *mFuse.grad += dF;
    }
    Tensor<T> dyh({C, H}), dyv({C, W});
    Eigen::Map<Eigen::Matrix<T, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>>(dyh.ptr(), cc,
                                                                                   Eigen::Index(H))
        .noalias() = F.transpose() * DH;
    Eigen::Map<Eigen::Matrix<T, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>>(dyv.ptr(), cc,
                                                                                   Eigen::Index(W))
        .noalias() = F.transpose() * DV;

    gx += mRowMean.backward(mConvH.backward(dyh));
    gx += mColMean.backward(mConvV.backward(dyv));
    return gx;
  }

private:
  Tensor<T> fuse(const Tensor<T>& y) const
  {
    using Mat = Eigen::Matrix<T, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
    const auto cc = static_cast<Eigen::Index>(y.dim(0)), n = static_cast<Eigen::Index>(y.dim(1));
    Tensor<T>  out(y.shape());
    Eigen::Map<Mat>(out.ptr(), cc, n).noalias() =
        Eigen::Map<const Mat>(mFuse.value->ptr(), cc, cc) * Eigen::Map<const Mat>(y.ptr(), cc, n);
    return out;
  }

  AxisMeanLayer<T> mRowMean, mColMean;
  Conv1dLayer<T>   mConvH, mConvV;
  ParamRef<T>      mFuse, mFuseBias;
  Tensor<T>        mYh, mYv;
  Retained<T>      mInput, mGate;
};

/// Forward-only convenience wrapper.
template <typename T>
Tensor<T> stripePool(const Tensor<T>& x, const ParamSet<T>& params, const std::string& prefix,
                     std::size_t kernel = 3)
{
  StripePool<T> layer(Binder<T>(params, nullptr, prefix), kernel);
  return layer.forward(x);
}

} // namespace susing::model
