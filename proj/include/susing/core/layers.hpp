#pragma once

// Stateful wrappers around the kernels in ops.hpp. Each layer retains the
// input of its last forward call; backward consumes it and accumulates
// parameter gradients into caller-owned tensors.

#include "error.hpp"
#include "ops.hpp"
#include "tensor.hpp"

#include <optional>
#include <string>
#include <utility>

namespace susing {

template <typename T>
class Retained
{
public:
  void store(const Tensor<T>& t) { mValue = t; }
  void store(Tensor<T>&& t) { mValue = std::move(t); }

  const Tensor<T>& get(const char* layer) const
  {
    if (!mValue)
      throw StateError(std::string(layer) + ": backward called before forward");
    return *mValue;
  }

  bool has() const noexcept { return mValue.has_value(); }
  void clear() noexcept { mValue.reset(); }

private:
  std::optional<Tensor<T>> mValue;
};

/// Parameter slot: a value and the gradient accumulator it feeds.
template <typename T>
struct ParamRef
{
  const Tensor<T>* value = nullptr;
  Tensor<T>*       grad = nullptr;
};

template <typename T>
void accumulate(Tensor<T>* into, const Tensor<T>& g)
{
  if (into) *into += g;
}

template <typename T>
class Conv2dLayer
{
public:
  Conv2dLayer(ParamRef<T> kernel, ParamRef<T> bias, ConvGeometry geometry)
      : mKernel(kernel), mBias(bias), mGeometry(geometry)
  {}

  Tensor<T> forward(const Tensor<T>& x)
  {
    mInput.store(x);
    return conv2d(x, spec());
  }

  Tensor<T> backward(const Tensor<T>& gy)
  {
    auto g = conv2dBackward(mInput.get("conv2d"), spec(), gy);
    accumulate(mKernel.grad, g.kernel);
    accumulate(mBias.grad, g.bias);
    return std::move(g.input);
  }

private:
  ConvSpec<T> spec() const { return {*mKernel.value, *mBias.value, mGeometry}; }

  ParamRef<T>  mKernel, mBias;
  ConvGeometry mGeometry;
  Retained<T>  mInput;
};

template <typename T>
class TransposedConv2dLayer
{
public:
  TransposedConv2dLayer(ParamRef<T> kernel, ParamRef<T> bias, ConvGeometry geometry)
      : mKernel(kernel), mBias(bias), mGeometry(geometry)
  {}

  Tensor<T> forward(const Tensor<T>& x, std::pair<std::size_t, std::size_t> outSize)
  {
    mInput.store(x);
    return transposedConv2d(x, spec(), outSize);
  }

  Tensor<T> backward(const Tensor<T>& gy)
  {
    auto g = transposedConv2dBackward(mInput.get("transposed_conv2d"), spec(), gy);
    accumulate(mKernel.grad, g.kernel);
    accumulate(mBias.grad, g.bias);
    return std::move(g.input);
  }

private:
  ConvSpec<T> spec() const { return {*mKernel.value, *mBias.value, mGeometry}; }

  ParamRef<T>  mKernel, mBias;
  ConvGeometry mGeometry;
  Retained<T>  mInput;
};

template <typename T>
class Conv1dLayer
{
public:
  Conv1dLayer(ParamRef<T> kernel, ParamRef<T> bias, ConvGeometry geometry)
      : mKernel(kernel), mBias(bias), mGeometry(geometry)
  {}

  Tensor<T> forward(const Tensor<T>& x)
  {
    mInput.store(x);
    return conv1d(x, spec());
  }

  Tensor<T> backward(const Tensor<T>& gy)
  {
    auto g = conv1dBackward(mInput.get("conv1d"), spec(), gy);
    accumulate(mKernel.grad, g.kernel);
    accumulate(mBias.grad, g.bias);
    return std::move(g.input);
  }

private:
  ConvSpec<T> spec() const { return {*mKernel.value, *mBias.value, mGeometry}; }

  ParamRef<T>  mKernel, mBias;
  ConvGeometry mGeometry;
  Retained<T>  mInput;
};

template <typename T>
class DenseLayer
{
public:
  DenseLayer(ParamRef<T> weight, ParamRef<T> bias) : mWeight(weight), mBias(bias) {}

  Tensor<T> forward(const Tensor<T>& x)
  {
    mInput.store(x);
    return dense(x, *mWeight.value, *mBias.value);
  }

  Tensor<T> backward(const Tensor<T>& gy)
  {
    auto g = denseBackward(mInput.get("dense"), *mWeight.value, gy);
    accumulate(mWeight.grad, g.weight);
    accumulate(mBias.grad, g.bias);
    return std::move(g.input);
  }

private:
  ParamRef<T> mWeight, mBias;
  Retained<T> mInput;
};

template <typename T>
class ActivationLayer
{
public:
  explicit ActivationLayer(Activation act) : mAct(act) {}

  Tensor<T> forward(const Tensor<T>& x)
  {
    mInput.store(x);
    return activation(x, mAct);
  }

  Tensor<T> backward(const Tensor<T>& gy)
  {
    return activationBackward(mInput.get("activation"), mAct, gy);
  }

private:
  Activation  mAct;
  Retained<T> mInput;
};

template <typename T>
class AxisMeanLayer
{
public:
  explicit AxisMeanLayer(Axis axis) : mAxis(axis) {}

  Tensor<T> forward(const Tensor<T>& x)
  {
    mShape = x.shape();
    return axisMean(x, mAxis);
  }

  Tensor<T> backward(const Tensor<T>& gy)
  {
    if (!mShape) throw StateError("axis_mean: backward called before forward");
    return axisMeanBackward(*mShape, mAxis, gy);
  }

private:
  Axis                 mAxis;
  std::optional<Shape> mShape;
};

} // namespace susing
