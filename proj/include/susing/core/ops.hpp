#pragma once

// Forward and backward kernels for the operators the acoustic model needs.
//
// Convolutions use the cross-correlation convention (no kernel flip), zero
// padding, and are lowered to im2col + GEMM. All reductions run in a fixed
// row-major order, so results are bit-reproducible for a given build.

#include "error.hpp"
#include "tensor.hpp"

#include <Eigen/Core>

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <string>
#include <vector>

namespace susing {

struct ConvGeometry
{
  std::size_t stride = 1;
  std::size_t padding = 0;
  std::size_t dilation = 1;
};

/// Kernel layout is (out_ch, in_ch, kH, kW) for conv2d, (out_ch, in_ch, k) for
/// conv1d and (in_ch, out_ch, kH, kW) for transposed_conv2d, so a transposed
/// convolution sharing a conv2d kernel computes that convolution's adjoint.
template <typename T>
struct ConvSpec
{
  const Tensor<T>& kernel;
  const Tensor<T>& bias;
  ConvGeometry     geometry{};
};

template <typename T>
struct ConvGrads
{
  Tensor<T> input;
  Tensor<T> kernel;
  Tensor<T> bias;
};

template <typename T>
struct DenseGrads
{
  Tensor<T> input;
  Tensor<T> weight;
  Tensor<T> bias;
};

inline std::size_t convOutputSize(std::size_t in, std::size_t kernel,
                                  std::size_t stride, std::size_t padding)
{
  if (in + 2 * padding < kernel)
    throw DimensionError("convolution input " + std::to_string(in) + " + 2*" +
                         std::to_string(padding) + " padding is smaller than kernel " +
                         std::to_string(kernel));
  return (in + 2 * padding - kernel) / stride + 1;
}

namespace detail {

template <typename T>
using RowMat = Eigen::Matrix<T, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
template <typename T>
using MatMap = Eigen::Map<RowMat<T>>;
template <typename T>
using ConstMatMap = Eigen::Map<const RowMat<T>>;

struct Geom2d
{
  std::ptrdiff_t channels, h, w, kh, kw, sh, sw, ph, pw, oh, ow;

  std::ptrdiff_t rows() const { return channels * kh * kw; }
  std::ptrdiff_t cols() const { return oh * ow; }
};

template <typename T>
void im2col(const T* x, const Geom2d& g, T* cols)
{
  const std::ptrdiff_t n = g.cols();
  for (std::ptrdiff_t c = 0; c < g.channels; ++c)
    for (std::ptrdiff_t ky = 0; ky < g.kh; ++ky)
      for (std::ptrdiff_t kx = 0; kx < g.kw; ++kx)
      {
        T* dst = cols + ((c * g.kh + ky) * g.kw + kx) * n;
        for (std::ptrdiff_t oy = 0; oy < g.oh; ++oy)
        {
          const std::ptrdiff_t iy = oy * g.sh + ky - g.ph;
          T*                   row = dst + oy * g.ow;
          if (iy < 0 || iy >= g.h)
          {
            std::fill(row, row + g.ow, T{0});
            continue;
          }
          const T* src = x + (c * g.h + iy) * g.w;
          for (std::ptrdiff_t ox = 0; ox < g.ow; ++ox)
          {
            const std::ptrdiff_t ix = ox * g.sw + kx - g.pw;
            row[ox] = (ix >= 0 && ix < g.w) ? src[ix] : T{0};
          }
        }
      }
}

template <typename T>
void col2imAccumulate(const T* cols, const Geom2d& g, T* x)
{
  const std::ptrdiff_t n = g.cols();
  for (std::ptrdiff_t c = 0; c < g.channels; ++c)
    for (std::ptrdiff_t ky = 0; ky < g.kh; ++ky)
      for (std::ptrdiff_t kx = 0; kx < g.kw; ++kx)
      {
        const T* src = cols + ((c * g.kh + ky) * g.kw + kx) * n;
        for (std::ptrdiff_t oy = 0; oy < g.oh; ++oy)
        {
          const std::ptrdiff_t iy = oy * g.sh + ky - g.ph;
          if (iy < 0 || iy >= g.h) continue;
          T*       dst = x + (c * g.h + iy) * g.w;
          const T* row = src + oy * g.ow;
          for (std::ptrdiff_t ox = 0; ox < g.ow; ++ox)
          {
            const std::ptrdiff_t ix = ox * g.sw + kx - g.pw;
            if (ix >= 0 && ix < g.w) dst[ix] += row[ox];
          }
        }
      }
}

inline void checkGeometry(const ConvGeometry& g)
{
  if (g.dilation != 1)
    throw ArgumentError("only dilation 1 is supported, got " +
                        std::to_string(g.dilation));
  if (g.stride == 0) throw ArgumentError("stride must be positive");
}

template <typename T>
void checkBias(const Tensor<T>& bias, std::size_t outCh)
{
  if (bias.rank() != 1 || bias.dim(0) != outCh)
    throw DimensionError("bias shape " + shapeString(bias.shape()) +
                         " does not match " + std::to_string(outCh) + " output channels");
}

template <typename T>
bool isPointwise(const Geom2d& g)
{
  return g.kh == 1 && g.kw == 1 && g.sh == 1 && g.sw == 1 && g.ph == 0 && g.pw == 0;
}

// out(outCh x cols) = K(outCh x rows) * im2col(x) + bias
template <typename T>
Tensor<T> convForward(const T* x, const Geom2d& g, const Tensor<T>& kernel,
                      const Tensor<T>& bias, std::size_t outCh, Shape outShape)
{
  Tensor<T>      out(std::move(outShape));
  std::vector<T> colsBuf;
  const T*       cols = x;
  if (!isPointwise<T>(g))
  {
    colsBuf.resize(static_cast<std::size_t>(g.rows() * g.cols()));
    im2col(x, g, colsBuf.data());
    cols = colsBuf.data();
  }
  ConstMatMap<T> K(kernel.ptr(), static_cast<std::ptrdiff_t>(outCh), g.rows());
  ConstMatMap<T> C(cols, g.rows(), g.cols());
  MatMap<T>      O(out.ptr(), static_cast<std::ptrdiff_t>(outCh), g.cols());
  O.noalias() = K * C;
  for (std::size_t o = 0; o < outCh; ++o)
  {
    T* row = out.ptr() + o * static_cast<std::size_t>(g.cols());
    for (std::ptrdiff_t i = 0; i < g.cols(); ++i) row[i] += bias[o];
  }
  return out;
}

template <typename T>
ConvGrads<T> convBackward(const T* x, const Geom2d& g, const Tensor<T>& kernel,
                          std::size_t outCh, const T* gy, Shape inShape)
{
  ConvGrads<T> grads{Tensor<T>(std::move(inShape)), Tensor<T>::zerosLike(kernel),
                     Tensor<T>({outCh})};
  const bool     pointwise = isPointwise<T>(g);
  std::vector<T> colsBuf;
  const T*       cols = x;
  if (!pointwise)
  {
    colsBuf.resize(static_cast<std::size_t>(g.rows() * g.cols()));
    im2col(x, g, colsBuf.data());
    cols = colsBuf.data();
  }
  ConstMatMap<T> K(kernel.ptr(), static_cast<std::ptrdiff_t>(outCh), g.rows());
  ConstMatMap<T> C(cols, g.rows(), g.cols());
  ConstMatMap<T> GY(gy, static_cast<std::ptrdiff_t>(outCh), g.cols());
  MatMap<T>      GK(grads.kernel.ptr(), static_cast<std::ptrdiff_t>(outCh), g.rows());
  GK.noalias() = GY * C.transpose();
  for (std::size_t o = 0; o < outCh; ++o)
  {
    const T* row = gy + o * static_cast<std::size_t>(g.cols());
    T        acc{0};
    for (std::ptrdiff_t i = 0; i < g.cols(); ++i) acc += row[i];
    grads.bias[o] = acc;
  }
  if (pointwise)
  {
    MatMap<T> GX(grads.input.ptr(), g.rows(), g.cols());
    GX.noalias() = K.transpose() * GY;
  }
  else
  {
    RowMat<T> gcols = K.transpose() * GY;
    col2imAccumulate(gcols.data(), g, grads.input.ptr());
  }
  return grads;
}

} // namespace detail

/// 2-D convolution of x [C_in, H, W]; output [C_out, H', W'] with
/// H' = floor((H + 2 pad - kH) / stride) + 1.
template <typename T>
Tensor<T> conv2d(const Tensor<T>& x, const ConvSpec<T>& spec)
{
  detail::checkGeometry(spec.geometry);
  const auto& k = spec.kernel;
  if (x.rank() != 3) throw DimensionError("conv2d expects input [C,H,W]");
  if (k.rank() != 4) throw DimensionError("conv2d expects kernel [O,I,kH,kW]");
  if (k.dim(1) != x.dim(0))
    throw DimensionError("conv2d: input has " + std::to_string(x.dim(0)) +
                         " channels, kernel expects " + std::to_string(k.dim(1)));
  detail::checkBias(spec.bias, k.dim(0));
  const auto s = spec.geometry.stride, p = spec.geometry.padding;
  const auto oh = convOutputSize(x.dim(1), k.dim(2), s, p);
  const auto ow = convOutputSize(x.dim(2), k.dim(3), s, p);
  detail::Geom2d g{(std::ptrdiff_t)x.dim(0), (std::ptrdiff_t)x.dim(1),
                   (std::ptrdiff_t)x.dim(2), (std::ptrdiff_t)k.dim(2),
                   (std::ptrdiff_t)k.dim(3), (std::ptrdiff_t)s, (std::ptrdiff_t)s,
                   (std::ptrdiff_t)p, (std::ptrdiff_t)p, (std::ptrdiff_t)oh,
                   (std::ptrdiff_t)ow};
  return detail::convForward(x.ptr(), g, k, spec.bias, k.dim(0), {k.dim(0), oh, ow});
}

template <typename T>
ConvGrads<T> conv2dBackward(const Tensor<T>& x, const ConvSpec<T>& spec,
                            const Tensor<T>& gy)
{
  detail::checkGeometry(spec.geometry);
  const auto& k = spec.kernel;
  const auto  s = spec.geometry.stride, p = spec.geometry.padding;
  const auto  oh = convOutputSize(x.dim(1), k.dim(2), s, p);
  const auto  ow = convOutputSize(x.dim(2), k.dim(3), s, p);
  if (gy.shape() != Shape{k.dim(0), oh, ow})
    throw DimensionError("conv2dBackward: upstream gradient shape " +
                         shapeString(gy.shape()));
  detail::Geom2d g{(std::ptrdiff_t)x.dim(0), (std::ptrdiff_t)x.dim(1),
                   (std::ptrdiff_t)x.dim(2), (std::ptrdiff_t)k.dim(2),
                   (std::ptrdiff_t)k.dim(3), (std::ptrdiff_t)s, (std::ptrdiff_t)s,
                   (std::ptrdiff_t)p, (std::ptrdiff_t)p, (std::ptrdiff_t)oh,
                   (std::ptrdiff_t)ow};
  return detail::convBackward(x.ptr(), g, k, k.dim(0), gy.ptr(), x.shape());
}

/// 1-D convolution of x [C_in, L] with kernel [C_out, C_in, k].
template <typename T>
Tensor<T> conv1d(const Tensor<T>& x, const ConvSpec<T>& spec)
{
  detail::checkGeometry(spec.geometry);
  const auto& k = spec.kernel;
  if (x.rank() != 2) throw DimensionError("conv1d expects input [C,L]");
  if (k.rank() != 3) throw DimensionError("conv1d expects kernel [O,I,k]");
  if (k.dim(1) != x.dim(0))
    throw DimensionError("conv1d: input has " + std::to_string(x.dim(0)) +
                         " channels, kernel expects " + std::to_string(k.dim(1)));
  detail::checkBias(spec.bias, k.dim(0));
  const auto s = spec.geometry.stride, p = spec.geometry.padding;
  const auto ol = convOutputSize(x.dim(1), k.dim(2), s, p);
  detail::Geom2d g{(std::ptrdiff_t)x.dim(0), 1, (std::ptrdiff_t)x.dim(1), 1,
                   (std::ptrdiff_t)k.dim(2), 1, (std::ptrdiff_t)s, 0,
                   (std::ptrdiff_t)p, 1, (std::ptrdiff_t)ol};
  return detail::convForward(x.ptr(), g, k, spec.bias, k.dim(0), {k.dim(0), ol});
}

template <typename T>
ConvGrads<T> conv1dBackward(const Tensor<T>& x, const ConvSpec<T>& spec,
                            const Tensor<T>& gy)
{
  detail::checkGeometry(spec.geometry);
  const auto& k = spec.kernel;
  const auto  s = spec.geometry.stride, p = spec.geometry.padding;
  const auto  ol = convOutputSize(x.dim(1), k.dim(2), s, p);
  if (gy.shape() != Shape{k.dim(0), ol})
    throw DimensionError("conv1dBackward: upstream gradient shape " +
                         shapeString(gy.shape()));
  detail::Geom2d g{(std::ptrdiff_t)x.dim(0), 1, (std::ptrdiff_t)x.dim(1), 1,
                   (std::ptrdiff_t)k.dim(2), 1, (std::ptrdiff_t)s, 0,
                   (std::ptrdiff_t)p, 1, (std::ptrdiff_t)ol};
  return detail::convBackward(x.ptr(), g, k, k.dim(0), gy.ptr(), x.shape());
}

/// Transposed 2-D convolution of x [C_in, H, W] with kernel [C_in, C_out, kH, kW].
/// `outSize` must map back to (H, W) under the forward size formula; it is
/// explicit because several output sizes collapse to the same input size when
/// stride > 1.
template <typename T>
Tensor<T> transposedConv2d(const Tensor<T>& x, const ConvSpec<T>& spec,
                           std::pair<std::size_t, std::size_t> outSize)
{
  detail::checkGeometry(spec.geometry);
  const auto& k = spec.kernel;
  if (x.rank() != 3) throw DimensionError("transposedConv2d expects input [C,H,W]");
  if (k.rank() != 4) throw DimensionError("transposedConv2d expects kernel [I,O,kH,kW]");
  if (k.dim(0) != x.dim(0))
    throw DimensionError("transposedConv2d: input has " + std::to_string(x.dim(0)) +
                         " channels, kernel expects " + std::to_string(k.dim(0)));
  const std::size_t outCh = k.dim(1);
  detail::checkBias(spec.bias, outCh);
  const auto s = spec.geometry.stride, p = spec.geometry.padding;
  const auto [oh, ow] = outSize;
  if (oh == 0 || ow == 0 || oh + 2 * p < k.dim(2) || ow + 2 * p < k.dim(3) ||
      convOutputSize(oh, k.dim(2), s, p) != x.dim(1) ||
      convOutputSize(ow, k.dim(3), s, p) != x.dim(2))
    throw DimensionError("transposedConv2d: output size (" + std::to_string(oh) + "," +
                         std::to_string(ow) + ") is incompatible with input " +
                         shapeString(x.shape()) + ", stride " + std::to_string(s) +
                         ", padding " + std::to_string(p));
  // Geometry of the mirrored forward convolution: [outCh, oh, ow] -> x.
  detail::Geom2d g{(std::ptrdiff_t)outCh, (std::ptrdiff_t)oh, (std::ptrdiff_t)ow,
                   (std::ptrdiff_t)k.dim(2), (std::ptrdiff_t)k.dim(3),
                   (std::ptrdiff_t)s, (std::ptrdiff_t)s, (std::ptrdiff_t)p,
                   (std::ptrdiff_t)p, (std::ptrdiff_t)x.dim(1), (std::ptrdiff_t)x.dim(2)};
  const auto inCh = static_cast<std::ptrdiff_t>(x.dim(0));
  detail::ConstMatMap<T> K(k.ptr(), inCh, g.rows());
  detail::ConstMatMap<T> X(x.ptr(), inCh, g.cols());
  Tensor<T>              out({outCh, oh, ow});
  if (detail::isPointwise<T>(g))
  {
    detail::MatMap<T> O(out.ptr(), g.rows(), g.cols());
    O.noalias() = K.transpose() * X;
  }
  else
  {
    detail::RowMat<T> cols = K.transpose() * X;
    detail::col2imAccumulate(cols.data(), g, out.ptr());
  }
  const std::size_t plane = oh * ow;
  for (std::size_t o = 0; o < outCh; ++o)
    for (std::size_t i = 0; i < plane; ++i) out[o * plane + i] += spec.bias[o];
  return out;
}

template <typename T>
ConvGrads<T> transposedConv2dBackward(const Tensor<T>& x, const ConvSpec<T>& spec,
                                      const Tensor<T>& gy)
{
  detail::checkGeometry(spec.geometry);
  const auto& k = spec.kernel;
  const std::size_t outCh = k.dim(1);
  if (gy.rank() != 3 || gy.dim(0) != outCh)
    throw DimensionError("transposedConv2dBackward: upstream gradient shape " +
                         shapeString(gy.shape()));
  const auto s = spec.geometry.stride, p = spec.geometry.padding;
  detail::Geom2d g{(std::ptrdiff_t)outCh, (std::ptrdiff_t)gy.dim(1),
                   (std::ptrdiff_t)gy.dim(2), (std::ptrdiff_t)k.dim(2),
                   (std::ptrdiff_t)k.dim(3), (std::ptrdiff_t)s, (std::ptrdiff_t)s,
                   (std::ptrdiff_t)p, (std::ptrdiff_t)p, (std::ptrdiff_t)x.dim(1),
                   (std::ptrdiff_t)x.dim(2)};
  const auto   inCh = static_cast<std::ptrdiff_t>(x.dim(0));
  ConvGrads<T> grads{Tensor<T>::zerosLike(x), Tensor<T>::zerosLike(k),
                     Tensor<T>({outCh})};
  std::vector<T> colsBuf;
  const T*       cols = gy.ptr();
  if (!detail::isPointwise<T>(g))
  {
    colsBuf.resize(static_cast<std::size_t>(g.rows() * g.cols()));
    detail::im2col(gy.ptr(), g, colsBuf.data());
    cols = colsBuf.data();
  }
  detail::ConstMatMap<T> K(k.ptr(), inCh, g.rows());
  detail::ConstMatMap<T> X(x.ptr(), inCh, g.cols());
  detail::ConstMatMap<T> C(cols, g.rows(), g.cols());
  detail::MatMap<T>      GX(grads.input.ptr(), inCh, g.cols());
  detail::MatMap<T>      GK(grads.kernel.ptr(), inCh, g.rows());
  GX.noalias() = K * C;
  GK.noalias() = X * C.transpose();
  const std::size_t plane = gy.dim(1) * gy.dim(2);
  for (std::size_t o = 0; o < outCh; ++o)
  {
    T acc{0};
    for (std::size_t i = 0; i < plane; ++i) acc += gy[o * plane + i];
    grads.bias[o] = acc;
  }
  return grads;
}

/// Affine map along the trailing dimension: y[..., o] = sum_i W[o,i] x[..., i] + b[o].
template <typename T>
Tensor<T> dense(const Tensor<T>& x, const Tensor<T>& weight, const Tensor<T>& bias)
{
  if (weight.rank() != 2) throw DimensionError("dense expects weight [D_out, D_in]");
  const std::size_t dout = weight.dim(0), din = weight.dim(1);
  if (x.rank() == 0 || x.shape().back() != din)
    throw DimensionError("dense: trailing dimension of " + shapeString(x.shape()) +
                         " does not match D_in " + std::to_string(din));
  detail::checkBias(bias, dout);
  const auto rows = static_cast<std::ptrdiff_t>(x.size() / din);
  Shape      outShape = x.shape();
  outShape.back() = dout;
  Tensor<T>              out(std::move(outShape));
  detail::ConstMatMap<T> X(x.ptr(), rows, (std::ptrdiff_t)din);
  detail::ConstMatMap<T> W(weight.ptr(), (std::ptrdiff_t)dout, (std::ptrdiff_t)din);
  detail::MatMap<T>      Y(out.ptr(), rows, (std::ptrdiff_t)dout);
  Y.noalias() = X * W.transpose();
  for (std::ptrdiff_t r = 0; r < rows; ++r)
    for (std::size_t o = 0; o < dout; ++o) Y(r, (std::ptrdiff_t)o) += bias[o];
  return out;
}

template <typename T>
DenseGrads<T> denseBackward(const Tensor<T>& x, const Tensor<T>& weight,
                            const Tensor<T>& gy)
{
  const std::size_t dout = weight.dim(0), din = weight.dim(1);
  const auto        rows = static_cast<std::ptrdiff_t>(x.size() / din);
  if (gy.size() != static_cast<std::size_t>(rows) * dout)
    throw DimensionError("denseBackward: upstream gradient shape " +
                         shapeString(gy.shape()));
  DenseGrads<T> grads{Tensor<T>::zerosLike(x), Tensor<T>::zerosLike(weight),
                      Tensor<T>({dout})};
  detail::ConstMatMap<T> X(x.ptr(), rows, (std::ptrdiff_t)din);
  detail::ConstMatMap<T> W(weight.ptr(), (std::ptrdiff_t)dout, (std::ptrdiff_t)din);
  detail::ConstMatMap<T> GY(gy.ptr(), rows, (std::ptrdiff_t)dout);
  detail::MatMap<T>(grads.input.ptr(), rows, (std::ptrdiff_t)din).noalias() = GY * W;
  detail::MatMap<T>(grads.weight.ptr(), (std::ptrdiff_t)dout, (std::ptrdiff_t)din)
      .noalias() = GY.transpose() * X;
  for (std::ptrdiff_t r = 0; r < rows; ++r)
    for (std::size_t o = 0; o < dout; ++o) grads.bias[o] += GY(r, (std::ptrdiff_t)o);
  return grads;
}

enum class ActivationKind
{
  relu,
  leakyRelu,
  sigmoid,
};

struct Activation
{
  ActivationKind kind = ActivationKind::relu;
  double         alpha = 0.2; ///< negative slope, leaky_relu only

  static Activation relu() { return {ActivationKind::relu, 0.0}; }
  static Activation leakyRelu(double a) { return {ActivationKind::leakyRelu, a}; }
  static Activation sigmoid() { return {ActivationKind::sigmoid, 0.0}; }
};

/// Logistic function clamped to the open interval (0, 1): saturated inputs map
/// to the neighbours of 0 and 1 rather than onto them.
template <typename T>
T sigmoid(T v)
{
  const T s = T{1} / (T{1} + std::exp(-v));
  return std::clamp(s, std::numeric_limits<T>::min(), std::nextafter(T{1}, T{0}));
}

template <typename T>
Tensor<T> activation(const Tensor<T>& x, Activation act)
{
  Tensor<T> y = x;
  switch (act.kind)
  {
  case ActivationKind::relu:
    for (auto& v : y.data()) v = v > T{0} ? v : T{0};
    break;
  case ActivationKind::leakyRelu:
    for (auto& v : y.data()) v = v > T{0} ? v : static_cast<T>(act.alpha) * v;
    break;
  case ActivationKind::sigmoid:
    for (auto& v : y.data()) v = sigmoid(v);
    break;
  }
  return y;
}

/// Input gradient of `activation`, given the forward input x.
template <typename T>
Tensor<T> activationBackward(const Tensor<T>& x, Activation act, const Tensor<T>& gy)
{
  x.requireSameShape(gy, "activationBackward");
  Tensor<T> gx(x.shape());
  for (std::size_t i = 0; i < x.size(); ++i)
  {
    const T v = x[i];
    switch (act.kind)
    {
    case ActivationKind::relu: gx[i] = v > T{0} ? gy[i] : T{0}; break;
    case ActivationKind::leakyRelu:
      gx[i] = v > T{0} ? gy[i] : static_cast<T>(act.alpha) * gy[i];
      break;
    case ActivationKind::sigmoid:
    {
      const T s = sigmoid(v);
      gx[i] = gy[i] * s * (T{1} - s);
      break;
    }
    }
  }
  return gx;
}

enum class Axis
{
  width,  ///< mean over columns: [C,H,W] -> [C,H]
  height, ///< mean over rows:    [C,H,W] -> [C,W]
};

template <typename T>
Tensor<T> axisMean(const Tensor<T>& x, Axis axis)
{
  if (x.rank() != 3) throw DimensionError("axisMean expects [C,H,W]");
  const std::size_t C = x.dim(0), H = x.dim(1), W = x.dim(2);
  if (axis == Axis::width)
  {
    Tensor<T> y({C, H});
    for (std::size_t c = 0; c < C; ++c)
      for (std::size_t i = 0; i < H; ++i)
      {
        T acc{0};
        for (std::size_t j = 0; j < W; ++j) acc += x(c, i, j);
        y(c, i) = acc / static_cast<T>(W);
      }
    return y;
  }
  Tensor<T> y({C, W});
  for (std::size_t c = 0; c < C; ++c)
    for (std::size_t i = 0; i < H; ++i)
      for (std::size_t j = 0; j < W; ++j) y(c, j) += x(c, i, j);
  y *= T{1} / static_cast<T>(H);
  return y;
}

template <typename T>
Tensor<T> axisMeanBackward(const Shape& inShape, Axis axis, const Tensor<T>& gy)
{
  const std::size_t C = inShape.at(0), H = inShape.at(1), W = inShape.at(2);
  Tensor<T>         gx(inShape);
  if (axis == Axis::width)
  {
    const T inv = T{1} / static_cast<T>(W);
    for (std::size_t c = 0; c < C; ++c)
      for (std::size_t i = 0; i < H; ++i)
        for (std::size_t j = 0; j < W; ++j) gx(c, i, j) = gy(c, i) * inv;
  }
  else
  {
    const T inv = T{1} / static_cast<T>(H);
    for (std::size_t c = 0; c < C; ++c)
      for (std::size_t i = 0; i < H; ++i)
        for (std::size_t j = 0; j < W; ++j) gx(c, i, j) = gy(c, j) * inv;
  }
  return gx;
}

} // namespace susing
