#pragma once

// Straight-line reference implementations used as test oracles. They follow
// the textbook definitions loop by loop and share no code with the library
// kernels.

#include <susing/core/rng.hpp>
#include <susing/core/tensor.hpp>

#include <cmath>
#include <cstddef>

namespace oracle {

using susing::Shape;
using susing::Tensor;

inline Tensor<double> randomTensor(Shape shape, susing::Rng& rng, double scale = 1.0)
{
  Tensor<double> t(std::move(shape));
  for (auto& v : t.data()) v = scale * (2.0 * rng.uniform() - 1.0);
  return t;
}

inline Tensor<double> conv2d(const Tensor<double>& x, const Tensor<double>& k,
                             const Tensor<double>& b, int stride, int pad)
{
  const int C = (int)x.dim(0), H = (int)x.dim(1), W = (int)x.dim(2);
  const int O = (int)k.dim(0), KH = (int)k.dim(2), KW = (int)k.dim(3);
  const int OH = (H + 2 * pad - KH) / stride + 1, OW = (W + 2 * pad - KW) / stride + 1;
  Tensor<double> y({(std::size_t)O, (std::size_t)OH, (std::size_t)OW});
  for (int o = 0; o < O; ++o)
    for (int oy = 0; oy < OH; ++oy)
      for (int ox = 0; ox < OW; ++ox)
      {
        double acc = b[o];
        for (int c = 0; c < C; ++c)
          for (int ky = 0; ky < KH; ++ky)
            for (int kx = 0; kx < KW; ++kx)
            {
              const int iy = oy * stride - pad + ky, ix = ox * stride - pad + kx;
              if (iy < 0 || iy >= H || ix < 0 || ix >= W) continue;
              acc += x(c, iy, ix) * k[((o * C + c) * KH + ky) * KW + kx];
            }
        y(o, oy, ox) = acc;
      }
  return y;
}

/// Scatter form: every input pixel deposits kernel-weighted copies of itself.
inline Tensor<double> transposedConv2d(const Tensor<double>& x, const Tensor<double>& k,
                                       const Tensor<double>& b, int stride, int pad,
                                       int outH, int outW)
{
  const int C = (int)x.dim(0), H = (int)x.dim(1), W = (int)x.dim(2);
  const int O = (int)k.dim(1), KH = (int)k.dim(2), KW = (int)k.dim(3);
  Tensor<double> y({(std::size_t)O, (std::size_t)outH, (std::size_t)outW});
  for (int o = 0; o < O; ++o)
    for (int i = 0; i < outH; ++i)
      for (int j = 0; j < outW; ++j) y(o, i, j) = b[o];
  for (int c = 0; c < C; ++c)
    for (int iy = 0; iy < H; ++iy)
      for (int ix = 0; ix < W; ++ix)
        for (int o = 0; o < O; ++o)
          for (int ky = 0; ky < KH; ++ky)
            for (int kx = 0; kx < KW; ++kx)
            {
              const int oy = iy * stride - pad + ky, ox = ix * stride - pad + kx;
              if (oy < 0 || oy >= outH || ox < 0 || ox >= outW) continue;
              y(o, oy, ox) += x(c, iy, ix) * k[((c * O + o) * KH + ky) * KW + kx];
            }
  return y;
}

inline Tensor<double> conv1d(const Tensor<double>& x, const Tensor<double>& k,
                             const Tensor<double>& b, int stride, int pad)
{
  const int C = (int)x.dim(0), L = (int)x.dim(1);
  const int O = (int)k.dim(0), K = (int)k.dim(2);
  const int OL = (L + 2 * pad - K) / stride + 1;
  Tensor<double> y({(std::size_t)O, (std::size_t)OL});
  for (int o = 0; o < O; ++o)
    for (int t = 0; t < OL; ++t)
    {
      double acc = b[o];
      for (int c = 0; c < C; ++c)
        for (int q = 0; q < K; ++q)
        {
          const int i = t * stride - pad + q;
          if (i >= 0 && i < L) acc += x(c, i) * k[(o * C + c) * K + q];
        }
      y(o, t) = acc;
    }
  return y;
}

inline Tensor<double> dense(const Tensor<double>& x, const Tensor<double>& w,
                            const Tensor<double>& b)
{
  const std::size_t din = w.dim(1), dout = w.dim(0), rows = x.size() / din;
  Shape             s = x.shape();
  s.back() = dout;
  Tensor<double> y(s);
  for (std::size_t r = 0; r < rows; ++r)
    for (std::size_t o = 0; o < dout; ++o)
    {
      double acc = b[o];
      for (std::size_t i = 0; i < din; ++i) acc += w(o, i) * x[r * din + i];
      y[r * dout + o] = acc;
    }
  return y;
}

/// Mean over the width index (per row) of a [C,H,W] tensor.
inline Tensor<double> rowMeans(const Tensor<double>& x)
{
  Tensor<double> y({x.dim(0), x.dim(1)});
  for (std::size_t c = 0; c < x.dim(0); ++c)
    for (std::size_t i = 0; i < x.dim(1); ++i)
    {
      double s = 0;
      for (std::size_t j = 0; j < x.dim(2); ++j) s += x(c, i, j);
      y(c, i) = s / double(x.dim(2));
    }
  return y;
}

/// Mean over the height index (per column) of a [C,H,W] tensor.
inline Tensor<double> colMeans(const Tensor<double>& x)
{
  Tensor<double> y({x.dim(0), x.dim(2)});
  for (std::size_t c = 0; c < x.dim(0); ++c)
    for (std::size_t j = 0; j < x.dim(2); ++j)
    {
      double s = 0;
      for (std::size_t i = 0; i < x.dim(1); ++i) s += x(c, i, j);
      y(c, j) = s / double(x.dim(1));
    }
  return y;
}

/// Stripe pooling evaluated literally: pool both stripes, run each through
/// its 1-D convolution, broadcast-add into a full [C,H,W] map, apply the 1x1
/// fuse convolution to that map, squash with the logistic function, and scale
/// the input elementwise.
inline Tensor<double> stripePool(const Tensor<double>& x, const Tensor<double>& kh,
                                 const Tensor<double>& bh, const Tensor<double>& kv,
                                 const Tensor<double>& bv, const Tensor<double>& kf,
                                 const Tensor<double>& bf)
{
  const std::size_t C = x.dim(0), H = x.dim(1), W = x.dim(2);
  const int         pad = (int)kh.dim(2) / 2;
  const auto        yh = conv1d(rowMeans(x), kh, bh, 1, pad);
  const auto        yv = conv1d(colMeans(x), kv, bv, 1, pad);
  Tensor<double>    y({C, H, W});
  for (std::size_t c = 0; c < C; ++c)
    for (std::size_t i = 0; i < H; ++i)
      for (std::size_t j = 0; j < W; ++j) y(c, i, j) = yh(c, i) + yv(c, j);
  Tensor<double> z({C, H, W});
  for (std::size_t c = 0; c < C; ++c)
    for (std::size_t i = 0; i < H; ++i)
      for (std::size_t j = 0; j < W; ++j)
      {
        double f = bf[c];
        for (std::size_t d = 0; d < C; ++d) f += kf[c * C + d] * y(d, i, j);
        z(c, i, j) = x(c, i, j) / (1.0 + std::exp(-f));
      }
  return z;
}

} // namespace oracle
