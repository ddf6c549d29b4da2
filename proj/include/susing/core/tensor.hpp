#pragma once

#include "error.hpp"

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <initializer_list>
#include <numeric>
#include <span>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

namespace susing {

using Shape = std::vector<std::size_t>;

inline std::size_t shapeSize(const Shape& shape)
{
  return std::accumulate(shape.begin(), shape.end(), std::size_t{1},
                         std::multiplies<>{});
}

inline std::string shapeString(const Shape& shape)
{
  std::ostringstream os;
  os << '[';
  for (std::size_t i = 0; i < shape.size(); ++i)
    os << (i ? "," : "") << shape[i];
  os << ']';
  return os.str();
}

/// Dense row-major N-dimensional array. `T` is double for verification paths
/// and float for training.
template <typename T>
class Tensor
{
public:
  using value_type = T;

  Tensor() = default;

  explicit Tensor(Shape shape, T fill = T{0})
      : mShape(std::move(shape)), mData(shapeSize(mShape), fill)
  {
    checkShape();
  }

  Tensor(Shape shape, std::vector<T> data)
      : mShape(std::move(shape)), mData(std::move(data))
  {
    checkShape();
    if (mData.size() != shapeSize(mShape))
      throw DimensionError("tensor data length " + std::to_string(mData.size()) +
                           " does not match shape " + shapeString(mShape));
  }

  static Tensor zerosLike(const Tensor& other) { return Tensor(other.shape()); }

  const Shape& shape() const noexcept { return mShape; }
  std::size_t  rank() const noexcept { return mShape.size(); }
  std::size_t  dim(std::size_t i) const { return mShape.at(i); }
  std::size_t  size() const noexcept { return mData.size(); }
  bool         empty() const noexcept { return mData.empty(); }

  std::span<T>       data() noexcept { return mData; }
  std::span<const T> data() const noexcept { return mData; }
  T*                 ptr() noexcept { return mData.data(); }
  const T*           ptr() const noexcept { return mData.data(); }
  std::vector<T>&       vec() noexcept { return mData; }
  const std::vector<T>& vec() const noexcept { return mData; }

  T&       operator[](std::size_t i) { return mData[i]; }
  const T& operator[](std::size_t i) const { return mData[i]; }

  T& operator()(std::size_t i, std::size_t j) { return mData[i * mShape[1] + j]; }
  const T& operator()(std::size_t i, std::size_t j) const
  {
    return mData[i * mShape[1] + j];
  }
  T& operator()(std::size_t c, std::size_t i, std::size_t j)
  {
    return mData[(c * mShape[1] + i) * mShape[2] + j];
  }
  const T& operator()(std::size_t c, std::size_t i, std::size_t j) const
  {
    return mData[(c * mShape[1] + i) * mShape[2] + j];
  }

  Tensor reshaped(Shape shape) const&
  {
    return Tensor(std::move(shape), mData);
  }
  Tensor reshaped(Shape shape) &&
  {
    return Tensor(std::move(shape), std::move(mData));
  }

  void fill(T v) { std::fill(mData.begin(), mData.end(), v); }

  Tensor& operator+=(const Tensor& o)
  {
    requireSameShape(o, "+=");
    for (std::size_t i = 0; i < mData.size(); ++i) mData[i] += o.mData[i];
    return *this;
  }

  Tensor& operator*=(T s)
  {
    for (auto& v : mData) v *= s;
    return *this;
  }

  bool allFinite() const
  {
    return std::all_of(mData.begin(), mData.end(),
                       [](T v) { return std::isfinite(v); });
  }

  template <typename U>
  Tensor<U> cast() const
  {
    std::vector<U> out(mData.begin(), mData.end());
    return Tensor<U>(mShape, std::move(out));
  }

  void requireSameShape(const Tensor& o, const char* what) const
  {
    if (o.mShape != mShape)
      throw DimensionError(std::string(what) + ": shape " + shapeString(mShape) +
                           " vs " + shapeString(o.mShape));
  }

  friend bool operator==(const Tensor& a, const Tensor& b)
  {
    return a.mShape == b.mShape && a.mData == b.mData;
  }

private:
  void checkShape() const
  {
    for (auto d : mShape)
      if (d == 0)
        throw DimensionError("tensor dimensions must be positive, got " +
                             shapeString(mShape));
  }

  Shape          mShape;
  std::vector<T> mData;
};

template <typename T>
T dot(const Tensor<T>& a, const Tensor<T>& b)
{
  if (a.size() != b.size()) throw DimensionError("dot: size mismatch");
  T acc{0};
  for (std::size_t i = 0; i < a.size(); ++i) acc += a[i] * b[i];
  return acc;
}

template <typename T>
T maxAbsDiff(const Tensor<T>& a, const Tensor<T>& b)
{
  a.requireSameShape(b, "maxAbsDiff");
  T m{0};
  for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
  return m;
}

/// Matrix transpose of a rank-2 tensor.
template <typename T>
Tensor<T> transpose2d(const Tensor<T>& x)
{
  if (x.rank() != 2) throw DimensionError("transpose2d expects a rank-2 tensor");
  const std::size_t r = x.dim(0), c = x.dim(1);
  Tensor<T>         out({c, r});
  for (std::size_t i = 0; i < r; ++i)
    for (std::size_t j = 0; j < c; ++j) out(j, i) = x(i, j);
  return out;
}

/// Concatenates rank-3 tensors along the channel (first) axis.
template <typename T>
Tensor<T> concatChannels(const Tensor<T>& a, const Tensor<T>& b)
{
  if (a.rank() != 3 || b.rank() != 3 || a.dim(1) != b.dim(1) || a.dim(2) != b.dim(2))
    throw DimensionError("concatChannels: " + shapeString(a.shape()) + " vs " +
                         shapeString(b.shape()));
  Tensor<T> out({a.dim(0) + b.dim(0), a.dim(1), a.dim(2)});
  std::copy(a.data().begin(), a.data().end(), out.data().begin());
  std::copy(b.data().begin(), b.data().end(), out.data().begin() + a.size());
  return out;
}

/// Inverse of concatChannels: first `channels` planes and the remainder.
template <typename T>
std::pair<Tensor<T>, Tensor<T>> splitChannels(const Tensor<T>& x, std::size_t channels)
{
  if (x.rank() != 3 || channels == 0 || channels >= x.dim(0))
    throw DimensionError("splitChannels: bad split of " + shapeString(x.shape()));
  const std::size_t plane = x.dim(1) * x.dim(2);
  Tensor<T>         a({channels, x.dim(1), x.dim(2)});
  Tensor<T>         b({x.dim(0) - channels, x.dim(1), x.dim(2)});
  std::copy(x.data().begin(), x.data().begin() + channels * plane, a.data().begin());
  std::copy(x.data().begin() + channels * plane, x.data().end(), b.data().begin());
  return {std::move(a), std::move(b)};
}

} // namespace susing
