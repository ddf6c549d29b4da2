#pragma once

#include "../core/error.hpp"
#include "../core/layers.hpp"
#include "../core/tensor.hpp"

#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

namespace susing::model {

/// Named tensors in insertion order. Used for parameters, their gradients and
/// optimizer moments, which all share one layout.
template <typename T>
class ParamSet
{
public:
  Tensor<T>& add(const std::string& name, Tensor<T> value)
  {
    if (!mIndex.emplace(name, mTensors.size()).second)
      throw ArgumentError("parameter '" + name + "' defined twice");
    mNames.push_back(name);
    mTensors.push_back(std::move(value));
    return mTensors.back();
  }

  bool contains(const std::string& name) const { return mIndex.count(name) != 0; }

  Tensor<T>&       operator[](const std::string& name) { return mTensors[indexOf(name)]; }
  const Tensor<T>& operator[](const std::string& name) const { return mTensors[indexOf(name)]; }

  Tensor<T>&       at(std::size_t i) { return mTensors.at(i); }
  const Tensor<T>& at(std::size_t i) const { return mTensors.at(i); }

  const std::string&              name(std::size_t i) const { return mNames.at(i); }
  const std::vector<std::string>& names() const { return mNames; }
  std::size_t                     size() const { return mTensors.size(); }

  /// Total number of scalars.
  std::size_t count() const
  {
    std::size_t n = 0;
    for (const auto& t : mTensors) n += t.size();
    return n;
  }

  /// Same names and shapes, all zeros.
  ParamSet zerosLike() const
  {
    ParamSet out;
    for (std::size_t i = 0; i < size(); ++i) out.add(mNames[i], Tensor<T>(mTensors[i].shape()));
    return out;
  }

  void zero()
  {
    for (auto& t : mTensors) t.fill(T{0});
  }

  ParamSet& operator+=(const ParamSet& o)
  {
    requireSameLayout(o);
    for (std::size_t i = 0; i < size(); ++i) mTensors[i] += o.mTensors[i];
    return *this;
  }

  void requireSameLayout(const ParamSet& o) const
  {
    if (o.size() != size()) throw DimensionError("parameter sets differ in size");
    for (std::size_t i = 0; i < size(); ++i)
      if (o.mNames[i] != mNames[i] || o.mTensors[i].shape() != mTensors[i].shape())
        throw DimensionError("parameter layout mismatch at '" + mNames[i] + "'");
  }

  template <typename U>
  ParamSet<U> cast() const
  {
    ParamSet<U> out;
    for (std::size_t i = 0; i < size(); ++i) out.add(mNames[i], mTensors[i].template cast<U>());
    return out;
  }

  bool operator==(const ParamSet& o) const
  {
    return mNames == o.mNames && mTensors == o.mTensors;
  }

private:
  std::size_t indexOf(const std::string& name) const
  {
    auto it = mIndex.find(name);
    if (it == mIndex.end()) throw ArgumentError("no parameter named '" + name + "'");
    return it->second;
  }

  std::vector<std::string>                     mNames;
  std::vector<Tensor<T>>                       mTensors;
  std::unordered_map<std::string, std::size_t> mIndex;
};

/// Resolves parameter names to (value, gradient) slots. `grads` may be null
/// for inference, in which case backward passes accumulate nothing.
template <typename T>
class Binder
{
public:
  Binder(const ParamSet<T>& params, ParamSet<T>* grads, std::string prefix = {})
      : mParams(&params), mGrads(grads), mPrefix(std::move(prefix))
  {}

  ParamRef<T> operator()(const std::string& name) const
  {
    const auto full = mPrefix + name;
    return {&(*mParams)[full], mGrads ? &(*mGrads)[full] : nullptr};
  }

  Binder scoped(const std::string& sub) const { return Binder(*mParams, mGrads, mPrefix + sub); }

private:
  const ParamSet<T>* mParams;
  ParamSet<T>*       mGrads;
  std::string        mPrefix;
};

} // namespace susing::model
