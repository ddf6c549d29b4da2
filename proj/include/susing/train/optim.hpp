#pragma once

#include "../core/error.hpp"
#include "../model/params.hpp"

#include <Eigen/Core>

#include <cmath>
#include <cstdint>

namespace susing::train {

struct AdamConfig
{
  double lr = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;

  bool operator==(const AdamConfig&) const = default;
};

template <typename T>
struct AdamState
{
  model::ParamSet<T> m;
  model::ParamSet<T> v;
  std::uint64_t      steps = 0;

  static AdamState zerosFor(const model::ParamSet<T>& params)
  {
    return {params.zerosLike(), params.zerosLike(), 0};
  }
};

/// Euclidean norm of all gradients together, accumulated in double.
template <typename T>
double globalNorm(const model::ParamSet<T>& grads)
{
  double acc = 0.0;
  for (std::size_t i = 0; i < grads.size(); ++i)
  {
    const auto& g = grads.at(i);
    acc += Eigen::Map<const Eigen::Matrix<T, Eigen::Dynamic, 1>>(g.ptr(), Eigen::Index(g.size()))
               .template cast<double>()
               .squaredNorm();
  }
  return std::sqrt(acc);
}

/// Rescales the gradients so their global norm is at most `maxNorm`. Returns
/// the norm before clipping; gradients are untouched when it is within bounds.
template <typename T>
double clipGlobalNorm(model::ParamSet<T>& grads, double maxNorm)
{
  const double norm = globalNorm(grads);
  if (norm > maxNorm && norm > 0.0)
  {
    const T scale = T(maxNorm / norm);
    for (std::size_t i = 0; i < grads.size(); ++i) grads.at(i) *= scale;
  }
  return norm;
}

/// Bias-corrected Adam step.
template <typename T>
void adamUpdate(model::ParamSet<T>& params, const model::ParamSet<T>& grads, AdamState<T>& state,
                const AdamConfig& cfg)
{
  params.requireSameLayout(grads);
  params.requireSameLayout(state.m);
  ++state.steps;
  const double c1 = 1.0 - std::pow(cfg.beta1, double(state.steps));
  const double c2 = 1.0 - std::pow(cfg.beta2, double(state.steps));
  const T      b1 = T(cfg.beta1), b2 = T(cfg.beta2);
  const T      stepSize = T(cfg.lr / c1), invC2 = T(1.0 / c2), eps = T(cfg.eps);
  for (std::size_t i = 0; i < params.size(); ++i)
  {
    auto       p = params.at(i).data();
    const auto g = grads.at(i).data();
    auto       m = state.m.at(i).data();
    auto       v = state.v.at(i).data();
    for (std::size_t j = 0; j < p.size(); ++j)
    {
      m[j] = b1 * m[j] + (T{1} - b1) * g[j];
      v[j] = b2 * v[j] + (T{1} - b2) * g[j] * g[j];
      p[j] -= stepSize * m[j] / (std::sqrt(v[j] * invC2) + eps);
    }
  }
}

} // namespace susing::train
