#pragma once

#include "error.hpp"
#include "tensor.hpp"

#include <algorithm>
#include <cmath>
#include <concepts>
#include <cstddef>
#include <numeric>
#include <vector>

namespace susing {

struct GradCheckResult
{
  double      maxRelError = 0.0;
  std::size_t worstIndex = 0;
  double      analytic = 0.0; ///< gradient at worstIndex
  double      numeric = 0.0;
};

/// Compares `analytic` (the gradient of `loss` at x) against central
/// differences (f(x + eps e_i) - f(x - eps e_i)) / (2 eps) at the listed
/// coordinates. The error per coordinate is |analytic - numeric| /
/// max(1e-8, |numeric|); the maximum is returned.
template <typename Loss>
  requires std::invocable<Loss&, const Tensor<double>&>
GradCheckResult finiteDiffCheck(Loss&& loss, const Tensor<double>& x,
                                const Tensor<double>& analytic, double eps,
                                const std::vector<std::size_t>& coords)
{
  if (!(eps > 0.0)) throw ArgumentError("finite_diff_check: eps must be positive");
  x.requireSameShape(analytic, "finite_diff_check");
  GradCheckResult result;
  Tensor<double>  probe = x;
  bool            first = true;
  for (std::size_t i : coords)
  {
    if (i >= x.size()) throw IndexError("finite_diff_check: coordinate out of range");
    const double orig = probe[i];
    probe[i] = orig + eps;
    const double up = static_cast<double>(loss(probe));
    probe[i] = orig - eps;
    const double down = static_cast<double>(loss(probe));
    probe[i] = orig;
    const double numeric = (up - down) / (2.0 * eps);
    const double err =
        std::abs(analytic[i] - numeric) / std::max(1e-8, std::abs(numeric));
    if (first || err > result.maxRelError)
      result = {err, i, analytic[i], numeric};
    first = false;
  }
  return result;
}

/// Every coordinate of x.
template <typename Loss>
  requires std::invocable<Loss&, const Tensor<double>&>
GradCheckResult finiteDiffCheck(Loss&& loss, const Tensor<double>& x,
                                const Tensor<double>& analytic, double eps = 1e-5)
{
  std::vector<std::size_t> all(x.size());
  std::iota(all.begin(), all.end(), std::size_t{0});
  return finiteDiffCheck(loss, x, analytic, eps, all);
}

} // namespace susing
