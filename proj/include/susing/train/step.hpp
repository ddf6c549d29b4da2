#pragma once

#include "../core/error.hpp"
#include "../model/acoustic.hpp"
#include "optim.hpp"
#include "segments.hpp"

#include <cmath>
#include <cstdlib>
#include <exception>
#include <string>
#include <thread>
#include <vector>

namespace susing::train {

struct TrainConfig
{
  std::size_t   segmentFrames = 128;
  std::size_t   batchSize = 4;
  AdamConfig    adam;
  std::size_t   maxSteps = 800;
  std::uint64_t seed = 0;
  double        gradClipNorm = 5.0;
  std::size_t   checkpointEvery = 0; ///< 0: only the final checkpoint
  std::size_t   threads = 0;         ///< 0: SUSING_THREADS or hardware concurrency

  void validate() const
  {
    if (segmentFrames < 2) throw ArgumentError("train: segment_frames must be at least 2");
    if (batchSize == 0) throw ArgumentError("train: batch_size must be positive");
    if (!(adam.lr > 0.0)) throw ArgumentError("train: lr must be positive");
    if (!(gradClipNorm > 0.0)) throw ArgumentError("train: grad_clip_norm must be positive");
  }

  bool operator==(const TrainConfig&) const = default;
};

inline std::size_t workerCount(std::size_t requested, std::size_t items)
{
  std::size_t n = requested;
  if (n == 0)
    if (const char* env = std::getenv("SUSING_THREADS")) n = std::strtoul(env, nullptr, 10);
  if (n == 0) n = std::max(1u, std::thread::hardware_concurrency());
  return std::max<std::size_t>(1, std::min(n, items));
}

/// Sum of |prediction - target| over the first `valid` frames, and the
/// gradient of scale * that sum (sign convention: 0 where they agree).
template <typename T>
double maskedL1(const Tensor<T>& pred, const Tensor<T>& target, std::size_t valid, T scale,
                Tensor<T>* grad)
{
  pred.requireSameShape(target, "masked L1");
  const std::size_t bins = pred.dim(0), S = pred.dim(1);
  double            sum = 0.0;
  if (grad) *grad = Tensor<T>(pred.shape());
  for (std::size_t b = 0; b < bins; ++b)
    for (std::size_t i = 0; i < std::min(valid, S); ++i)
    {
      const T d = pred(b, i) - target(b, i);
      sum += std::abs(double(d));
      if (grad) (*grad)(b, i) = d > T{0} ? scale : (d < T{0} ? -scale : T{0});
    }
  return sum;
}

/// Masked mean absolute error of the model on a batch, without updating.
template <typename T>
double batchLoss(const std::vector<const Segment<T>*>& batch, const model::ParamSet<T>& params,
                 const model::ModelConfig& cfg)
{
  double      sum = 0.0;
  std::size_t count = 0;
  for (const auto* s : batch)
  {
    const auto y = model::acousticForward(s->score, s->prev, params, cfg);
    sum += maskedL1<T>(y, s->target, s->valid, T{0}, nullptr);
    count += s->valid * y.dim(0);
  }
  return count ? sum / double(count) : 0.0;
}

namespace detail {

template <typename T>
void throwIfNotFinite(double loss, const model::ParamSet<T>& params, const model::ParamSet<T>& grads)
{
  for (std::size_t i = 0; i < params.size(); ++i)
    if (!params.at(i).allFinite())
      throw NumericError("non-finite value in parameter '" + params.name(i) + "' (loss " +
                         std::to_string(loss) + ")");
  for (std::size_t i = 0; i < grads.size(); ++i)
    if (!grads.at(i).allFinite())
      throw NumericError("non-finite gradient for parameter '" + grads.name(i) + "' (loss " +
                         std::to_string(loss) + ")");
  if (!std::isfinite(loss)) throw NumericError("non-finite loss " + std::to_string(loss));
}

} // namespace detail

struct StepResult
{
  double loss = 0.0;     ///< masked mean absolute error before the update
  double gradNorm = 0.0; ///< global norm before clipping
};

/// Gradient buffers kept between steps to avoid reallocating them.
template <typename T>
struct GradWorkspace
{
  model::ParamSet<T>              total;
  std::vector<model::ParamSet<T>> items;
};

/// Teacher-forced step: forward/backward per item (in parallel when more than
/// one worker is allowed), per-item gradients summed in item order, global
/// norm clipping, Adam update. Item 0 accumulates straight into the total, so
/// the summation order is the same whatever the worker count.
template <typename T>
StepResult trainStep(const std::vector<const Segment<T>*>& batch, model::ParamSet<T>& params,
                     AdamState<T>& adam, const model::ModelConfig& mcfg, const TrainConfig& cfg,
                     GradWorkspace<T>* workspace = nullptr)
{
  if (batch.empty()) throw ArgumentError("train_step: empty batch");
  std::size_t count = 0;
  for (const auto* s : batch) count += s->valid * s->target.dim(0);
  if (count == 0) throw ArgumentError("train_step: batch has no valid frames");
  const T scale = T(1.0 / double(count));

  const std::size_t   n = batch.size();
  GradWorkspace<T>    local;
  auto&               ws = workspace ? *workspace : local;
  auto                ready = [&](model::ParamSet<T>& g) {
    if (g.size() == params.size()) g.zero();
    else g = params.zerosLike();
  };
  ready(ws.total);
  model::ParamSet<T>& total = ws.total;
  std::vector<double> sums(n, 0.0);
  auto runItem = [&](std::size_t i, model::ParamSet<T>& grads) {
    model::AcousticModel<T> m(mcfg, params, &grads);
    const auto*             s = batch[i];
    const auto              y = m.forward(s->score, s->prev);
    Tensor<T>               gy;
    sums[i] = maskedL1(y, s->target, s->valid, scale, &gy);
    m.backward(gy);
  };

  const std::size_t workers = workerCount(cfg.threads, n);
  if (workers == 1)
  {
    runItem(0, total);
    if (n > 1)
    {
      ws.items.resize(1);
      for (std::size_t i = 1; i < n; ++i)
      {
        ready(ws.items[0]);
        runItem(i, ws.items[0]);
        total += ws.items[0];
      }
    }
  }
  else
  {
    ws.items.resize(n - 1);
    auto buffer = [&](std::size_t i) -> model::ParamSet<T>& { return i == 0 ? total : ws.items[i - 1]; };
    std::vector<std::exception_ptr> errors(n);
    for (std::size_t start = 0; start < n; start += workers)
    {
      std::vector<std::thread> pool;
      for (std::size_t i = start; i < std::min(n, start + workers); ++i)
      {
        if (i > 0) ready(buffer(i));
        pool.emplace_back([&, i] {
          try
          {
            runItem(i, buffer(i));
          }
          catch (...)
          {
            errors[i] = std::current_exception();
          }
        });
      }
      for (auto& t : pool) t.join();
    }
    for (auto& e : errors)
      if (e) std::rethrow_exception(e);
    for (std::size_t i = 1; i < n; ++i) total += buffer(i);
  }

  double sum = 0.0;
  for (double s : sums) sum += s;
  StepResult r{sum / double(count), 0.0};
  detail::throwIfNotFinite(r.loss, params, total);
  r.gradNorm = clipGlobalNorm(total, cfg.gradClipNorm);
  adamUpdate(params, total, adam, cfg.adam);
  return r;
}

} // namespace susing::train
