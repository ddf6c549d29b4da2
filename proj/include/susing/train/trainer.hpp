#pragma once

#include "../core/rng.hpp"
#include "checkpoint.hpp"
#include "segments.hpp"
#include "step.hpp"

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <numeric>
#include <vector>

namespace susing::train {

/// Endless stream of segment indices: one fresh permutation per epoch, drawn
/// from a generator seeded independently of the parameter initialisation.
class DataOrder
{
public:
  DataOrder(std::uint64_t seed, std::size_t items) : mRng(seed ^ 0x5eedda7a0123ULL), mItems(items)
  {
    if (items == 0) throw ArgumentError("train: no training segments");
    startEpoch();
  }

  DataOrder(const DataCursor& at, std::size_t items) : mItems(items)
  {
    if (items == 0) throw ArgumentError("train: no training segments");
    mRng.setState(at.epochRngState);
    mEpoch = at.epoch;
    startEpoch();
    if (at.cursor > mItems) throw ArgumentError("train: data cursor past the end of the epoch");
    mCursor = at.cursor;
  }

  std::vector<std::size_t> next(std::size_t count)
  {
    std::vector<std::size_t> out;
    out.reserve(count);
    while (out.size() < count)
    {
      if (mCursor == mItems)
      {
        ++mEpoch;
        startEpoch();
      }
      out.push_back(mPerm[mCursor++]);
    }
    return out;
  }

  DataCursor cursor() const { return {mEpochState, mEpoch, mCursor}; }

private:
  void startEpoch()
  {
    mEpochState = mRng.state();
    mPerm.resize(mItems);
    std::iota(mPerm.begin(), mPerm.end(), std::size_t{0});
    mRng.shuffle(mPerm);
    mCursor = 0;
  }

  Rng                      mRng;
  std::size_t              mItems;
  std::vector<std::size_t> mPerm;
  std::string              mEpochState;
  std::uint64_t            mEpoch = 0;
  std::size_t              mCursor = 0;
};

/// Owns parameters, optimiser state and data order for one training run.
template <typename T>
class Trainer
{
public:
  Trainer(const model::ModelConfig& mcfg, const TrainConfig& tcfg, std::vector<Segment<T>> data)
      : mModel(mcfg), mTrain(tcfg), mData(std::move(data)), mOrder(tcfg.seed, mData.size()),
        mParams(model::initParams<T>(mcfg, tcfg.seed)), mAdam(AdamState<T>::zerosFor(mParams))
  {
    mTrain.validate();
  }

  /// Continues from a checkpoint; `tcfg` may change max_steps, checkpoint
  /// cadence and threads but the run is only reproducible if the rest matches.
  Trainer(Checkpoint<T> ck, const TrainConfig& tcfg, std::vector<Segment<T>> data)
      : mModel(ck.model), mTrain(tcfg), mData(std::move(data)), mOrder(ck.data, mData.size()),
        mParams(std::move(ck.params)), mAdam(std::move(ck.adam)), mStep(ck.step)
  {
    mTrain.validate();
  }

  StepResult step()
  {
    std::vector<const Segment<T>*> batch;
    for (auto i : mOrder.next(mTrain.batchSize)) batch.push_back(&mData[i]);
    auto r = trainStep(batch, mParams, mAdam, mModel, mTrain, &mWorkspace);
    ++mStep;
    return r;
  }

  Checkpoint<T> checkpoint() const { return {mModel, mTrain, mStep, mOrder.cursor(), mParams, mAdam}; }

  std::uint64_t             steps() const { return mStep; }
  const model::ParamSet<T>& params() const { return mParams; }
  const model::ModelConfig& modelConfig() const { return mModel; }
  const TrainConfig&        trainConfig() const { return mTrain; }

private:
  model::ModelConfig      mModel;
  TrainConfig             mTrain;
  std::vector<Segment<T>> mData;
  DataOrder               mOrder;
  model::ParamSet<T>      mParams;
  AdamState<T>            mAdam;
  std::uint64_t           mStep = 0;
  GradWorkspace<T>        mWorkspace;
};

inline std::filesystem::path stepCheckpointPath(const std::filesystem::path& dir, std::uint64_t step)
{
  char name[32];
  std::snprintf(name, sizeof name, "step_%06llu.susg", static_cast<unsigned long long>(step));
  return dir / name;
}

/// Runs until max_steps, appending `step,loss,seconds` rows to train_log.csv
/// in `outDir` and writing step_NNNNNN.susg every checkpoint_every steps plus
/// final.susg. Returns the per-step losses of this invocation.
template <typename T>
std::vector<double> runTraining(Trainer<T>& trainer, const std::filesystem::path& outDir,
                                const std::function<void(std::uint64_t, const StepResult&)>& onStep = {})
{
  std::filesystem::create_directories(outDir);
  const auto    logPath = outDir / "train_log.csv";
  const bool    fresh = trainer.steps() == 0 || !std::filesystem::exists(logPath);
  std::ofstream log(logPath, fresh ? std::ios::trunc : std::ios::app);
  if (!log) throw IoError("cannot write " + logPath.string());
  if (fresh) log << "step,loss,seconds\n";

  const auto&         cfg = trainer.trainConfig();
  const auto          start = std::chrono::steady_clock::now();
  std::vector<double> losses;
  while (trainer.steps() < cfg.maxSteps)
  {
    const auto r = trainer.step();
    losses.push_back(r.loss);
    const double secs =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    log << trainer.steps() << ',' << r.loss << ',' << secs << '\n';
    log.flush();
    if (onStep) onStep(trainer.steps(), r);
    if (cfg.checkpointEvery && trainer.steps() % cfg.checkpointEvery == 0)
      saveCheckpoint(stepCheckpointPath(outDir, trainer.steps()), trainer.checkpoint());
  }
  saveCheckpoint(outDir / "final.susg", trainer.checkpoint());
  return losses;
}

} // namespace susing::train
