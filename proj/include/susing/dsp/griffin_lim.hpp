#pragma once

#include "../core/rng.hpp"
#include "stft.hpp"

#include <cmath>
#include <complex>
#include <cstdint>
#include <numbers>
#include <vector>

namespace susing::dsp {

struct GriffinLimResult
{
  AudioBuffer audio;
  /// Spectral convergence ||(|STFT x_k| - M)||_F / ||M||_F, one entry per
  /// iterate, starting with the random-phase inversion.
  std::vector<double> convergence;
};

/// Alternating projections between the set of signals and the set of
/// spectrograms with magnitude `spec.mags`, with the momentum extrapolation of
/// the fast variant. Iterates live on the padded frame grid, where overlap-add
/// synthesis is the exact least-squares inverse of analysis. A momentum step
/// that would raise the convergence measure is replaced by a plain step, so
/// the sequence cannot increase. iters == 0 returns the inversion of the
/// seeded random initial phase. Output is trimmed to (frames - 1) * hop
/// samples and peak-normalised to `peak`. momentum == 0 gives the classic
/// algorithm.
inline GriffinLimResult griffinLim(const Spectrogram& spec, std::size_t iters = 60,
                                   std::uint64_t seed = 0, double peak = 0.95,
                                   double momentum = 0.99)
{
  const auto& cfg = spec.config;
  const auto& mags = spec.mags;
  if (spec.bins() != cfg.bins()) throw DimensionError("griffin_lim: bin count mismatch");
  for (double m : mags.data())
    if (!(m >= 0.0) || !std::isfinite(m))
      throw ArgumentError("griffin_lim: magnitudes must be finite and non-negative");

  const std::size_t T = spec.frames(), B = cfg.bins();
  double            norm = 0.0;
  for (double m : mags.data()) norm += m * m;
  norm = std::sqrt(norm);

  FrameTransform ft(cfg);
  Rng            rng(seed);
  std::vector<std::vector<std::complex<double>>> target(T, std::vector<std::complex<double>>(B));
  for (std::size_t t = 0; t < T; ++t)
    for (std::size_t k = 0; k < B; ++k)
      target[t][k] = std::polar(mags(k, t), 2.0 * std::numbers::pi * rng.uniform());

  using Frames = std::vector<std::vector<std::complex<double>>>;
  // Replace magnitudes, keep phase; returns ||(|X| - M)||_F^2 of the input.
  auto project = [&](const Frames& x, Frames& out) {
    double err = 0.0;
    for (std::size_t t = 0; t < T; ++t)
      for (std::size_t k = 0; k < B; ++k)
      {
        const double a = std::abs(x[t][k]);
        err += (a - mags(k, t)) * (a - mags(k, t));
        out[t][k] = a > 0.0 ? x[t][k] * (mags(k, t) / a) : std::complex<double>(mags(k, t), 0.0);
      }
    return err;
  };
  auto sc = [&](double err) { return norm > 0.0 ? std::sqrt(err) / norm : 0.0; };

  GriffinLimResult result;
  auto   signal = ft.synthesize(target);
  Frames current = ft.analyze(signal, T), previous = current, extrapolated = current;
  result.convergence.push_back(sc(project(current, target)));
  for (std::size_t it = 0; it < iters; ++it)
  {
    // Accelerated step from the extrapolated point; falls back to the plain
    // projection step (and drops the momentum) whenever it would raise the
    // convergence measure.
    project(extrapolated, target);
    auto   candidate = ft.synthesize(target);
    Frames next = ft.analyze(candidate, T);
    Frames scratch(T, std::vector<std::complex<double>>(B));
    double err = project(next, scratch);
    bool   plain = false;
    if (sc(err) > result.convergence.back())
    {
      project(current, target);
      candidate = ft.synthesize(target);
      next = ft.analyze(candidate, T);
      err = project(next, scratch);
      plain = true;
    }
    previous = std::move(current);
    current = std::move(next);
    signal = std::move(candidate);
    for (std::size_t t = 0; t < T; ++t)
      for (std::size_t k = 0; k < B; ++k)
        extrapolated[t][k] =
            plain ? current[t][k] : current[t][k] + momentum * (current[t][k] - previous[t][k]);
    result.convergence.push_back(sc(err));
  }

  const std::size_t off = cfg.nFft / 2, length = (T - 1) * cfg.hop;
  result.audio.samples.assign(signal.begin() + std::ptrdiff_t(off),
                              signal.begin() + std::ptrdiff_t(off + length));
  result.audio.normalizePeak(peak);
  return result;
}

} // namespace susing::dsp
