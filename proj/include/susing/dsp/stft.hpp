#pragma once

// Short-time Fourier analysis with centred frames (reflection padding of
// n_fft/2 on both sides) and least-squares overlap-add synthesis.

#include "../core/error.hpp"
#include "../core/tensor.hpp"
#include "audio.hpp"

#include <unsupported/Eigen/FFT>

#include <cmath>
#include <complex>
#include <numbers>
#include <vector>

namespace susing::dsp {

struct StftConfig
{
  std::size_t nFft = 1024;
  std::size_t hop = 256;

  std::size_t bins() const { return nFft / 2 + 1; }
};

/// Linear magnitudes, [bins, frames].
struct Spectrogram
{
  Tensor<double> mags;
  StftConfig     config{};

  std::size_t bins() const { return mags.dim(0); }
  std::size_t frames() const { return mags.dim(1); }
};

struct StftResult
{
  Spectrogram    spec;
  Tensor<double> phase; ///< radians, same shape as spec.mags
};

/// Periodic Hann window.
inline std::vector<double> hannWindow(std::size_t n)
{
  std::vector<double> w(n);
  for (std::size_t i = 0; i < n; ++i)
    w[i] = 0.5 - 0.5 * std::cos(2.0 * std::numbers::pi * double(i) / double(n));
  return w;
}

inline std::size_t frameCount(std::size_t nSamples, const StftConfig& cfg)
{
  return 1 + nSamples / cfg.hop;
}

/// Frame-level transform without padding: frame t covers
/// signal[t*hop, t*hop + nFft). Shared by stft and Griffin-Lim.
class FrameTransform
{
public:
  explicit FrameTransform(StftConfig cfg = {}) : mCfg(cfg), mWindow(hannWindow(cfg.nFft))
  {
    if (cfg.nFft < 2 || cfg.nFft % 2 != 0 || cfg.hop == 0 || cfg.hop > cfg.nFft)
      throw ArgumentError("invalid STFT configuration");
    mFft.SetFlag(Eigen::FFT<double>::HalfSpectrum);
  }

  const StftConfig&          config() const { return mCfg; }
  const std::vector<double>& window() const { return mWindow; }

  /// Complex spectra of all frames, frame-major: [frames][bins].
  std::vector<std::vector<std::complex<double>>> analyze(const std::vector<double>& signal,
                                                         std::size_t frames)
  {
    const std::size_t n = mCfg.nFft;
    if (signal.size() < (frames - 1) * mCfg.hop + n)
      throw DimensionError("analyze: signal too short for frame count");
    std::vector<std::vector<std::complex<double>>> out(frames);
    std::vector<double>                            buf(n);
    for (std::size_t t = 0; t < frames; ++t)
    {
      const double* src = signal.data() + t * mCfg.hop;
      for (std::size_t i = 0; i < n; ++i) buf[i] = src[i] * mWindow[i];
      mFft.fwd(out[t], buf);
      out[t].resize(mCfg.bins());
    }
    return out;
  }

  /// Least-squares inverse of `analyze`: windowed overlap-add divided by the
  /// summed squared window. Samples no frame covers with nonzero weight are 0.
  std::vector<double> synthesize(const std::vector<std::vector<std::complex<double>>>& frames)
  {
    const std::size_t   n = mCfg.nFft, T = frames.size();
    const std::size_t   len = (T - 1) * mCfg.hop + n;
    std::vector<double> out(len, 0.0), norm(len, 0.0), buf;
    for (std::size_t t = 0; t < T; ++t)
    {
      if (frames[t].size() != mCfg.bins())
        throw DimensionError("synthesize: frame has wrong bin count");
      mFft.inv(buf, frames[t], n);
      const std::size_t off = t * mCfg.hop;
      for (std::size_t i = 0; i < n; ++i)
      {
        out[off + i] += buf[i] * mWindow[i];
        norm[off + i] += mWindow[i] * mWindow[i];
      }
    }
    for (std::size_t i = 0; i < len; ++i) out[i] = norm[i] > 1e-12 ? out[i] / norm[i] : 0.0;
    return out;
  }

private:
  StftConfig          mCfg;
  std::vector<double> mWindow;
  Eigen::FFT<double>  mFft;
};

/// Reflect-pads by `pad` samples on each side (edge sample not repeated).
inline std::vector<double> reflectPad(const std::vector<double>& x, std::size_t pad)
{
  if (x.size() <= pad) throw ArgumentError("reflectPad: signal shorter than padding");
  std::vector<double> out(x.size() + 2 * pad);
  for (std::size_t i = 0; i < pad; ++i)
  {
    out[pad - 1 - i] = x[i + 1];
    out[pad + x.size() + i] = x[x.size() - 2 - i];
  }
  std::copy(x.begin(), x.end(), out.begin() + std::ptrdiff_t(pad));
  return out;
}

inline StftResult stft(const AudioBuffer& audio, const StftConfig& cfg = {})
{
  if (audio.samples.empty()) throw ArgumentError("stft: empty audio");
  if (audio.samples.size() < cfg.nFft)
    throw ArgumentError("stft: audio shorter than one FFT frame");
  FrameTransform    ft(cfg);
  const std::size_t T = frameCount(audio.size(), cfg);
  auto              frames = ft.analyze(reflectPad(audio.samples, cfg.nFft / 2), T);
  StftResult        r{{Tensor<double>({cfg.bins(), T}), cfg}, Tensor<double>({cfg.bins(), T})};
  for (std::size_t t = 0; t < T; ++t)
    for (std::size_t k = 0; k < cfg.bins(); ++k)
    {
      r.spec.mags(k, t) = std::abs(frames[t][k]);
      r.phase(k, t) = std::arg(frames[t][k]);
    }
  return r;
}

/// Inverse of stft given magnitudes and phases. `length` defaults to
/// (frames - 1) * hop samples.
inline AudioBuffer istft(const Spectrogram& spec, const Tensor<double>& phase,
                         std::size_t length = 0)
{
  spec.mags.requireSameShape(phase, "istft");
  const auto& cfg = spec.config;
  if (spec.bins() != cfg.bins()) throw DimensionError("istft: bin count mismatch");
  const std::size_t T = spec.frames();
  std::vector<std::vector<std::complex<double>>> frames(
      T, std::vector<std::complex<double>>(cfg.bins()));
  for (std::size_t t = 0; t < T; ++t)
    for (std::size_t k = 0; k < cfg.bins(); ++k)
      frames[t][k] = std::polar(spec.mags(k, t), phase(k, t));
  FrameTransform ft(cfg);
  auto           padded = ft.synthesize(frames);
  if (length == 0) length = (T - 1) * cfg.hop;
  const std::size_t off = cfg.nFft / 2;
  if (off + length > padded.size()) throw DimensionError("istft: length exceeds frames");
  AudioBuffer out;
  out.samples.assign(padded.begin() + std::ptrdiff_t(off),
                     padded.begin() + std::ptrdiff_t(off + length));
  return out;
}

} // namespace susing::dsp
