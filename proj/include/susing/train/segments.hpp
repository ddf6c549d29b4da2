#pragma once

#include "../core/error.hpp"
#include "../core/tensor.hpp"
#include "../score/align.hpp"

#include <algorithm>
#include <vector>

namespace susing::train {

/// One training window: score ids, the preceding ground-truth window and the
/// target. Frames at index >= `valid` are zero padding, masked out of the loss.
template <typename T>
struct Segment
{
  score::FrameScore score;
  Tensor<T>         prev;
  Tensor<T>         target;
  std::size_t       valid = 0;
};

/// Frames [start, start + len) of a score, zero-padded (rest / SIL) past its end.
inline score::FrameScore scoreWindow(const score::FrameScore& fs, std::size_t start, std::size_t len)
{
  score::FrameScore w{std::vector<std::size_t>(len, 0), std::vector<std::size_t>(len, 0)};
  for (std::size_t i = 0; i < len && start + i < fs.frames(); ++i)
  {
    w.noteIds[i] = fs.noteIds[start + i];
    w.phonemeIds[i] = fs.phonemeIds[start + i];
  }
  return w;
}

/// Columns [start, start + len) of a [bins, T] matrix, zero-padded.
template <typename T>
Tensor<T> frameWindow(const Tensor<T>& mags, std::size_t start, std::size_t len)
{
  const std::size_t bins = mags.dim(0), total = mags.dim(1);
  Tensor<T>         w({bins, len});
  for (std::size_t k = 0; k < bins; ++k)
    for (std::size_t i = 0; i < len && start + i < total; ++i) w(k, i) = mags(k, start + i);
  return w;
}

/// Non-overlapping windows [kS, (k+1)S). The score and spectrogram are
/// trimmed to the shorter of the two; the last window is zero padded.
template <typename T>
std::vector<Segment<T>> makeSegments(const score::FrameScore& fs, const Tensor<T>& mags,
                                     std::size_t S)
{
  if (S < 2) throw ArgumentError("make_segments: segment length must be at least 2");
  if (mags.rank() != 2) throw DimensionError("make_segments: spectrogram must be [bins, T]");
  const std::size_t n = std::min(fs.frames(), mags.dim(1));
  if (n == 0) throw ArgumentError("make_segments: empty utterance");
  const std::size_t count = (n + S - 1) / S;
  std::vector<Segment<T>> out;
  out.reserve(count);
  for (std::size_t k = 0; k < count; ++k)
  {
    Segment<T> s;
    s.score = scoreWindow(fs, k * S, S);
    s.target = frameWindow(mags, k * S, S);
    s.prev = k == 0 ? Tensor<T>({mags.dim(0), S}) : out.back().target;
    s.valid = std::min(S, n - k * S);
    // frames of the spectrogram beyond the trimmed length are not targets
    for (std::size_t b = 0; b < mags.dim(0); ++b)
      for (std::size_t i = s.valid; i < S; ++i) s.target(b, i) = T{0};
    out.push_back(std::move(s));
  }
  return out;
}

} // namespace susing::train
