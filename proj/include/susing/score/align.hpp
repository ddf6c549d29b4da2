#pragma once

#include "../core/error.hpp"
#include "events.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

namespace susing::score {

inline constexpr double      kFrameRate = 22050.0 / 256.0;
inline constexpr std::size_t kNoteVocab = 129; ///< 0 = rest, midi + 1 otherwise

/// Per-frame ids: note 0 = rest, midi + 1 otherwise; phoneme 0 = SIL.
struct FrameScore
{
  std::vector<std::size_t> noteIds;
  std::vector<std::size_t> phonemeIds;

  std::size_t frames() const { return noteIds.size(); }
  bool        operator==(const FrameScore&) const = default;
};

inline std::size_t noteId(const NoteEvent& n) { return n.isRest() ? 0 : std::size_t(*n.midi) + 1; }

namespace detail {

/// Index of the event whose [onset, offset) holds `t`, scanning forward from
/// `cursor` (events sorted, t non-decreasing between calls).
template <typename Event>
const Event* eventAt(const std::vector<Event>& events, std::size_t& cursor, double t)
{
  while (cursor < events.size() && events[cursor].offsetSec <= t) ++cursor;
  if (cursor < events.size() && events[cursor].onsetSec <= t) return &events[cursor];
  return nullptr;
}

} // namespace detail

/// Frame i takes the labels of the events containing its centre (i + 0.5) /
/// frameRate; uncovered frames are rest / SIL. Length follows the shorter of
/// the two streams.
inline FrameScore alignFrames(const std::vector<NoteEvent>&    notes,
                              const std::vector<PhonemeEvent>& phonemes,
                              const PhonemeInventory& inv, double frameRate = kFrameRate)
{
  if (notes.empty() || phonemes.empty()) throw ArgumentError("align_frames: empty event stream");
  if (!(frameRate > 0.0)) throw ArgumentError("align_frames: frame rate must be positive");
  const double end = std::min(notes.back().offsetSec, phonemes.back().offsetSec);
  // the small slack keeps e.g. 3 * (1 / 3) from rounding down a frame
  const auto n = static_cast<std::size_t>(std::floor(end * frameRate + 1e-9));
  if (n == 0) throw ArgumentError("align_frames: streams overlap for less than one frame");

  FrameScore  fs{std::vector<std::size_t>(n, 0), std::vector<std::size_t>(n, 0)};
  std::size_t nc = 0, pc = 0;
  for (std::size_t i = 0; i < n; ++i)
  {
    const double centre = (double(i) + 0.5) / frameRate;
    if (auto* e = detail::eventAt(notes, nc, centre)) fs.noteIds[i] = noteId(*e);
    if (auto* e = detail::eventAt(phonemes, pc, centre)) fs.phonemeIds[i] = inv.id(e->phoneme);
  }
  return fs;
}

struct FrameRun
{
  double      onsetSec;
  double      offsetSec;
  std::size_t id;
};

/// Collapses runs of equal ids into intervals on frame boundaries i / frameRate.
inline std::vector<FrameRun> decodeRuns(const std::vector<std::size_t>& ids,
                                        double                          frameRate = kFrameRate)
{
  std::vector<FrameRun> runs;
  for (std::size_t i = 0; i < ids.size();)
  {
    std::size_t j = i;
    while (j < ids.size() && ids[j] == ids[i]) ++j;
    runs.push_back({double(i) / frameRate, double(j) / frameRate, ids[i]});
    i = j;
  }
  return runs;
}

} // namespace susing::score
