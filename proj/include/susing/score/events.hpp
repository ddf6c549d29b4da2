#pragma once

#include "../core/error.hpp"
#include "inventory.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

namespace susing::score {

struct NoteEvent
{
  double             onsetSec = 0.0;
  double             offsetSec = 0.0;
  std::optional<int> midi; ///< empty for a rest

  bool isRest() const { return !midi.has_value(); }
  bool operator==(const NoteEvent&) const = default;
};

struct PhonemeEvent
{
  double      onsetSec = 0.0;
  double      offsetSec = 0.0;
  std::string phoneme;

  bool operator==(const PhonemeEvent&) const = default;
};

namespace detail {

struct RawLine
{
  double      onset;
  double      offset;
  std::string value;
  std::size_t line;
};

inline double parseSeconds(const std::string& s, std::size_t line)
{
  double      v = 0.0;
  const auto* end = s.data() + s.size();
  auto [p, ec] = std::from_chars(s.data(), end, v);
  if (ec != std::errc() || p != end || !std::isfinite(v))
    throw ParseError("bad time value '" + s + "'", line);
  if (v < 0.0) throw ParseError("negative time", line);
  return v;
}

/// Splits `onset offset value` lines (tab or space separated), validates the
/// interval, sorts by onset and rejects overlaps.
inline std::vector<RawLine> readLines(std::istream& in)
{
  std::vector<RawLine> rows;
  std::string          text;
  std::size_t          lineNo = 0;
  while (std::getline(in, text))
  {
    ++lineNo;
    if (!text.empty() && text.back() == '\r') text.pop_back();
    if (auto hash = text.find('#'); hash != std::string::npos) text.erase(hash);
    std::istringstream fields(text);
    std::string        a, b, c, extra;
    if (!(fields >> a)) continue;
    if (!(fields >> b >> c) || (fields >> extra))
      throw ParseError("expected 3 columns: onset offset value", lineNo);
    RawLine r{parseSeconds(a, lineNo), parseSeconds(b, lineNo), c, lineNo};
    if (r.offset < r.onset) throw ParseError("offset before onset", lineNo);
    if (r.offset == r.onset) throw ParseError("zero-length event", lineNo);
    rows.push_back(std::move(r));
  }
  std::stable_sort(rows.begin(), rows.end(),
                   [](const RawLine& x, const RawLine& y) { return x.onset < y.onset; });
  for (std::size_t i = 1; i < rows.size(); ++i)
    if (rows[i].onset < rows[i - 1].offset)
      throw ParseError("event overlaps the one on line " + std::to_string(rows[i - 1].line),
                       rows[i].line);
  return rows;
}

} // namespace detail

/// Note lines carry a MIDI number 0..127 or `R` for a rest.
inline std::vector<NoteEvent> parseNotes(std::istream& in)
{
  std::vector<NoteEvent> out;
  for (const auto& r : detail::readLines(in))
  {
    NoteEvent e{r.onset, r.offset, std::nullopt};
    if (r.value != "R")
    {
      int         m = 0;
      const auto* end = r.value.data() + r.value.size();
      auto [p, ec] = std::from_chars(r.value.data(), end, m);
      if (ec != std::errc() || p != end) throw ParseError("bad note value '" + r.value + "'", r.line);
      if (m < 0 || m > 127) throw ParseError("MIDI note out of range 0..127", r.line);
      e.midi = m;
    }
    out.push_back(e);
  }
  return out;
}

inline std::vector<PhonemeEvent> parsePhonemes(std::istream& in, const PhonemeInventory& inv)
{
  std::vector<PhonemeEvent> out;
  for (auto& r : detail::readLines(in))
  {
    if (!inv.contains(r.value)) throw ParseError("unknown phoneme '" + r.value + "'", r.line);
    out.push_back({r.onset, r.offset, std::move(r.value)});
  }
  return out;
}

inline std::vector<NoteEvent> parseNotesText(const std::string& text)
{
  std::istringstream in(text);
  return parseNotes(in);
}

inline std::vector<PhonemeEvent> parsePhonemesText(const std::string& text,
                                                   const PhonemeInventory& inv)
{
  std::istringstream in(text);
  return parsePhonemes(in, inv);
}

inline std::vector<NoteEvent> loadNotes(const std::filesystem::path& path)
{
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path.string());
  return parseNotes(in);
}

inline std::vector<PhonemeEvent> loadPhonemes(const std::filesystem::path& path,
                                              const PhonemeInventory&      inv)
{
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path.string());
  return parsePhonemes(in, inv);
}

inline std::string formatSeconds(double s)
{
  std::ostringstream o;
  o.precision(17);
  o << s;
  return o.str();
}

inline void writeNotes(std::ostream& out, const std::vector<NoteEvent>& notes)
{
  for (const auto& n : notes)
    out << formatSeconds(n.onsetSec) << '\t' << formatSeconds(n.offsetSec) << '\t'
        << (n.isRest() ? std::string("R") : std::to_string(*n.midi)) << '\n';
}

inline void writePhonemes(std::ostream& out, const std::vector<PhonemeEvent>& phones)
{
  for (const auto& p : phones)
    out << formatSeconds(p.onsetSec) << '\t' << formatSeconds(p.offsetSec) << '\t' << p.phoneme
        << '\n';
}

} // namespace susing::score
