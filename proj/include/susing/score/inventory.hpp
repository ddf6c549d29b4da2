#pragma once

#include "../core/error.hpp"

#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <sstream>
#include <string>
#include <unordered_map>
#include <vector>

namespace susing::score {

inline constexpr const char* kSilence = "SIL";
inline constexpr std::size_t kExpectedPhonemes = 34;

using WarningSink = std::function<void(const std::string&)>;

inline void warnToStderr(const std::string& msg) { std::cerr << "warning: " << msg << '\n'; }

/// Ordered token list; SIL always sits at id 0.
class PhonemeInventory
{
public:
  PhonemeInventory() { add(kSilence); }

  explicit PhonemeInventory(const std::vector<std::string>& tokens)
  {
    add(kSilence);
    for (const auto& t : tokens)
      if (t != kSilence && !add(t)) throw ArgumentError("inventory: duplicate token '" + t + "'");
  }

  std::size_t size() const { return mTokens.size(); }

  const std::string& token(std::size_t id) const
  {
    if (id >= mTokens.size()) throw IndexError("inventory: id " + std::to_string(id) + " out of range");
    return mTokens[id];
  }

  bool contains(const std::string& token) const { return mIds.count(token) != 0; }

  std::size_t id(const std::string& token) const
  {
    auto it = mIds.find(token);
    if (it == mIds.end()) throw ArgumentError("inventory: unknown phoneme '" + token + "'");
    return it->second;
  }

  const std::vector<std::string>& tokens() const { return mTokens; }

  bool operator==(const PhonemeInventory& o) const { return mTokens == o.mTokens; }

private:
  bool add(const std::string& t)
  {
    if (!mIds.emplace(t, mTokens.size()).second) return false;
    mTokens.push_back(t);
    return true;
  }

  std::vector<std::string>                     mTokens;
  std::unordered_map<std::string, std::size_t> mIds;
};

/// Romaji inventory shipped in data/phonemes.txt.
inline const std::vector<std::string>& defaultPhonemes()
{
  static const std::vector<std::string> list{
      "a",  "i",  "u",  "e",  "o",  "N",  "cl", "k",  "g",  "s",  "z",  "t",
      "d",  "n",  "h",  "b",  "p",  "m",  "y",  "r",  "w",  "ky", "gy", "sh",
      "j",  "ch", "ts", "ny", "hy", "by", "py", "my", "ry", "f"};
  return list;
}

/// One token per line; `#` starts a comment; blank lines are skipped.
inline PhonemeInventory parseInventory(std::istream& in, const WarningSink& warn = warnToStderr)
{
  std::vector<std::string>                     tokens;
  std::unordered_map<std::string, std::size_t> seen;
  std::string                                  line;
  std::size_t                                  lineNo = 0;
  while (std::getline(in, line))
  {
    ++lineNo;
    if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    std::istringstream fields(line);
    std::string        tok, extra;
    if (!(fields >> tok)) continue;
    if (fields >> extra) throw ParseError("inventory: more than one token on a line", lineNo);
    if (tok == kSilence) continue;
    if (auto [it, fresh] = seen.emplace(tok, lineNo); !fresh)
      throw ParseError("inventory: duplicate token '" + tok + "' (first on line " +
                           std::to_string(it->second) + ")",
                       lineNo);
    tokens.push_back(tok);
  }
  if (tokens.size() != kExpectedPhonemes && warn)
    warn("inventory has " + std::to_string(tokens.size()) + " phonemes, expected " +
         std::to_string(kExpectedPhonemes));
  return PhonemeInventory(tokens);
}

inline PhonemeInventory loadInventory(const std::filesystem::path& path,
                                      const WarningSink&           warn = warnToStderr)
{
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path.string());
  return parseInventory(in, warn);
}

} // namespace susing::score
