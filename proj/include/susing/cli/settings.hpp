#pragma once

// Effective settings for the command-line tool: defaults, then a config file
// of `key = value` lines (TOML-style scalars, optional [section] headers that
// only group keys), then flags.

#include "../core/error.hpp"
#include "../dsp/mel.hpp"
#include "../model/config.hpp"
#include "../train/config_io.hpp"
#include "../train/step.hpp"

#include <json.hpp>

#include <charconv>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <string>

namespace susing::cli {

struct Settings
{
  model::ModelConfig model;
  train::TrainConfig train;
  dsp::MelConfig     mel;
  std::size_t        glIters = 60;
  std::string        corpus;
  std::string        out;
  std::string        ckpt;
  std::string        phonemes; ///< inventory file; empty: built-in inventory
};

namespace detail {

inline std::string trim(const std::string& s)
{
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  return s.substr(b, s.find_last_not_of(" \t\r") - b + 1);
}

// Removes a trailing comment that is not inside a quoted string.
inline std::string stripComment(const std::string& s)
{
  bool quoted = false;
  for (std::size_t i = 0; i < s.size(); ++i)
  {
    if (s[i] == '"') quoted = !quoted;
    if (s[i] == '#' && !quoted) return s.substr(0, i);
  }
  return s;
}

template <typename N>
N parseNumber(const std::string& key, const std::string& v)
{
  N          out{};
  const auto end = v.data() + v.size();
  const auto [ptr, ec] = std::from_chars(v.data(), end, out);
  if (ec != std::errc{} || ptr != end) throw ArgumentError("setting '" + key + "': not a number: " + v);
  return out;
}

inline bool parseBool(const std::string& key, const std::string& v)
{
  if (v == "true") return true;
  if (v == "false") return false;
  throw ArgumentError("setting '" + key + "': expected true or false, got " + v);
}

inline std::string parseString(const std::string& v)
{
  if (v.size() >= 2 && v.front() == '"' && v.back() == '"') return v.substr(1, v.size() - 2);
  return v;
}

} // namespace detail

using Setter = std::function<void(Settings&, const std::string& key, const std::string& value)>;

/// Every key accepted in a config file, mapped to how it is applied.
inline const std::map<std::string, Setter>& settingKeys()
{
  using detail::parseBool;
  using detail::parseNumber;
  using detail::parseString;
  auto sz = [](auto field) {
    return Setter([field](Settings& s, const std::string& k, const std::string& v) {
      field(s) = parseNumber<std::size_t>(k, v);
    });
  };
  auto real = [](auto field) {
    return Setter([field](Settings& s, const std::string& k, const std::string& v) {
      field(s) = parseNumber<double>(k, v);
    });
  };
  auto flag = [](auto field) {
    return Setter([field](Settings& s, const std::string& k, const std::string& v) {
      field(s) = parseBool(k, v);
    });
  };
  auto text = [](auto field) {
    return Setter([field](Settings& s, const std::string&, const std::string& v) { field(s) = parseString(v); });
  };
  // clang-format off
  static const std::map<std::string, Setter> keys{
    {"segment_frames",   sz([](Settings& s) -> auto& { return s.train.segmentFrames; })},
    {"batch_size",       sz([](Settings& s) -> auto& { return s.train.batchSize; })},
    {"lr",               real([](Settings& s) -> auto& { return s.train.adam.lr; })},
    {"adam_beta1",       real([](Settings& s) -> auto& { return s.train.adam.beta1; })},
    {"adam_beta2",       real([](Settings& s) -> auto& { return s.train.adam.beta2; })},
    {"adam_eps",         real([](Settings& s) -> auto& { return s.train.adam.eps; })},
    {"max_steps",        sz([](Settings& s) -> auto& { return s.train.maxSteps; })},
    {"seed",             Setter([](Settings& s, const std::string& k, const std::string& v) {
                           s.train.seed = parseNumber<std::uint64_t>(k, v); })},
    {"grad_clip_norm",   real([](Settings& s) -> auto& { return s.train.gradClipNorm; })},
    {"checkpoint_every", sz([](Settings& s) -> auto& { return s.train.checkpointEvery; })},
    {"threads",          sz([](Settings& s) -> auto& { return s.train.threads; })},
    {"depth",            sz([](Settings& s) -> auto& { return s.model.sunet.depth; })},
    {"kernel",           sz([](Settings& s) -> auto& { return s.model.sunet.kernel; })},
    {"stride",           sz([](Settings& s) -> auto& { return s.model.sunet.stride; })},
    {"padding",          sz([](Settings& s) -> auto& { return s.model.sunet.padding; })},
    {"dilation",         sz([](Settings& s) -> auto& { return s.model.sunet.dilation; })},
    {"base_channels",    sz([](Settings& s) -> auto& { return s.model.sunet.baseChannels; })},
    {"max_channels",     sz([](Settings& s) -> auto& { return s.model.sunet.maxChannels; })},
    {"stripe_kernel",    sz([](Settings& s) -> auto& { return s.model.sunet.stripeKernel; })},
    {"leaky_slope",      real([](Settings& s) -> auto& { return s.model.sunet.leakySlope; })},
    {"use_stripe",       flag([](Settings& s) -> auto& { return s.model.sunet.useStripe; })},
    {"use_skips",        flag([](Settings& s) -> auto& { return s.model.sunet.useSkips; })},
    {"phoneme_dim",      sz([](Settings& s) -> auto& { return s.model.embed.phonemeDim; })},
    {"note_dim",         sz([](Settings& s) -> auto& { return s.model.embed.noteDim; })},
    {"prenet_kernel",    sz([](Settings& s) -> auto& { return s.model.embed.prenetKernel; })},
    {"n_mels",           sz([](Settings& s) -> auto& { return s.mel.nMels; })},
    {"mel_fmin",         real([](Settings& s) -> auto& { return s.mel.fMin; })},
    {"mel_fmax",         real([](Settings& s) -> auto& { return s.mel.fMax; })},
    {"cepstral_order",   sz([](Settings& s) -> auto& { return s.mel.cepstralOrder; })},
    {"gl_iters",         sz([](Settings& s) -> auto& { return s.glIters; })},
    {"corpus",           text([](Settings& s) -> auto& { return s.corpus; })},
    {"out",              text([](Settings& s) -> auto& { return s.out; })},
    {"ckpt",             text([](Settings& s) -> auto& { return s.ckpt; })},
    {"phonemes",         text([](Settings& s) -> auto& { return s.phonemes; })},
  };
  // clang-format on
  return keys;
}

inline void applySetting(Settings& s, const std::string& key, const std::string& value)
{
  const auto& keys = settingKeys();
  const auto  it = keys.find(key);
  if (it == keys.end()) throw ArgumentError("unknown setting '" + key + "'");
  it->second(s, key, value);
}

inline void applyConfigText(Settings& s, std::istream& in)
{
  std::string line;
  std::size_t lineNo = 0;
  while (std::getline(in, line))
  {
    ++lineNo;
    const auto body = detail::trim(detail::stripComment(line));
    if (body.empty() || (body.front() == '[' && body.back() == ']')) continue;
    const auto eq = body.find('=');
    if (eq == std::string::npos) throw ParseError("config: expected key = value", lineNo);
    const auto key = detail::trim(body.substr(0, eq)), value = detail::trim(body.substr(eq + 1));
    if (key.empty() || value.empty()) throw ParseError("config: expected key = value", lineNo);
    try
    {
      applySetting(s, key, value);
    }
    catch (const ArgumentError& e)
    {
      throw ParseError(std::string("config: ") + e.what(), lineNo);
    }
  }
}

inline void applyConfigFile(Settings& s, const std::filesystem::path& path)
{
  std::ifstream in(path);
  if (!in) throw IoError("cannot open config " + path.string());
  applyConfigText(s, in);
}

inline nlohmann::json settingsJson(const Settings& s)
{
  nlohmann::json train = s.train;
  train["threads"] = s.train.threads;
  return {{"model", s.model},
          {"train", train},
          {"mel",
           {{"n_mels", s.mel.nMels},
            {"mel_fmin", s.mel.fMin},
            {"mel_fmax", s.mel.fMax},
            {"cepstral_order", s.mel.cepstralOrder}}},
          {"gl_iters", s.glIters},
          {"corpus", s.corpus},
          {"out", s.out},
          {"ckpt", s.ckpt},
          {"phonemes", s.phonemes}};
}

} // namespace susing::cli
