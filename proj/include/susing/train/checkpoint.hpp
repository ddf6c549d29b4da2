#pragma once

// Checkpoint file layout (all integers little-endian):
//   "SUSG" | u32 version | u64 json length | json metadata
//   u32 tensor count | per tensor: u32 name length, name, u8 dtype (0 f32, 1 f64),
//                                  u32 rank, u64 dims[rank], raw values
//   u64 payload length | u32 CRC-32 of the payload (everything before the footer)
// Tensor names carry a prefix: param/, adam_m/ or adam_v/.

#include "../core/error.hpp"
#include "../model/acoustic.hpp"
#include "config_io.hpp"
#include "optim.hpp"
#include "step.hpp"

#include <boost/crc.hpp>
#include <json.hpp>

#include <bit>
#include <cstdint>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <string>
#include <type_traits>
#include <vector>

namespace susing::train {

static_assert(std::endian::native == std::endian::little, "checkpoint I/O assumes little-endian");

inline constexpr char          kCheckpointMagic[4] = {'S', 'U', 'S', 'G'};
inline constexpr std::uint32_t kCheckpointVersion = 1;

/// Position in the shuffled data stream. `epochRngState` is the generator
/// state before the current epoch's permutation was drawn, so the permutation
/// can be rebuilt on resume; `cursor` is the next index into it.
struct DataCursor
{
  std::string   epochRngState;
  std::uint64_t epoch = 0;
  std::uint64_t cursor = 0;

  bool operator==(const DataCursor&) const = default;
};

template <typename T>
struct Checkpoint
{
  model::ModelConfig model;
  TrainConfig        train;
  std::uint64_t      step = 0;
  DataCursor         data;
  model::ParamSet<T> params;
  AdamState<T>       adam;
};

namespace detail {

template <typename T>
constexpr std::uint8_t dtypeTag()
{
  static_assert(std::is_same_v<T, float> || std::is_same_v<T, double>);
  return std::is_same_v<T, float> ? 0 : 1;
}

class CrcWriter
{
public:
  explicit CrcWriter(std::ostream& out) : mOut(out) {}

  void bytes(const void* p, std::size_t n)
  {
    mOut.write(static_cast<const char*>(p), std::streamsize(n));
    mCrc.process_bytes(p, n);
    mCount += n;
  }

  template <typename I>
  void put(I v)
  {
    bytes(&v, sizeof v);
  }

  std::uint32_t crc() const { return mCrc.checksum(); }
  std::uint64_t count() const { return mCount; }

private:
  std::ostream&     mOut;
  boost::crc_32_type mCrc;
  std::uint64_t     mCount = 0;
};

class Reader
{
public:
  Reader(const unsigned char* p, std::size_t n) : mP(p), mN(n) {}

  const unsigned char* take(std::size_t n)
  {
    if (n > mN - mPos) throw IntegrityError("checkpoint: truncated payload");
    const auto* p = mP + mPos;
    mPos += n;
    return p;
  }

  template <typename I>
  I get()
  {
    I v;
    std::memcpy(&v, take(sizeof v), sizeof v);
    return v;
  }

  std::size_t remaining() const { return mN - mPos; }

private:
  const unsigned char* mP;
  std::size_t          mN;
  std::size_t          mPos = 0;
};

template <typename T>
void writeTensor(CrcWriter& w, const std::string& name, const Tensor<T>& t)
{
  w.put<std::uint32_t>(std::uint32_t(name.size()));
  w.bytes(name.data(), name.size());
  w.put<std::uint8_t>(dtypeTag<T>());
  w.put<std::uint32_t>(std::uint32_t(t.rank()));
  for (auto d : t.shape()) w.put<std::uint64_t>(d);
  w.bytes(t.ptr(), t.size() * sizeof(T));
}

} // namespace detail

inline nlohmann::json checkpointMetadata(const model::ModelConfig& m, const TrainConfig& t,
                                         std::uint64_t step, const DataCursor& data)
{
  return {{"model", m},
          {"train", t},
          {"step", step},
          {"data", {{"epoch", data.epoch}, {"cursor", data.cursor}, {"rng_state", data.epochRngState}}}};
}

/// Writes to `path` via a temporary sibling file that is renamed into place.
template <typename T>
void saveCheckpoint(const std::filesystem::path& path, const Checkpoint<T>& ck)
{
  const std::string meta = checkpointMetadata(ck.model, ck.train, ck.step, ck.data).dump();
  auto tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot write " + tmp.string());
    detail::CrcWriter w(out);
    w.bytes(kCheckpointMagic, 4);
    w.put<std::uint32_t>(kCheckpointVersion);
    w.put<std::uint64_t>(meta.size());
    w.bytes(meta.data(), meta.size());
    const std::size_t n = ck.params.size();
    w.put<std::uint32_t>(std::uint32_t(3 * n));
    for (std::size_t i = 0; i < n; ++i) detail::writeTensor(w, "param/" + ck.params.name(i), ck.params.at(i));
    for (std::size_t i = 0; i < n; ++i) detail::writeTensor(w, "adam_m/" + ck.adam.m.name(i), ck.adam.m.at(i));
    for (std::size_t i = 0; i < n; ++i) detail::writeTensor(w, "adam_v/" + ck.adam.v.name(i), ck.adam.v.at(i));
    const std::uint64_t payload = w.count();
    const std::uint32_t crc = w.crc();
    out.write(reinterpret_cast<const char*>(&payload), sizeof payload);
    out.write(reinterpret_cast<const char*>(&crc), sizeof crc);
    if (!out) throw IoError("write failed: " + tmp.string());
  }
  std::filesystem::rename(tmp, path);
}

/// Throws DimensionError naming the first tensor whose name or shape does not
/// match what the configuration expects.
template <typename T>
void checkLayout(const model::ParamSet<T>& params, const model::ModelConfig& cfg)
{
  const auto expected = model::initParams<T>(cfg, 0);
  for (std::size_t i = 0; i < std::max(params.size(), expected.size()); ++i)
  {
    if (i >= params.size())
      throw DimensionError("checkpoint: missing tensor '" + expected.name(i) + "'");
    if (i >= expected.size())
      throw DimensionError("checkpoint: unexpected tensor '" + params.name(i) + "'");
    if (params.name(i) != expected.name(i))
      throw DimensionError("checkpoint: tensor '" + params.name(i) + "' where '" +
                           expected.name(i) + "' was expected");
    if (params.at(i).shape() != expected.at(i).shape())
      throw DimensionError("checkpoint: tensor '" + params.name(i) + "' has shape " +
                           shapeString(params.at(i).shape()) + ", configuration expects " +
                           shapeString(expected.at(i).shape()));
  }
}

template <typename T>
Checkpoint<T> loadCheckpoint(const std::filesystem::path& path)
{
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  std::vector<unsigned char> bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());

  if (bytes.size() < 8 || std::memcmp(bytes.data(), kCheckpointMagic, 4) != 0)
    throw IntegrityError("checkpoint: " + path.string() + " is not a checkpoint file");
  std::uint32_t version;
  std::memcpy(&version, bytes.data() + 4, 4);
  if (version != kCheckpointVersion)
    throw VersionError("checkpoint: format version " + std::to_string(version) + ", expected " +
                       std::to_string(kCheckpointVersion));
  constexpr std::size_t footer = 12;
  if (bytes.size() < 16 + footer) throw IntegrityError("checkpoint: file is truncated");
  const std::size_t payload = bytes.size() - footer;
  std::uint64_t     storedLen;
  std::uint32_t     storedCrc;
  std::memcpy(&storedLen, bytes.data() + payload, 8);
  std::memcpy(&storedCrc, bytes.data() + payload + 8, 4);
  if (storedLen != payload) throw IntegrityError("checkpoint: file is truncated or has trailing data");
  boost::crc_32_type crc;
  crc.process_bytes(bytes.data(), payload);
  if (crc.checksum() != storedCrc) throw IntegrityError("checkpoint: checksum mismatch");

  detail::Reader r(bytes.data() + 8, payload - 8);
  const auto     metaLen = r.get<std::uint64_t>();
  if (metaLen > r.remaining()) throw IntegrityError("checkpoint: bad metadata length");
  const auto*    metaPtr = r.take(metaLen);
  nlohmann::json meta;
  try
  {
    meta = nlohmann::json::parse(metaPtr, metaPtr + metaLen);
  }
  catch (const nlohmann::json::exception& e)
  {
    throw IntegrityError(std::string("checkpoint: unreadable metadata: ") + e.what());
  }

  Checkpoint<T> ck;
  ck.model = meta.at("model").get<model::ModelConfig>();
  ck.train = meta.at("train").get<TrainConfig>();
  ck.step = meta.at("step").get<std::uint64_t>();
  const auto& d = meta.at("data");
  ck.data = {d.at("rng_state").get<std::string>(), d.at("epoch").get<std::uint64_t>(),
             d.at("cursor").get<std::uint64_t>()};
  ck.adam.steps = ck.step;

  const auto count = r.get<std::uint32_t>();
  for (std::uint32_t i = 0; i < count; ++i)
  {
    const auto  nameLen = r.get<std::uint32_t>();
    const auto* namePtr = r.take(nameLen);
    std::string name(reinterpret_cast<const char*>(namePtr), nameLen);
    const auto  dtype = r.get<std::uint8_t>();
    if (dtype != detail::dtypeTag<T>())
      throw DimensionError("checkpoint: tensor '" + name + "' has dtype tag " +
                           std::to_string(dtype) + ", expected " +
                           std::to_string(detail::dtypeTag<T>()));
    const auto rank = r.get<std::uint32_t>();
    Shape      shape(rank);
    for (auto& s : shape) s = r.get<std::uint64_t>();
    Tensor<T>   t(shape);
    const auto* raw = r.take(t.size() * sizeof(T));
    std::memcpy(t.ptr(), raw, t.size() * sizeof(T));

    const auto slash = name.find('/');
    const auto group = name.substr(0, slash), rest = name.substr(slash + 1);
    if (slash == std::string::npos) throw IntegrityError("checkpoint: unprefixed tensor '" + name + "'");
    if (group == "param") ck.params.add(rest, std::move(t));
    else if (group == "adam_m") ck.adam.m.add(rest, std::move(t));
    else if (group == "adam_v") ck.adam.v.add(rest, std::move(t));
    else throw IntegrityError("checkpoint: unknown tensor group '" + group + "'");
  }
  if (r.remaining() != 0) throw IntegrityError("checkpoint: trailing bytes in payload");

  checkLayout(ck.params, ck.model);
  ck.params.requireSameLayout(ck.adam.m);
  ck.params.requireSameLayout(ck.adam.v);
  return ck;
}

} // namespace susing::train
