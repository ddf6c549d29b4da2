#pragma once

#include "error.hpp"

#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>
#include <sstream>
#include <string>
#include <vector>

namespace susing {

/// Seeded generator whose derived distributions are computed here rather than
/// by <random>'s distribution classes, whose output differs between standard
/// library implementations.
class Rng
{
public:
  explicit Rng(std::uint64_t seed = 0) : mEngine(seed) {}

  std::uint64_t next() { return mEngine(); }

  /// Uniform in [0, 1) with 53 random bits.
  double uniform() { return static_cast<double>(mEngine() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  /// Uniform integer in [0, n).
  std::uint64_t below(std::uint64_t n)
  {
    if (n == 0) throw ArgumentError("Rng::below: n must be positive");
    const std::uint64_t limit = UINT64_MAX - UINT64_MAX % n;
    std::uint64_t       v;
    do { v = mEngine(); } while (v >= limit);
    return v % n;
  }

  /// Standard normal via Box-Muller (one value per call, no caching so that
  /// the state stays a plain engine state).
  double normal()
  {
    double u1 = uniform();
    while (u1 <= 0.0) u1 = uniform();
    const double u2 = uniform();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
  }

  template <typename T>
  void shuffle(std::vector<T>& v)
  {
    for (std::size_t i = v.size(); i > 1; --i)
      std::swap(v[i - 1], v[below(i)]);
  }

  std::string state() const
  {
    std::ostringstream os;
    os << mEngine;
    return os.str();
  }

  void setState(const std::string& s)
  {
    std::istringstream is(s);
    is >> mEngine;
    if (!is) throw ArgumentError("Rng::setState: malformed engine state");
  }

private:
  std::mt19937_64 mEngine;
};

} // namespace susing
