#include <susing/core/rng.hpp>
#include <susing/dsp/griffin_lim.hpp>
#include <susing/dsp/mcd.hpp>
#include <susing/dsp/mel.hpp>
#include <susing/dsp/stft.hpp>
#include <susing/dsp/vuv.hpp>
#include <susing/dsp/wav.hpp>
#include <susing/dsp/yin.hpp>

#include <catch_amalgamated.hpp>

#include <algorithm>
#include <cmath>
#include <complex>
#include <filesystem>
#include <numbers>

using namespace susing;
using namespace susing::dsp;

namespace {

AudioBuffer tone(double hz, double seconds, double amp = 1.0, double sr = kSampleRate)
{
  AudioBuffer a;
  a.sampleRate = sr;
  a.samples.resize(static_cast<std::size_t>(seconds * sr));
  for (std::size_t i = 0; i < a.size(); ++i)
    a.samples[i] = amp * std::sin(2.0 * std::numbers::pi * hz * double(i) / sr);
  return a;
}

AudioBuffer noise(std::size_t n, std::uint64_t seed)
{
  Rng         rng(seed);
  AudioBuffer a;
  a.samples.resize(n);
  for (auto& s : a.samples) s = rng.uniform(-0.5, 0.5);
  return a;
}

double median(std::vector<double> v)
{
  std::sort(v.begin(), v.end());
  return v[v.size() / 2];
}

double snrDb(const std::vector<double>& ref, const std::vector<double>& est,
             std::size_t from, std::size_t to)
{
  double s = 0, e = 0;
  for (std::size_t i = from; i < to; ++i)
  {
    s += ref[i] * ref[i];
    e += (ref[i] - est[i]) * (ref[i] - est[i]);
  }
  return 10.0 * std::log10(s / e);
}

} // namespace

TEST_CASE("stft of silence is all zero")
{
  AudioBuffer silence;
  silence.samples.assign(22050, 0.0);
  auto r = stft(silence);
  CHECK(r.spec.bins() == 513);
  CHECK(r.spec.frames() == 1 + 22050 / 256);
  for (double m : r.spec.mags.data()) CHECK(m == 0.0);
}

TEST_CASE("stft peak bin of a 440 Hz sine")
{
  auto r = stft(tone(440.0, 1.0));
  const std::size_t expected = std::lround(440.0 * 1024.0 / 22050.0);
  REQUIRE(expected == 20);
  for (std::size_t t = 10; t < r.spec.frames() - 10; ++t)
  {
    std::size_t best = 0;
    for (std::size_t k = 1; k < 513; ++k)
      if (r.spec.mags(k, t) > r.spec.mags(best, t)) best = k;
    CHECK(best == expected);
  }
}

TEST_CASE("stft energy matches a direct DFT")
{
  auto        x = noise(5000, 21);
  auto        r = stft(x);
  const auto  padded = reflectPad(x.samples, 512);
  const auto  win = hannWindow(1024);
  double      direct = 0.0, fast = 0.0;
  for (std::size_t t = 0; t < r.spec.frames(); ++t)
    for (std::size_t k = 0; k < 513; ++k)
    {
      std::complex<double> acc = 0.0;
      for (std::size_t n = 0; n < 1024; ++n)
        acc += padded[t * 256 + n] * win[n] *
               std::polar(1.0, -2.0 * std::numbers::pi * double(k * n % 1024) / 1024.0);
      direct += std::norm(acc);
      fast += r.spec.mags(k, t) * r.spec.mags(k, t);
    }
  CHECK(std::abs(fast - direct) / direct < 1e-6);
}

TEST_CASE("stft/istft round trip with true phase")
{
  SECTION("sine")
  {
    auto x = tone(440.0, 1.0);
    auto r = stft(x);
    auto y = istft(r.spec, r.phase, x.size());
    double worst = 0;
    for (std::size_t i = 1024; i < x.size() - 1024; ++i)
      worst = std::max(worst, std::abs(x.samples[i] - y.samples[i]));
    CHECK(worst < 1e-6);
  }
  SECTION("seeded noise, SNR over the whole signal")
  {
    for (std::uint64_t seed : {1u, 2u, 3u})
    {
      auto x = noise(30000, seed);
      auto r = stft(x);
      auto y = istft(r.spec, r.phase, x.size());
      CHECK(snrDb(x.samples, y.samples, 0, x.size()) > 100.0);
    }
  }
  SECTION("zero magnitudes give zero audio")
  {
    Spectrogram    z{Tensor<double>({513, 20})};
    Tensor<double> ph({513, 20}, 1.3);
    auto           y = istft(z, ph);
    for (double s : y.samples) CHECK(s == 0.0);
  }
}

TEST_CASE("stft argument errors")
{
  CHECK_THROWS_AS(stft(AudioBuffer{}), ArgumentError);
  Spectrogram s{Tensor<double>({513, 4})};
  CHECK_THROWS_AS(istft(s, Tensor<double>({513, 5})), DimensionError);
}

TEST_CASE("griffin_lim on a pure tone converges monotonically")
{
  auto r = stft(tone(440.0, 1.0, 0.5));
  auto gl = griffinLim(r.spec);
  REQUIRE(gl.convergence.size() == 61);
  CHECK(gl.convergence.back() <= 0.05);
  for (std::size_t k = 1; k < gl.convergence.size(); ++k)
    CHECK(gl.convergence[k] <= gl.convergence[k - 1] + 1e-6);
  CHECK(gl.audio.peak() == Catch::Approx(0.95));
  CHECK(gl.audio.size() == (r.spec.frames() - 1) * 256);
}

TEST_CASE("griffin_lim on noise magnitudes is monotone and seeded")
{
  auto r = stft(noise(11025, 5));
  auto a = griffinLim(r.spec, 30, 9);
  for (std::size_t k = 1; k < a.convergence.size(); ++k)
    CHECK(a.convergence[k] <= a.convergence[k - 1] + 1e-6);
  auto b = griffinLim(r.spec, 30, 9);
  CHECK(a.audio.samples == b.audio.samples);
  auto c = griffinLim(r.spec, 30, 10);
  CHECK(a.audio.samples != c.audio.samples);
}

TEST_CASE("griffin_lim is monotone for any seed, with or without momentum")
{
  auto r = stft(tone(523.0, 0.5, 0.4));
  for (std::uint64_t seed = 0; seed < 4; ++seed)
    for (double momentum : {0.0, 0.99})
    {
      auto gl = griffinLim(r.spec, 25, seed, 0.95, momentum);
      for (std::size_t k = 1; k < gl.convergence.size(); ++k)
        CHECK(gl.convergence[k] <= gl.convergence[k - 1] + 1e-6);
    }
}

TEST_CASE("griffin_lim edge cases")
{
  Spectrogram zero{Tensor<double>({513, 10})};
  auto        gl = griffinLim(zero, 5, 0);
  for (double s : gl.audio.samples) CHECK(s == 0.0);

  auto r = stft(tone(300.0, 0.5));
  auto once = griffinLim(r.spec, 0, 3);
  CHECK(once.convergence.size() == 1);
  CHECK(once.audio.size() == (r.spec.frames() - 1) * 256);

  Spectrogram negative{Tensor<double>({513, 3}, -1.0)};
  CHECK_THROWS_AS(griffinLim(negative), ArgumentError);
}

TEST_CASE("mel scale and filterbank")
{
  CHECK(hzToMel(1000.0) == Catch::Approx(15.0));
  for (double hz : {50.0, 700.0, 1000.0, 4000.0, 11025.0})
    CHECK(melToHz(hzToMel(hz)) == Catch::Approx(hz).epsilon(1e-12));

  MelConfig cfg;
  auto      fb = melFilterbank(cfg, 1024);
  REQUIRE(fb.shape() == Shape{80, 513});
  for (std::size_t m = 0; m < 80; ++m)
  {
    double row = 0;
    for (std::size_t k = 0; k < 513; ++k) row += fb(m, k);
    CHECK(row > 0.0);
  }
  for (std::size_t bin : {3u, 40u, 200u, 500u})
  {
    Spectrogram s{Tensor<double>({513, 1})};
    s.mags(bin, 0) = 1.0;
    auto        mel = melSpectrogram(s, cfg);
    std::size_t active = 0;
    for (double v : mel.data()) active += v != 0.0;
    CHECK(active >= 1);
    CHECK(active <= 2);
  }
}

TEST_CASE("mel spectrogram of silence and against a dense multiply")
{
  MelConfig   cfg;
  Spectrogram zero{Tensor<double>({513, 4})};
  auto        lm = logMelSpectrogram(zero, cfg);
  for (double v : lm.data()) CHECK(v == std::log(1e-5));

  auto r = stft(noise(8000, 8));
  auto mel = melSpectrogram(r.spec, cfg);
  auto fb = melFilterbank(cfg, 1024);
  for (std::size_t m = 0; m < 80; ++m)
    for (std::size_t t = 0; t < r.spec.frames(); ++t)
    {
      double acc = 0;
      for (std::size_t k = 0; k < 513; ++k) acc += fb(m, k) * r.spec.mags(k, t);
      CHECK(std::abs(acc - mel(m, t)) <= 1e-10);
    }
  CHECK_THROWS_AS(melFilterbank(MelConfig{80, 0.0, 20000.0}, 1024), ArgumentError);
}

TEST_CASE("mcd closed forms")
{
  Tensor<double> a({1, 13}), b({1, 13});
  b(0, 4) = 1.0;
  CHECK(std::abs(mcdFromCepstra(a, b) - 10.0 / std::log(10.0) * std::sqrt(2.0)) < 1e-9);
  CHECK(mcdFromCepstra(a, b) == Catch::Approx(6.1421).epsilon(1e-4));

  auto x = noise(9000, 4);
  CHECK(mcd(x, x) == 0.0);
  auto y = tone(330.0, 0.5, 0.3);
  const double xy = mcd(x, y), yx = mcd(y, x);
  CHECK(xy == yx);
  CHECK(xy > 0.0);
  AudioBuffer tiny;
  tiny.samples.assign(100, 0.1);
  CHECK_THROWS_AS(mcd(tiny, x), ArgumentError);
}

TEST_CASE("yin on pure tones")
{
  for (double hz : {110.0, 220.0, 440.0, 880.0, 1000.0})
  {
    auto track = yinF0(tone(hz, 1.0, 0.5));
    std::size_t close = 0, voiced = 0;
    std::vector<double> est;
    for (std::size_t t = 0; t < track.size(); ++t)
    {
      CHECK((track.f0Hz[t] > 0.0) == track.voiced[t]);
      if (!track.voiced[t]) continue;
      ++voiced;
      est.push_back(track.f0Hz[t]);
      close += std::abs(track.f0Hz[t] - hz) / hz < 0.01;
    }
    INFO(hz << " Hz");
    REQUIRE(voiced > 0);
    CHECK(std::abs(median(est) - hz) / hz < 0.01);
    CHECK(double(close) >= 0.95 * double(track.size()));
  }
}

TEST_CASE("yin avoids octave errors and rejects silence")
{
  auto a = tone(220.0, 1.0, 0.5);
  auto h3 = tone(660.0, 1.0, 0.1);
  for (std::size_t i = 0; i < a.size(); ++i) a.samples[i] += h3.samples[i];
  auto                track = yinF0(a);
  std::vector<double> est;
  for (std::size_t t = 0; t < track.size(); ++t)
    if (track.voiced[t]) est.push_back(track.f0Hz[t]);
  REQUIRE(!est.empty());
  CHECK(std::abs(median(est) - 220.0) / 220.0 < 0.01);

  AudioBuffer silence;
  silence.samples.assign(22050, 0.0);
  auto s = yinF0(silence);
  for (bool v : s.voiced) CHECK_FALSE(v);
  CHECK_THROWS_AS(yinF0(silence, YinConfig{500.0, 400.0}), ArgumentError);
}

TEST_CASE("vuv detection")
{
  AudioBuffer silence;
  silence.samples.assign(22050, 0.0);
  for (bool v : vuvDetect(silence)) CHECK_FALSE(v);

  auto        x = tone(330.0, 3.0, 0.5);
  const auto  n = x.size();
  for (std::size_t i = n / 3; i < 2 * n / 3; ++i) x.samples[i] = 0.0;
  auto        mask = vuvDetect(x);
  std::size_t match = 0;
  for (std::size_t t = 0; t < mask.size(); ++t)
  {
    const std::size_t centre = t * 256;
    const bool        ideal = centre < n && (centre < n / 3 || centre >= 2 * n / 3);
    match += mask[t] == ideal;
  }
  CHECK(double(match) >= 0.99 * double(mask.size()));

  std::vector<bool> run(20, true);
  run[9] = false;
  auto smooth = medianFilter(run, 5);
  for (bool v : smooth) CHECK(v);
}

TEST_CASE("vuv mask is invariant to global gain")
{
  auto x = tone(200.0, 1.0, 0.5);
  auto n = noise(x.size(), 3);
  for (std::size_t i = 0; i < x.size(); ++i)
    x.samples[i] = (i % 5000 < 2500 ? x.samples[i] : 0.01 * n.samples[i]);
  const auto base = vuvDetect(x);
  Rng        rng(17);
  for (int trial = 0; trial < 5; ++trial)
  {
    const double alpha = std::exp(rng.uniform(-6.0, 6.0));
    auto         y = x;
    for (auto& s : y.samples) s *= alpha;
    CHECK(vuvDetect(y) == base);
  }
}

TEST_CASE("wav round trip and resampling")
{
  const auto dir = std::filesystem::temp_directory_path() / "susing_test_wav";
  std::filesystem::create_directories(dir);
  auto x = tone(440.0, 0.5, 0.5);
  writeWav(dir / "a.wav", x);
  auto y = readWav(dir / "a.wav");
  REQUIRE(y.size() == x.size());
  CHECK(y.sampleRate == kSampleRate);
  for (std::size_t i = 0; i < x.size(); ++i)
    CHECK(std::abs(x.samples[i] - y.samples[i]) <= 1.0 / 32767.0);

  auto hi = tone(440.0, 1.0, 0.5, 44100.0);
  auto bytes = encodeWav(hi);
  auto decoded = decodeWav(bytes);
  CHECK(decoded.sampleRate == 44100.0);
  auto down = resample(decoded, kSampleRate);
  CHECK(down.size() == 22050);
  auto track = yinF0(down);
  std::vector<double> est;
  for (std::size_t t = 0; t < track.size(); ++t)
    if (track.voiced[t]) est.push_back(track.f0Hz[t]);
  REQUIRE(!est.empty());
  CHECK(std::abs(median(est) - 440.0) < 2.0);
  auto ref = tone(440.0, 1.0, 0.5);
  CHECK(snrDb(ref.samples, down.samples, 200, 21800) > 40.0);

  std::vector<unsigned char> junk{'R', 'I', 'F', 'F', 0, 0, 0, 0, 'A', 'V', 'I', ' '};
  CHECK_THROWS_AS(decodeWav(junk), IoError);
  std::filesystem::remove_all(dir);
}
