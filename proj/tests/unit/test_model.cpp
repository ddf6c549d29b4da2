#include "oracles.hpp"

#include <susing/model/acoustic.hpp>
#include <susing/model/gradient_suite.hpp>

#include <catch_amalgamated.hpp>

#include <cmath>

using namespace susing;
using namespace susing::model;

namespace {

ParamSet<double> randomStripeParams(std::size_t C, Rng& rng)
{
  ParamSet<double> p;
  p.add("conv_h.kernel", oracle::randomTensor({C, C, 3}, rng));
  p.add("conv_h.bias", oracle::randomTensor({C}, rng));
  p.add("conv_v.kernel", oracle::randomTensor({C, C, 3}, rng));
  p.add("conv_v.bias", oracle::randomTensor({C}, rng));
  p.add("fuse.kernel", oracle::randomTensor({C, C, 1, 1}, rng));
  p.add("fuse.bias", oracle::randomTensor({C}, rng));
  return p;
}

Tensor<double> stripeOracle(const Tensor<double>& x, const ParamSet<double>& p)
{
  return oracle::stripePool(x, p["conv_h.kernel"], p["conv_h.bias"], p["conv_v.kernel"],
                            p["conv_v.bias"], p["fuse.kernel"], p["fuse.bias"]);
}

score::FrameScore randomScore(std::size_t T, Rng& rng, const EmbedderConfig& cfg)
{
  score::FrameScore fs;
  for (std::size_t t = 0; t < T; ++t)
  {
    fs.phonemeIds.push_back(rng.below(cfg.phonemeVocab));
    fs.noteIds.push_back(rng.below(cfg.noteVocab));
  }
  return fs;
}

} // namespace

TEST_CASE("stripe pooling matches the literal oracle")
{
  Rng                                     rng(11);
  std::vector<std::array<std::size_t, 3>> shapes{{2, 6, 5}, {1, 1, 1}, {3, 1, 7}, {3, 9, 1},
                                                 {1, 513, 4}, {4, 17, 4}, {2, 2, 2}};
  while (shapes.size() < 24)
    shapes.push_back({1 + rng.below(5), 1 + rng.below(20), 1 + rng.below(20)});
  for (auto [C, H, W] : shapes)
  {
    const auto p = randomStripeParams(C, rng);
    const auto x = oracle::randomTensor({C, H, W}, rng, 2.0);
    const auto z = stripePool(x, p, "");
    REQUIRE(z.shape() == x.shape());
    INFO(C << "x" << H << "x" << W);
    CHECK(maxAbsDiff(z, stripeOracle(x, p)) <= 1e-12);
  }
}

TEST_CASE("stripe pooling gate shrinks every nonzero element")
{
  Rng rng(12);
  for (int trial = 0; trial < 30; ++trial)
  {
    const std::size_t C = 1 + rng.below(4), H = 1 + rng.below(12), W = 1 + rng.below(12);
    const auto        p = randomStripeParams(C, rng);
    auto              x = oracle::randomTensor({C, H, W}, rng, 5.0);
    x[0] = 0.0;
    const auto z = stripePool(x, p, "");
    for (std::size_t i = 0; i < x.size(); ++i)
    {
      if (x[i] == 0.0)
        CHECK(z[i] == 0.0);
      else
        CHECK(std::abs(z[i]) < std::abs(x[i]));
    }
  }
  for (double bias : {-1e4, 1e4})
  {
    auto p = randomStripeParams(2, rng);
    p["fuse.bias"].fill(bias);
    const auto x = oracle::randomTensor({2, 5, 6}, rng, 3.0);
    const auto z = stripePool(x, p, "");
    for (std::size_t i = 0; i < x.size(); ++i) CHECK(std::abs(z[i]) < std::abs(x[i]));
  }
}

TEST_CASE("stripe pooling of a constant with pass-through weights")
{
  for (std::size_t C : {1u, 3u})
    for (double c : {-1.5, 0.25, 2.0})
    {
      ParamSet<double> p;
      Rng              rng(0);
      addStripePoolParams(p, "", C, 3, rng);
      for (const char* k : {"conv_h.kernel", "conv_v.kernel"})
      {
        p[k].fill(0.0);
        for (std::size_t i = 0; i < C; ++i) p[k][(i * C + i) * 3 + 1] = 1.0;
      }
      p["fuse.kernel"].fill(0.0);
      for (std::size_t i = 0; i < C; ++i) p["fuse.kernel"][i * C + i] = 1.0;
      const Tensor<double> x({C, 7, 9}, c);
      const auto           z = stripePool(x, p, "");
      const double         expected = c / (1.0 + std::exp(-2.0 * c));
      for (double v : z.data()) CHECK(v == Catch::Approx(expected).epsilon(1e-14));
    }
}

TEST_CASE("stripe pooling rejects a channel mismatch")
{
  Rng  rng(2);
  auto p = randomStripeParams(3, rng);
  CHECK_THROWS_AS(stripePool(Tensor<double>({2, 4, 4}), p, ""), DimensionError);
  StripePool<double> layer(Binder<double>(p, nullptr), 3);
  CHECK_THROWS_AS(layer.backward(Tensor<double>({3, 4, 4})), StateError);
}

TEST_CASE("SU-net shape pyramid")
{
  SUNetConfig cfg;
  const auto  params = [&] {
    ParamSet<float> p;
    Rng             rng(5);
    addSUNetParams(p, cfg, rng, "");
    return p;
  }();
  const std::vector<std::size_t> heights{513, 257, 129, 65, 33, 17, 9, 5};
  const std::vector<std::size_t> channels{2, 16, 32, 64, 128, 256, 512, 512};
  for (std::size_t T : {1u, 7u, 64u, 128u})
  {
    Rng             rng(T);
    Tensor<float>   x({2, 513, T});
    for (auto& v : x.data()) v = float(rng.uniform());
    SUNet<float>    net(Binder<float>(params, nullptr), cfg);
    const auto      y = net.forward(x);
    CHECK(y.shape() == Shape{1, 513, T});
    CHECK(net.pyramid().heights == heights);
    CHECK(net.pyramid().channels == channels);
    std::size_t w = T;
    for (std::size_t k = 0; k <= 7; ++k)
    {
      CHECK(net.pyramid().widths[k] == w);
      w = (w + 2 * 2 - 5) / 2 + 1;
    }
    for (float v : y.data()) CHECK(v >= 0.0f);
  }
}

TEST_CASE("SU-net ablations keep shapes and shrink the parameter count")
{
  SUNetConfig full = tinyModelConfig().sunet, plain = full, noStripe = full;
  plain.useStripe = plain.useSkips = false;
  noStripe.useStripe = false;
  auto count = [](const SUNetConfig& c) {
    ParamSet<double> p;
    Rng              rng(1);
    addSUNetParams(p, c, rng, "");
    return p.count();
  };
  CHECK(count(full) > count(noStripe));
  CHECK(count(noStripe) > count(plain));

  ParamSet<double> p;
  Rng              rng(3);
  addSUNetParams(p, plain, rng, "");
  const auto x = oracle::randomTensor({2, 33, 8}, rng);
  Pyramid    pyr;
  const auto y = sunetForward(x, p, plain, &pyr, "");
  CHECK(y.shape() == Shape{1, 33, 8});
  CHECK(pyr.heights == std::vector<std::size_t>{33, 17, 9, 5});

  ModelConfig mFull, mAblate;
  mAblate.sunet.useStripe = false;
  CHECK(initParams<float>(mFull, 0).count() > initParams<float>(mAblate, 0).count());
}

TEST_CASE("SU-net channel doubling with a cap")
{
  SUNetConfig cfg;
  for (std::size_t k = 1; k <= 7; ++k)
    CHECK(cfg.channels(k) == std::min<std::size_t>(16u << (k - 1), 512u));
  cfg.baseChannels = 2;
  cfg.maxChannels = 6;
  CHECK(cfg.channels(3) == 6);
}

TEST_CASE("score embedding structure")
{
  const ModelConfig cfg;
  const auto        params = initParams<double>(cfg, 4);
  score::FrameScore one{{5}, {3}};
  CHECK(embedScore(one, params).shape() == Shape{288, 1});

  score::FrameScore two{{60, 60, 61}, {3, 3, 3}};
  const auto        e = embedScore(two, params);
  for (std::size_t r = 0; r < 288; ++r)
  {
    CHECK(e(r, 0) == e(r, 1));
    if (r < 256)
      CHECK(e(r, 1) == e(r, 2));
  }
  bool noteRowsDiffer = false;
  for (std::size_t r = 256; r < 288; ++r) noteRowsDiffer |= e(r, 1) != e(r, 2);
  CHECK(noteRowsDiffer);

  score::FrameScore bad{{129}, {0}};
  CHECK_THROWS_AS(embedScore(bad, params), IndexError);
  score::FrameScore badPh{{0}, {35}};
  CHECK_THROWS_AS(embedScore(badPh, params), IndexError);
}

TEST_CASE("pre-nets match the composed oracles")
{
  const ModelConfig cfg;
  auto              params = initParams<double>(cfg, 8);
  Rng               rng(9);
  for (const char* name : {"score_prenet/dense.bias", "score_prenet/conv1.bias", "score_prenet/conv2.bias",
                           "spec_prenet/conv1.bias", "spec_prenet/conv2.bias"})
    params[name] = oracle::randomTensor({513}, rng, 0.1);

  auto leaky = [](Tensor<double> t) {
    for (auto& v : t.data()) v = v > 0 ? v : 0.2 * v;
    return t;
  };
  auto prenetOracle = [&](const Tensor<double>& x, const std::string& pre) {
    const auto h = leaky(oracle::conv1d(x, params[pre + "conv1.kernel"], params[pre + "conv1.bias"], 1, 2));
    return oracle::conv1d(h, params[pre + "conv2.kernel"], params[pre + "conv2.bias"], 1, 2);
  };

  const std::size_t T = 128;
  const auto        fs = randomScore(T, rng, cfg.embed);
  const auto        e = embedScore(fs, params);
  const auto        s = scorePrenet(e, params, cfg.embed);
  REQUIRE(s.shape() == Shape{513, T});
  const auto d = transpose2d(oracle::dense(transpose2d(e), params["score_prenet/dense.weight"],
                                           params["score_prenet/dense.bias"]));
  CHECK(maxAbsDiff(s, prenetOracle(d, "score_prenet/")) <= 1e-10);

  const auto prev = oracle::randomTensor({513, T}, rng, 3.0);
  const auto p = specPrenet(prev, params, cfg.embed);
  REQUIRE(p.shape() == Shape{513, T});
  CHECK(maxAbsDiff(p, prenetOracle(prev, "spec_prenet/")) <= 1e-10);

  CHECK_THROWS_AS(specPrenet(Tensor<double>({512, 4}), params, cfg.embed), DimensionError);
}

TEST_CASE("pre-nets with zero biases map zero to zero")
{
  const ModelConfig cfg;
  const auto        params = initParams<double>(cfg, 1);
  const auto        z = specPrenet(Tensor<double>({513, 16}), params, cfg.embed);
  for (double v : z.data()) CHECK(v == 0.0);
  const auto s = scorePrenet(Tensor<double>({288, 16}), params, cfg.embed);
  for (double v : s.data()) CHECK(v == 0.0);
}

TEST_CASE("acoustic forward shapes, zero model and determinism")
{
  const ModelConfig cfg;
  const auto        params = initParams<float>(cfg, 2);
  Rng               rng(4);
  const auto        fs = randomScore(128, rng, cfg.embed);
  Tensor<float>     prev({513, 128});
  for (auto& v : prev.data()) v = float(rng.uniform(0.0, 2.0));
  const auto a = acousticForward(fs, prev, params, cfg);
  CHECK(a.shape() == Shape{513, 128});
  CHECK(a == acousticForward(fs, prev, params, cfg));
  for (float v : a.data()) CHECK(v >= 0.0f);

  ParamSet<float> zero = params.zerosLike();
  const auto      silent = acousticForward(fs, prev, zero, cfg);
  for (float v : silent.data()) CHECK(v == 0.0f);

  score::FrameScore shorter{{1, 2}, {1, 2}};
  CHECK_THROWS_AS(acousticForward(shorter, prev, params, cfg), ArgumentError);
}

TEST_CASE("gradient suite passes at the reference seed")
{
  for (const auto& e : runGradientSuite(3))
  {
    INFO(e.op << " / " << e.wrt << " analytic " << e.result.analytic << " numeric " << e.result.numeric);
    CHECK(e.result.maxRelError < 1e-4);
  }
}

TEST_CASE("gradient suite misses are round-off sized across seeds")
{
  for (std::uint64_t seed = 0; seed < 6; ++seed)
    for (const auto& e : runGradientSuite(seed))
    {
      INFO("seed " << seed << ": " << e.op << " / " << e.wrt << " analytic " << e.result.analytic
                   << " numeric " << e.result.numeric);
      CHECK((e.result.maxRelError < 1e-4 ||
             std::abs(e.result.analytic - e.result.numeric) < 1e-9));
    }
}
