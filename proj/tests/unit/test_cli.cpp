#include <susing/cli/settings.hpp>

#include <catch_amalgamated.hpp>

#include <sstream>

using namespace susing;
using cli::Settings;

namespace {

Settings fromText(const std::string& text)
{
  Settings           s;
  std::istringstream in(text);
  cli::applyConfigText(s, in);
  return s;
}

} // namespace

TEST_CASE("config text overrides defaults", "[cli]")
{
  const auto s = fromText(R"(# comment
[train]
lr = 5e-4        # trailing comment
batch_size = 2
seed = 42
[model]
use_stripe = false
base_channels = 8
[paths]
corpus = "toy dir"
)");
  CHECK(s.train.adam.lr == 5e-4);
  CHECK(s.train.batchSize == 2);
  CHECK(s.train.seed == 42);
  CHECK_FALSE(s.model.sunet.useStripe);
  CHECK(s.model.sunet.useSkips);
  CHECK(s.model.sunet.baseChannels == 8);
  CHECK(s.corpus == "toy dir");
  CHECK(s.train.segmentFrames == 128);
}

TEST_CASE("config errors carry the line number", "[cli]")
{
  try
  {
    fromText("lr = 1e-3\n\nmystery = 1\n");
    FAIL("expected ParseError");
  }
  catch (const ParseError& e)
  {
    CHECK(e.line() == 3);
    CHECK_THAT(e.what(), Catch::Matchers::ContainsSubstring("mystery"));
  }
  CHECK_THROWS_AS(fromText("lr 1e-3\n"), ParseError);
  CHECK_THROWS_AS(fromText("batch_size = two\n"), ParseError);
  CHECK_THROWS_AS(fromText("use_skips = yes\n"), ParseError);
  CHECK_THROWS_AS(fromText("batch_size = -1\n"), ParseError);
}

TEST_CASE("every config key is applied and echoed", "[cli]")
{
  Settings s;
  for (const auto& [key, _] : cli::settingKeys())
  {
    const bool flag = key.rfind("use_", 0) == 0;
    const bool text = key == "corpus" || key == "out" || key == "ckpt" || key == "phonemes";
    CHECK_NOTHROW(cli::applySetting(s, key, flag ? "false" : (text ? "\"p\"" : "3")));
  }
  CHECK(s.train.maxSteps == 3);
  CHECK(s.glIters == 3);
  CHECK(s.mel.nMels == 3);
  const auto j = cli::settingsJson(s);
  CHECK(j.at("train").at("threads") == 3);
  CHECK(j.at("model").at("sunet").at("use_skips") == false);
  CHECK(j.at("ckpt") == "p");
}

TEST_CASE("model and training configs round trip through JSON", "[cli]")
{
  auto m = model::tinyModelConfig(17);
  m.sunet.useSkips = false;
  train::TrainConfig t;
  t.adam.lr = 0.123;
  t.seed = 99;
  const nlohmann::json jm = m, jt = t;
  CHECK(jm.get<model::ModelConfig>() == m);
  CHECK(jt.get<train::TrainConfig>() == t);
  nlohmann::json extra = jm;
  extra["sunet"]["colour"] = "blue";
  CHECK_THROWS_AS(extra.get<model::ModelConfig>(), ArgumentError);
}
