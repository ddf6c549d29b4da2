// Command-line entry point: prepare | train | synth | eval | gradcheck.
// Exit status: 0 success, 1 usage error, 2 runtime error.

#include <susing/cli/settings.hpp>
#include <susing/corpus/dataset.hpp>
#include <susing/corpus/evaluate.hpp>
#include <susing/corpus/generate.hpp>
#include <susing/dsp/griffin_lim.hpp>
#include <susing/model/gradient_suite.hpp>
#include <susing/train/checkpoint.hpp>
#include <susing/train/infer.hpp>
#include <susing/train/trainer.hpp>

#include <CLI11.hpp>

#include <cstdio>
#include <iostream>
#include <optional>

using namespace susing;
namespace fs = std::filesystem;

namespace {

struct UsageError : std::runtime_error
{
  using std::runtime_error::runtime_error;
};

// Flag values; unset ones leave the config-file or default value alone.
struct Flags
{
  std::optional<std::string>   config, corpus, out, ckpt, phonemes, score, phones, syn;
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t>   steps, segmentFrames, batch, glIters, checkpointEvery, threads;
  std::optional<std::size_t>   utterances, testUtterances;
  std::optional<double>        lr;
  bool                         ablateStripe = false, ablateSkips = false, force = false;
};

cli::Settings resolve(const Flags& f)
{
  cli::Settings s;
  if (f.config) cli::applyConfigFile(s, *f.config);
  if (f.corpus) s.corpus = *f.corpus;
  if (f.out) s.out = *f.out;
  if (f.ckpt) s.ckpt = *f.ckpt;
  if (f.phonemes) s.phonemes = *f.phonemes;
  if (f.seed) s.train.seed = *f.seed;
  if (f.steps) s.train.maxSteps = *f.steps;
  if (f.segmentFrames) s.train.segmentFrames = *f.segmentFrames;
  if (f.batch) s.train.batchSize = *f.batch;
  if (f.lr) s.train.adam.lr = *f.lr;
  if (f.glIters) s.glIters = *f.glIters;
  if (f.checkpointEvery) s.train.checkpointEvery = *f.checkpointEvery;
  if (f.threads) s.train.threads = *f.threads;
  if (f.ablateStripe) s.model.sunet.useStripe = false;
  if (f.ablateSkips) s.model.sunet.useSkips = false;
  return s;
}

void require(const std::string& value, const char* flag)
{
  if (value.empty()) throw UsageError(std::string("missing required setting ") + flag);
}

void echo(const char* command, const cli::Settings& s)
{
  std::cerr << "susing " << command << " settings: " << cli::settingsJson(s).dump() << '\n';
}

score::PhonemeInventory inventory(const cli::Settings& s)
{
  return s.phonemes.empty() ? score::PhonemeInventory(score::defaultPhonemes())
                            : score::loadInventory(s.phonemes);
}

int runPrepare(const Flags& f)
{
  auto s = resolve(f);
  require(s.out.empty() ? s.corpus : s.out, "--out");
  const fs::path      dir = s.out.empty() ? s.corpus : s.out;
  corpus::CorpusConfig cfg;
  cfg.seed = s.train.seed;
  if (f.utterances) cfg.utterances = *f.utterances;
  if (f.testUtterances) cfg.testUtterances = *f.testUtterances;
  echo("prepare", s);
  const auto m = corpus::generateCorpus(dir, cfg, f.force);
  corpus::cacheSpectrograms(dir, m);
  std::cout << "wrote " << m.train.size() << " training and " << m.test.size()
            << " test utterances to " << dir.string() << '\n';
  return 0;
}

int runTrain(const Flags& f)
{
  auto s = resolve(f);
  require(s.corpus, "--corpus");
  require(s.out, "--out");
  s.model.validate();
  s.train.validate();
  echo("train", s);

  const fs::path corpusDir = s.corpus;
  const auto     inv = inventory(s);
  const auto     manifest = corpus::readManifest(corpusDir / "manifest.json");
  auto segments = corpus::trainingSegments(corpus::loadSplit(corpusDir, manifest.train, inv), s.train.segmentFrames);
  std::cerr << segments.size() << " training segments from " << manifest.train.size() << " utterances\n";

  std::optional<train::Trainer<float>> trainer;
  if (!s.ckpt.empty())
  {
    auto ck = train::loadCheckpoint<float>(s.ckpt);
    if (f.ablateStripe || f.ablateSkips)
      if (!(ck.model == s.model))
        throw UsageError("ablation flags conflict with the model stored in " + s.ckpt);
    if (ck.train.segmentFrames != s.train.segmentFrames)
      throw UsageError("segment length differs from the one stored in " + s.ckpt);
    std::cerr << "resuming from step " << ck.step << '\n';
    trainer.emplace(std::move(ck), s.train, std::move(segments));
  }
  else
    trainer.emplace(s.model, s.train, std::move(segments));

  train::runTraining(*trainer, s.out, [&](std::uint64_t step, const train::StepResult& r) {
    if (step % 10 == 0 || step == s.train.maxSteps)
      std::cerr << "step " << step << " loss " << r.loss << " grad_norm " << r.gradNorm << '\n';
  });
  std::cout << "wrote " << (fs::path(s.out) / "final.susg").string() << " at step " << trainer->steps() << '\n';
  return 0;
}

dsp::AudioBuffer synthesize(const score::FrameScore& fs, const train::Checkpoint<float>& ck,
                            const cli::Settings& s)
{
  const auto       mags = train::inferAutoregressive(fs, ck.params, ck.model, ck.train.segmentFrames);
  dsp::Spectrogram spec;
  spec.mags = mags.cast<double>();
  return dsp::griffinLim(spec, s.glIters, s.train.seed).audio;
}

int runSynth(const Flags& f)
{
  auto s = resolve(f);
  require(s.ckpt, "--ckpt");
  require(s.out, "--out");
  const bool single = f.score || f.phones;
  if (single && !(f.score && f.phones)) throw UsageError("--score and --phones go together");
  if (!single) require(s.corpus, "--corpus (or --score and --phones)");
  echo("synth", s);

  const auto ck = train::loadCheckpoint<float>(s.ckpt);
  const auto inv = inventory(s);
  if (single)
  {
    const auto fs = score::alignFrames(score::loadNotes(*f.score), score::loadPhonemes(*f.phones, inv), inv);
    dsp::writeWav(s.out, synthesize(fs, ck, s));
    std::cout << "wrote " << s.out << " (" << fs.frames() << " frames)\n";
    return 0;
  }
  const fs::path corpusDir = s.corpus, outDir = s.out;
  fs::create_directories(outDir);
  for (const auto& utt : corpus::readManifest(corpusDir / "manifest.json").test)
  {
    const auto fs = score::alignFrames(score::loadNotes(corpus::notesPath(corpusDir, utt)),
                                       score::loadPhonemes(corpus::phonesPath(corpusDir, utt), inv), inv);
    dsp::writeWav(corpus::wavPath(outDir, utt), synthesize(fs, ck, s));
    std::cout << "wrote " << corpus::wavPath(outDir, utt).string() << '\n';
  }
  return 0;
}

int runEval(const Flags& f)
{
  auto s = resolve(f);
  require(s.corpus, "--corpus");
  require(f.syn.value_or(""), "--syn");
  require(s.out, "--out");
  s.mel.validate(dsp::StftConfig{}.bins());
  echo("eval", s);

  const fs::path corpusDir = s.corpus, synDir = *f.syn, report = s.out;
  const auto     melDir = report.has_parent_path() ? report.parent_path() : fs::path(".");
  fs::create_directories(melDir);
  std::vector<corpus::EvalEntry> entries;
  for (const auto& utt : corpus::readManifest(corpusDir / "manifest.json").test)
  {
    const auto ref = dsp::readWav(corpus::wavPath(corpusDir, utt));
    const auto syn = dsp::readWav(corpus::wavPath(synDir, utt));
    entries.push_back(corpus::evaluate(utt, ref, syn, s.mel));
    corpus::writeMelCsv(melDir / (utt + ".mel.csv"), syn, s.mel);
  }
  corpus::writeReport(report, entries);
  std::cout << std::ifstream(report).rdbuf();
  return 0;
}

int runGradcheck(const Flags& f)
{
  const auto seed = f.seed.value_or(0);
  const auto worst = model::worstPerOp(model::runGradientSuite(seed));
  bool       ok = true;
  std::printf("%-20s %-30s %s\n", "op", "worst_wrt", "max_rel_error");
  for (const auto& e : worst)
  {
    const bool pass = e.result.maxRelError < 1e-4;
    ok = ok && pass;
    std::printf("%-20s %-30s %.3e%s\n", e.op.c_str(), e.wrt.c_str(), e.result.maxRelError, pass ? "" : "  FAIL");
  }
  return ok ? 0 : 2;
}

} // namespace

int main(int argc, char** argv)
{
  CLI::App app{"SU-net singing voice synthesis toolkit"};
  app.require_subcommand(1);
  Flags f;

  auto common = [&](CLI::App* c) {
    c->add_option("--config", f.config, "Config file of key = value settings");
    c->add_option("--seed", f.seed, "Seed for every stochastic step");
    c->add_option("--phonemes", f.phonemes, "Phoneme inventory file (default: built-in)");
  };

  auto* prepare = app.add_subcommand("prepare", "Generate the toy corpus and cache its spectrograms");
  common(prepare);
  prepare->add_option("--out,--corpus", f.out, "Corpus directory to create");
  prepare->add_option("--utterances", f.utterances, "Number of utterances (default 8)");
  prepare->add_option("--test-utterances", f.testUtterances, "Size of the test split (default 2)");
  prepare->add_flag("--force", f.force, "Overwrite a non-empty directory");

  auto* trainCmd = app.add_subcommand("train", "Train the acoustic model");
  common(trainCmd);
  trainCmd->add_option("--corpus", f.corpus, "Prepared corpus directory");
  trainCmd->add_option("--out", f.out, "Checkpoint directory");
  trainCmd->add_option("--ckpt", f.ckpt, "Resume from this checkpoint");
  trainCmd->add_option("--steps", f.steps, "Total number of training steps");
  trainCmd->add_option("--segment-frames", f.segmentFrames, "Frames per training segment");
  trainCmd->add_option("--lr", f.lr, "Adam learning rate");
  trainCmd->add_option("--batch", f.batch, "Segments per step");
  trainCmd->add_option("--checkpoint-every", f.checkpointEvery, "Write step_NNNNNN.susg every N steps");
  trainCmd->add_option("--threads", f.threads, "Worker threads (default: SUSING_THREADS or all cores)");
  trainCmd->add_flag("--ablate-stripe", f.ablateStripe, "Disable the stripe pooling modules");
  trainCmd->add_flag("--ablate-skips", f.ablateSkips, "Disable the skip connections");

  auto* synth = app.add_subcommand("synth", "Synthesise audio from a score and a checkpoint");
  common(synth);
  synth->add_option("--ckpt", f.ckpt, "Checkpoint file");
  synth->add_option("--score", f.score, "Note TSV");
  synth->add_option("--phones", f.phones, "Phoneme TSV");
  synth->add_option("--corpus", f.corpus, "Synthesise every test utterance of this corpus instead");
  synth->add_option("--out", f.out, "Output WAV (or directory with --corpus)");
  synth->add_option("--gl-iters", f.glIters, "Griffin-Lim iterations");

  auto* eval = app.add_subcommand("eval", "Compare synthesised test utterances with the corpus");
  common(eval);
  eval->add_option("--corpus", f.corpus, "Prepared corpus directory (references)");
  eval->add_option("--syn", f.syn, "Directory of synthesised <utt>.wav files");
  eval->add_option("--out", f.out, "Report CSV; log-mel CSVs are written beside it");

  auto* grad = app.add_subcommand("gradcheck", "Finite-difference check of every differentiable op");
  grad->add_option("--seed", f.seed, "Seed for the random probes");

  try
  {
    app.parse(argc, argv);
  }
  catch (const CLI::CallForHelp& e)
  {
    return app.exit(e);
  }
  catch (const CLI::CallForAllHelp& e)
  {
    return app.exit(e);
  }
  catch (const CLI::ParseError& e)
  {
    app.exit(e);
    return 1;
  }

  try
  {
    if (*prepare) return runPrepare(f);
    if (*trainCmd) return runTrain(f);
    if (*synth) return runSynth(f);
    if (*eval) return runEval(f);
    if (*grad) return runGradcheck(f);
  }
  catch (const UsageError& e)
  {
    std::cerr << "usage error: " << e.what() << "\n" << app.help();
    return 1;
  }
  catch (const ParseError& e)
  {
    // malformed or unknown settings in a config file
    std::cerr << "usage error: " << e.what() << '\n';
    return 1;
  }
  catch (const std::exception& e)
  {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
  return 1;
}
