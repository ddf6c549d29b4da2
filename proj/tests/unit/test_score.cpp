#include <susing/core/rng.hpp>
#include <susing/score/align.hpp>

#include <catch_amalgamated.hpp>

#include <cmath>
#include <sstream>

using namespace susing;
using namespace susing::score;

namespace {

PhonemeInventory inventoryFrom(const std::string& text, std::vector<std::string>* warnings = nullptr)
{
  std::istringstream in(text);
  return parseInventory(in, [&](const std::string& w) {
    if (warnings) warnings->push_back(w);
  });
}

} // namespace

TEST_CASE("shipped inventory has 34 phonemes plus SIL")
{
  std::vector<std::string> warnings;
  auto inv = loadInventory(SUSING_DATA_DIR "/phonemes.txt",
                           [&](const std::string& w) { warnings.push_back(w); });
  CHECK(inv.size() == 35);
  CHECK(inv.token(0) == "SIL");
  CHECK(warnings.empty());
  CHECK(inv == PhonemeInventory(defaultPhonemes()));
  for (std::size_t i = 0; i < inv.size(); ++i) CHECK(inv.id(inv.token(i)) == i);
}

TEST_CASE("inventory parsing")
{
  std::vector<std::string> warnings;
  auto empty = inventoryFrom("", &warnings);
  CHECK(empty.size() == 1);
  CHECK(empty.token(0) == "SIL");
  CHECK(warnings.size() == 1);

  auto withSil = inventoryFrom("# comment\nSIL\na\n\nka  # trailing\n");
  CHECK(withSil.tokens() == std::vector<std::string>{"SIL", "a", "ka"});

  try
  {
    inventoryFrom("a\nka\ni\nka\n");
    FAIL("duplicate accepted");
  }
  catch (const ParseError& e)
  {
    CHECK(e.line() == 4);
    CHECK(std::string(e.what()).find("line 4") != std::string::npos);
    CHECK(std::string(e.what()).find("ka") != std::string::npos);
  }
  CHECK_THROWS_AS(inventoryFrom("a\nb c\n"), ParseError);
  CHECK_THROWS_AS(empty.id("zz"), ArgumentError);
  CHECK_THROWS_AS(empty.token(5), IndexError);
}

TEST_CASE("note and phoneme parsing")
{
  auto notes = parseNotesText("0.0\t0.5\t60\n0.5\t1.0\tR\n");
  REQUIRE(notes.size() == 2);
  CHECK(notes[0].midi == 60);
  CHECK(notes[1].isRest());
  CHECK(notes[1].offsetSec == 1.0);

  PhonemeInventory inv(std::vector<std::string>{"a"});
  auto             ph = parsePhonemesText("0.0\t0.4\ta\n", inv);
  REQUIRE(ph.size() == 1);
  CHECK(ph[0].phoneme == "a");

  try
  {
    parseNotesText("0.5\t0.4\t60\n");
    FAIL("accepted");
  }
  catch (const ParseError& e)
  {
    CHECK(std::string(e.what()) == "offset before onset, line 1");
  }

  auto sorted = parseNotesText("0.5 1.0 62\n0.0 0.5 60\n");
  CHECK(sorted[0].midi == 60);
  CHECK(sorted[1].midi == 62);

  auto lineOf = [](auto fn) -> std::size_t {
    try
    {
      fn();
    }
    catch (const ParseError& e)
    {
      return e.line();
    }
    return 0;
  };
  CHECK(lineOf([] { parseNotesText("0 1 60\n0.9 2 61\n"); }) == 2);
  CHECK(lineOf([] { parseNotesText("0 1 60\n-1 2 61\n"); }) == 2);
  CHECK(lineOf([] { parseNotesText("0 1 128\n"); }) == 1);
  CHECK(lineOf([] { parseNotesText("0 1 x\n"); }) == 1);
  CHECK(lineOf([] { parseNotesText("0 1\n"); }) == 1);
  CHECK(lineOf([&] { parsePhonemesText("0 1 a\n1 2 ka\n", inv); }) == 2);
}

TEST_CASE("frame alignment examples")
{
  PhonemeInventory inv(defaultPhonemes());
  std::vector<NoteEvent>    oneNote{{0.0, 1.0, 60}};
  std::vector<PhonemeEvent> onePhone{{0.0, 1.0, "a"}};
  REQUIRE(kFrameRate == 86.1328125);
  auto fs = alignFrames(oneNote, onePhone, inv);
  CHECK(fs.frames() == 86);
  CHECK(fs.phonemeIds.size() == 86);
  for (std::size_t i = 0; i < 86; ++i)
  {
    CHECK(fs.noteIds[i] == 61);
    CHECK(fs.phonemeIds[i] == inv.id("a"));
  }

  std::vector<NoteEvent> longNote{{0.0, 2.0, 60}};
  CHECK(alignFrames(longNote, onePhone, inv).frames() == 86);

  std::vector<PhonemeEvent> gap{{0.0, 0.5, "a"}, {0.6, 1.0, "i"}};
  auto g = alignFrames(oneNote, gap, inv);
  for (std::size_t i = 0; i < g.frames(); ++i)
  {
    const double c = (double(i) + 0.5) / kFrameRate;
    if (c >= 0.5 && c < 0.6)
      CHECK(g.phonemeIds[i] == 0);
    else
      CHECK(g.phonemeIds[i] != 0);
  }

  std::vector<PhonemeEvent> tiny{{0.0, 0.005, "a"}};
  CHECK_THROWS_AS(alignFrames(oneNote, tiny, inv), ArgumentError);
  CHECK_THROWS_AS(alignFrames({}, onePhone, inv), ArgumentError);
}

TEST_CASE("alignment round trip through run-length decoding")
{
  PhonemeInventory inv(defaultPhonemes());
  Rng              rng(77);
  for (int trial = 0; trial < 50; ++trial)
  {
    std::vector<NoteEvent>    notes;
    std::vector<PhonemeEvent> phones;
    double                    t = 0.0;
    std::size_t               lastNote = 999;
    for (int k = 0; k < 8; ++k)
    {
      const double d = rng.uniform(0.05, 0.6);
      std::size_t  id;
      do id = rng.below(kNoteVocab);
      while (id == lastNote);
      lastNote = id;
      notes.push_back({t, t + d, id == 0 ? std::nullopt : std::optional<int>(int(id) - 1)});
      t += d;
    }
    double      u = 0.0;
    std::size_t lastPh = 999;
    while (u < t)
    {
      const double d = rng.uniform(0.04, 0.3);
      std::size_t  id;
      do id = rng.below(inv.size());
      while (id == lastPh);
      lastPh = id;
      phones.push_back({u, u + d, inv.token(id)});
      u += d;
    }

    const auto fs = alignFrames(notes, phones, inv);
    CHECK(fs == alignFrames(notes, phones, inv));
    REQUIRE(fs.noteIds.size() == fs.phonemeIds.size());
    const double end = double(fs.frames()) / kFrameRate;

    auto checkBoundaries = [&](const std::vector<double>& truth, const std::vector<FrameRun>& runs) {
      for (double b : truth)
      {
        if (b <= 0.0 || b >= end - 1.0 / kFrameRate) continue;
        double nearest = 1e9;
        for (const auto& r : runs) nearest = std::min(nearest, std::abs(r.onsetSec - b));
        CHECK(nearest <= 1.0 / kFrameRate);
      }
    };
    std::vector<double> nb, pb;
    for (const auto& n : notes) nb.push_back(n.onsetSec);
    for (const auto& p : phones) pb.push_back(p.onsetSec);
    const auto noteRuns = decodeRuns(fs.noteIds);
    const auto phoneRuns = decodeRuns(fs.phonemeIds);
    checkBoundaries(nb, noteRuns);
    checkBoundaries(pb, phoneRuns);
    CHECK(noteRuns.size() <= notes.size());
    for (const auto& r : noteRuns) CHECK(r.id < kNoteVocab);
    for (const auto& r : phoneRuns) CHECK_NOTHROW(inv.token(r.id));
  }
}

TEST_CASE("event files round trip through the writers")
{
  std::vector<NoteEvent> notes{{0.0, 0.3, 64}, {0.3, 0.45, std::nullopt}, {0.45, 1.2, 67}};
  std::ostringstream     out;
  writeNotes(out, notes);
  CHECK(parseNotesText(out.str()) == notes);

  PhonemeInventory          inv(defaultPhonemes());
  std::vector<PhonemeEvent> ph{{0.0, 0.1, "k"}, {0.1, 0.3, "a"}, {0.5, 0.9, "N"}};
  std::ostringstream        po;
  writePhonemes(po, ph);
  CHECK(parsePhonemesText(po.str(), inv) == ph);
}
