// tests/recipe_test.cc

// Copyright 2026 The dynvoc Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//  http://www.apache.org/licenses/LICENSE-2.0
//
// THIS CODE IS PROVIDED *AS IS* BASIS, WITHOUT WARRANTIES OR CONDITIONS OF ANY
// KIND, EITHER EXPRESS OR IMPLIED, INCLUDING WITHOUT LIMITATION ANY IMPLIED
// WARRANTIES OR CONDITIONS OF TITLE, FITNESS FOR A PARTICULAR PURPOSE,
// MERCHANTABLITY OR NON-INFRINGEMENT.
// See the Apache 2 License for the specific language governing permissions and
// limitations under the License.

#include <gtest/gtest.h>

#include <algorithm>
#include <chrono>
#include <filesystem>
#include <random>
#include <sstream>

#include "dynvoc/corpus.h"
#include "dynvoc/equiv.h"
#include "dynvoc/recipe.h"
#include "dynvoc/toy.h"

namespace dynvoc {
namespace {

Resources ToyResources(int num_words = 12, int num_new = 3, int order = 2, unsigned seed = 5) {
  Resources r;
  ToyLexiconOptions lo;
  lo.num_words = num_words;
  lo.seed = seed;
  r.lexicon = GenerateToyLexicon(lo);
  std::vector<std::string> vocab;
  for (const auto &e : r.lexicon.entries) vocab.push_back(e.word);
  ToyLmOptions to;
  to.order = order;
  to.seed = seed + 1;
  r.lm = GenerateToyLm(vocab, to);
  r.new_words = ToNewWords(GenerateToyNewWords(r.lexicon, num_new, seed + 2), 10.0);
  return r;
}

std::vector<std::string> Pron(const Resources &r, const std::string &w) {
  for (const auto &e : r.lexicon.entries)
    if (e.word == w) return e.phones;
  for (const auto &e : r.new_words.entries)
    if (e.word == w) return e.phones;
  ADD_FAILURE() << "no pronunciation for " << w;
  return {};
}

FrameScores SentenceScores(const Resources &r, const Cascade &c,
                           const std::vector<std::string> &sent, unsigned seed, bool trailing_sil) {
  std::vector<std::string> phones;
  for (size_t k = 0; k < sent.size(); ++k) {
    if (k) phones.push_back(r.lexicon.silence);
    for (const auto &p : Pron(r, sent[k])) phones.push_back(p);
  }
  if (trailing_sil) phones.push_back(r.lexicon.silence);
  LabelSeq units = UnitsForPhones(phones, *c.EmitSymbols(), ContextType::kMono, 3);
  ScoreGenOptions so;
  so.seed = seed;
  return GenerateScores(units, c.NumUnits(), so);
}

TEST(RecipeParse, SettingsStepsAndErrors) {
  Recipe r = ParseRecipeText(
      "# comment\nset filters = eps+reach\nA = lexicon(disambig=off)\n"
      "B = grammar()\nresult = lazy(A, B)  # tail\n",
      "x");
  EXPECT_EQ(r.settings.at("filters"), "eps+reach");
  ASSERT_EQ(r.steps.size(), 3u);
  EXPECT_EQ(r.steps[0].kwargs.at("disambig"), "off");
  EXPECT_EQ(r.steps[2].args, (std::vector<std::string>{"A", "B"}));
  std::ostringstream os;
  WriteRecipe(r, os);
  Recipe back = ParseRecipeText(os.str());
  EXPECT_EQ(back.steps.size(), 3u);
  EXPECT_EQ(back.name, "x");

  auto line_of = [](const std::string &text) {
    try {
      ParseRecipeText(text);
    } catch (const ParseError &e) {
      return e.line();
    }
    return -1;
  };
  EXPECT_EQ(line_of("A = lexicon()\nB = frobnicate(A)\nr = static(B)\n"), 2);
  EXPECT_EQ(line_of("set colour = red\n"), 1);
  EXPECT_EQ(line_of("A = lexicon()\nA = grammar()\nr = static(A)\n"), 2);
  EXPECT_EQ(line_of("A = lexicon()\n"), 1);
  EXPECT_EQ(line_of("A lexicon()\n"), 1);
  EXPECT_EQ(line_of("r = static(A)\nB = grammar()\nq = static(B)\n"), 1);
}

TEST(RecipeParse, BuiltinsParse) {
  for (const auto &n : BuiltinRecipeNames()) EXPECT_NO_THROW(BuiltinRecipe(n)) << n;
  EXPECT_THROW(BuiltinRecipe("nope"), Error);
}

TEST(RecipeRun, UndefinedArgumentNamesLine) {
  Resources r = ToyResources(6, 1);
  RecipeRunner run(ParseRecipeText("A = lexicon()\nB = connect(Q)\nresult = static(B)\n"), r);
  try {
    run.Run();
    FAIL();
  } catch (const Error &e) {
    EXPECT_NE(std::string(e.what()).find("line 2"), std::string::npos) << e.what();
    EXPECT_NE(std::string(e.what()).find("'Q'"), std::string::npos) << e.what();
  }
}

TEST(RecipeRun, AllBuiltinsDecodeAlike) {
  Resources r = ToyResources();
  std::map<std::string, Cascade> cs;
  for (const auto &n : BuiltinRecipeNames()) cs.emplace(n, RecipeRunner(BuiltinRecipe(n), r).Run());
  const Cascade &ref = cs.at("static");
  for (const auto &[n, c] : cs) EXPECT_EQ(c.NumUnits(), ref.NumUnits()) << n;

  std::mt19937 rng(17);
  std::vector<std::string> vocab;
  for (const auto &e : r.lexicon.entries) vocab.push_back(e.word);
  for (const auto &e : r.new_words.entries) vocab.push_back(e.word);
  for (int t = 0; t < 12; ++t) {
    std::vector<std::string> sent;
    int len = 1 + static_cast<int>(rng() % 3);
    for (int k = 0; k < len; ++k) sent.push_back(vocab[rng() % vocab.size()]);
    if (t % 4 == 0) sent.back() = r.new_words.entries[t % r.new_words.entries.size()].word;
    FrameScores fs = SentenceScores(r, ref, sent, 100 + t, t % 3 == 0);
    DecodeResult want = DecodeCascade(ref, fs);
    for (const auto &[n, c] : cs) {
      DecodeResult got = DecodeCascade(c, fs);
      EXPECT_NEAR(got.weight.Value(), want.weight.Value(), 1e-6) << n << " trial " << t;
      EXPECT_EQ(got.Transcript(), want.Transcript()) << n << " trial " << t;
    }
  }
}

TEST(RecipeRun, ReusesArtifactsIndependentOfNewWords) {
  Resources r = ToyResources();
  Recipe rec = BuiltinRecipe("online-la");
  Cascade first = RecipeRunner(rec, r).Run();
  EXPECT_EQ(first.steps_reused, 0u);
  EXPECT_TRUE(first.dependent.count("T"));
  EXPECT_TRUE(first.dependent.count("Gx"));
  EXPECT_FALSE(first.dependent.count("HCL"));

  Resources more = r;
  more.new_words = ToNewWords(GenerateToyNewWords(r.lexicon, 5, 99), 10.0);
  Cascade second = RecipeRunner(rec, more).Run(&first.artifacts);
  EXPECT_EQ(second.steps_run, 2u);  // T and Gx
  EXPECT_EQ(second.steps_reused + second.steps_run, first.steps_run);
  Cascade fresh = RecipeRunner(rec, more).Run();
  EXPECT_EQ(ToText(MaterializeCascade(second)), ToText(MaterializeCascade(fresh)));
}

TEST(RecipeRun, SaveLoadRoundTrip) {
  Resources r = ToyResources(8, 2);
  auto dir = std::filesystem::temp_directory_path() / "dynvoc_recipe_test";
  std::filesystem::remove_all(dir);
  for (const char *n : {"static", "online-la-push", "split-kn"}) {
    Cascade c = RecipeRunner(BuiltinRecipe(n), r).Run();
    SaveCascade(c, r, (dir / n).string());
    Cascade back = LoadCascade((dir / n).string());
    EXPECT_EQ(back.lazy, c.lazy) << n;
    EXPECT_EQ(back.artifacts.size(), c.artifacts.size()) << n;
    EXPECT_EQ(back.dependent, c.dependent) << n;
    EXPECT_EQ(back.compose.filters.Name(), c.compose.filters.Name()) << n;
    EXPECT_EQ(ToText(MaterializeCascade(back)), ToText(MaterializeCascade(c))) << n;
    Resources rr = LoadCascadeResources((dir / n).string());
    EXPECT_EQ(rr.new_words.entries.size(), r.new_words.entries.size());
    EXPECT_EQ(rr.lexicon.entries.size(), r.lexicon.entries.size());
  }
  std::filesystem::remove_all(dir);
}

TEST(RecipeRun, DecodeChecksUnitCount) {
  Resources r = ToyResources(6, 1);
  Cascade c = RecipeRunner(BuiltinRecipe("online"), r).Run();
  FrameScores bad(4, c.NumUnits() + 1, 1.0);
  EXPECT_THROW(DecodeCascade(c, bad), Error);
}

TEST(RecipeRun, Hash0AndPathStyleSettings) {
  Resources r = ToyResources(8, 2);
  std::string base = BuiltinRecipeText("online-la");
  Cascade plain = RecipeRunner(ParseRecipeText(base), r).Run();
  Cascade h0 = RecipeRunner(ParseRecipeText("set hash0 = on\n" + base), r).Run();
  Cascade pd = RecipeRunner(ParseRecipeText("set phone_words = path\n" + base), r).Run();
  std::mt19937 rng(3);
  for (int t = 0; t < 5; ++t) {
    std::vector<std::string> sent{r.lexicon.entries[rng() % 8].word, r.new_words.entries[t % 2].word};
    FrameScores fs = SentenceScores(r, plain, sent, t, false);
    DecodeResult a = DecodeCascade(plain, fs), b = DecodeCascade(h0, fs);
    EXPECT_NEAR(a.weight.Value(), b.weight.Value(), 1e-6);
    EXPECT_EQ(a.Transcript(), b.Transcript());
    EXPECT_FALSE(DecodeCascade(pd, fs).words.empty());
  }
}

TEST(Equivalence, DetectsWeightAndPathDifferences) {
  Resources r = ToyResources(6, 1);
  Wfst a = MaterializeCascade(RecipeRunner(BuiltinRecipe("static"), r).Run());
  Wfst b = MaterializeCascade(RecipeRunner(BuiltinRecipe("online-la-push"), r).Run());
  EquivalenceOptions eo;
  eo.max_in = 12;
  EquivalenceReport same = CheckEquivalence(a, b, eo);
  EXPECT_TRUE(same.equivalent) << same.first_difference;
  EXPECT_GT(same.paths, 0u);

  Resources heavier = r;
  for (auto &w : heavier.new_words.entries) w.weight = Weight(11);
  Wfst c = MaterializeCascade(RecipeRunner(BuiltinRecipe("static"), heavier).Run());
  eo.max_in = 30;
  eo.max_out = 1;
  EquivalenceReport diff = CheckEquivalence(a, c, eo);
  EXPECT_FALSE(diff.equivalent);
  EXPECT_NEAR(diff.max_weight_delta, 1.0, 1e-9);

  Resources fewer = r;
  fewer.new_words.entries.clear();
  Wfst d = MaterializeCascade(RecipeRunner(BuiltinRecipe("static"), fewer).Run());
  EXPECT_NE(CheckEquivalence(a, d, eo).first_difference.find("only in"), std::string::npos);
}

TEST(Corpus, TranscriptsRoundTripAndScoresDecode) {
  Resources r = ToyResources(10, 2);
  ToyCorpusOptions co;
  co.num_utterances = 8;
  co.new_word_fraction = 1.0;
  std::vector<Utterance> utts = GenerateToyCorpus(r, co);
  ASSERT_EQ(utts.size(), 8u);
  std::set<std::string> used;
  for (const auto &u : utts)
    for (const auto &w : u.words) used.insert(w);
  for (const auto &w : r.new_words.entries) EXPECT_TRUE(used.count(w.word)) << w.word;
  std::stringstream ss;
  WriteTranscripts(utts, ss);
  std::vector<Utterance> back = ReadTranscripts(ss);
  ASSERT_EQ(back.size(), utts.size());
  EXPECT_EQ(back[3].words, utts[3].words);
  EXPECT_EQ(back[3].trailing_sil, utts[3].trailing_sil);

  std::istringstream bad("utt1 2 5 a\n");
  EXPECT_THROW(ReadTranscripts(bad), ParseError);
  EXPECT_THROW(SentencePhones(r, {"nosuchword"}, false), Error);
  std::vector<std::string> p = SentencePhones(r, {utts[0].words[0], utts[0].words[0]}, true);
  EXPECT_EQ(std::count(p.begin(), p.end(), r.lexicon.silence), 2);
}

}  // namespace
}  // namespace dynvoc
