// tests/graph_build_test.cc

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

#include <cmath>
#include <numbers>
#include <sstream>

#include "dynvoc/arpa.h"
#include "dynvoc/compose.h"
#include "dynvoc/determinize.h"
#include "dynvoc/graph_build.h"
#include "dynvoc/lexicon.h"
#include "dynvoc/minimize.h"
#include "dynvoc/paths.h"
#include "dynvoc/toy.h"
#include "test_util.h"

namespace dynvoc {
namespace {

using testing::Labels;
using testing::LinearAcceptor;
using testing::Transduce;

Lexicon MakeLexicon(const std::string &text, bool posdep = false) {
  std::istringstream ss(text);
  Lexicon lex = ReadLexicon(ss);
  lex.position_dependent = posdep;
  return lex;
}

struct LexiconGraphs {
  SymbolTablePtr phones, words;
  Wfst l;
};

LexiconGraphs MakeL(const Lexicon &lex, const LexiconOptions &o) {
  LexiconGraphs g;
  g.phones = MakePhoneTableFor(lex, o);
  g.words = MakeWordTable(lex);
  g.l = BuildL(lex, o, g.phones, g.words);
  return g;
}

bool Produces(const LexiconGraphs &g, const std::string &in, const std::string &out) {
  PathSet ps = Transduce(g.l, Labels(*g.phones, in));
  return !ps.Find({}, Labels(*g.words, out)).IsZero();
}

TEST(LexiconTest, ReadsAndValidates) {
  Lexicon lex = MakeLexicon("ab a b\n; comment\n\ncd c d\n");
  ASSERT_EQ(lex.entries.size(), 2u);
  EXPECT_EQ(lex.Phones(), (std::vector<std::string>{"a", "b", "c", "d", "sil"}));
  EXPECT_NO_THROW(lex.Validate());
  EXPECT_THROW(MakeLexicon("ab\n"), ParseError);
  EXPECT_THROW(MakeLexicon("#x a\n").Validate(), Error);
  EXPECT_THROW(MakeLexicon("ab a sil\n").Validate(), Error);
  EXPECT_THROW(Lexicon{}.Validate(), Error);
  std::istringstream w("ab 0.5 a b\n");
  EXPECT_EQ(ReadLexicon(w, true).entries[0].weight, Weight(0.5));
  EXPECT_THROW(MakeLexicon("ab a_B b_I\n", true).Validate(), Error);
  EXPECT_NO_THROW(MakeLexicon("ab a_B b_E\nc c_S\n", true).Validate());
}

TEST(LexiconTest, DisambiguationAssignment) {
  Lexicon lex = MakeLexicon("ab a b\nab2 a b\na a\nabc a b c\nd d\n");
  DisambigInfo d = AssignDisambig(lex, PhonemeWordStyle::kNone);
  EXPECT_EQ(d.entry_symbol, (std::vector<int>{1, 2, 1, 0, 0}));
  EXPECT_EQ(d.num_real, 2);
  EXPECT_EQ(d.phone_word_symbol, 0);
  DisambigInfo s = AssignDisambig(lex, PhonemeWordStyle::kSelfLoop);
  EXPECT_EQ(s.entry_symbol, (std::vector<int>{1, 2, 1, 0, 1}));
  EXPECT_EQ(s.phone_word_symbol, 3);
}

TEST(LexiconTest, SymbolTables) {
  Lexicon lex = MakeLexicon("cd c d\nab a b\n");
  auto words = MakeWordTable(lex);
  EXPECT_EQ(words->Symbol(1), "ab");
  EXPECT_EQ(words->Symbol(2), "cd");
  EXPECT_EQ(words->Symbol(3), "$unknown");
  EXPECT_EQ(words->Symbol(4), "#phn:a");
  EXPECT_EQ(words->Symbol(static_cast<Label>(words->Size() - 1)), "#0");
  auto phones = MakePhoneTable(lex, 2);
  EXPECT_EQ(phones->Symbol(static_cast<Label>(phones->Size() - 1)), "#2");
  EXPECT_TRUE(IsRealWord("ab"));
  EXPECT_FALSE(IsRealWord("#phn:a"));
  EXPECT_FALSE(IsRealWord("$unknown"));
}

TEST(BuildLTest, SilenceOnlyBetweenWords) {
  auto g = MakeL(MakeLexicon("ab a b\ncd c d\n"), {});
  EXPECT_TRUE(Produces(g, "a b", "ab"));
  EXPECT_FALSE(Produces(g, "a sil b", "ab"));
  EXPECT_TRUE(Transduce(g.l, Labels(*g.phones, "a sil b")).Empty());
  EXPECT_TRUE(Produces(g, "a b sil c d", "ab cd"));
  EXPECT_TRUE(Produces(g, "a b c d", "ab cd"));
  EXPECT_TRUE(Produces(g, "a b sil", "ab"));
  EXPECT_TRUE(Transduce(g.l, Labels(*g.phones, "sil a b")).Empty());
}

TEST(BuildLTest, NoDoubleSilence) {
  auto g = MakeL(MakeLexicon("ab a b\nc c\n"), {});
  Label sil = g.phones->Get("sil");
  PathSet ps = EnumeratePathsBounded(g.l, 7, 4);
  ASSERT_GT(ps.Size(), 10u);
  for (const Path &p : ps.Paths()) {
    size_t sils = std::count(p.in.begin(), p.in.end(), sil);
    EXPECT_LE(sils, p.out.size());
    for (size_t k = 1; k < p.in.size(); ++k) EXPECT_FALSE(p.in[k] == sil && p.in[k - 1] == sil);
  }
}

TEST(BuildLTest, RejectsUnknownPhone) {
  Lexicon lex = MakeLexicon("ab a b\n");
  auto phones = MakePhoneTable(MakeLexicon("a a\n"), 0);
  EXPECT_THROW(BuildL(lex, {}, phones, MakeWordTable(lex)), Error);
}

TEST(BuildLTest, DisambiguatedLexiconDeterminizes) {
  Lexicon lex = MakeLexicon("ab a b\nab2 a b\na a\nabc a b c\nd d\n");
  LexiconOptions o;
  o.disambig = true;
  o.hash0 = true;
  o.hash0_input = true;
  o.phone_words = {PhonemeWordStyle::kSelfLoop, true};
  auto g = MakeL(lex, o);
  Wfst det = Determinize(g.l);
  EXPECT_TRUE(det.Has(kIDeterministic));
  Wfst plain = RemoveDisambig(det);
  for (StateId s = 0; s < static_cast<StateId>(plain.NumStates()); ++s)
    for (const Arc &a : plain.Arcs(s))
      if (a.ilabel != kEpsilon) EXPECT_FALSE(IsDisambigSymbol(g.phones->Symbol(a.ilabel)));
  // Without disambiguation the homophones make L non-functional.
  o.disambig = false;
  EXPECT_THROW(Determinize(MakeL(lex, o).l), Error);
}

TEST(PhonemeWordTest, SelfLoopAdmitsNoPause) {
  Lexicon lex = MakeLexicon("pq p q\n");
  LexiconOptions o;
  o.phone_words = {PhonemeWordStyle::kSelfLoop, false};
  auto g = MakeL(lex, o);
  EXPECT_TRUE(Produces(g, "p q", "#phn:p #phn:q"));
  EXPECT_FALSE(Produces(g, "p sil q", "#phn:p #phn:q"));
}

TEST(PhonemeWordTest, PathStyleAdmitsPause) {
  Lexicon lex = MakeLexicon("pq p q\n");
  LexiconOptions o;
  o.phone_words = {PhonemeWordStyle::kPath, false};
  auto g = MakeL(lex, o);
  EXPECT_TRUE(Produces(g, "p q", "#phn:p #phn:q"));
  EXPECT_TRUE(Produces(g, "p sil q", "#phn:p #phn:q"));
}

TEST(PhonemeWordTest, PositionDependentUsesInnerState) {
  Lexicon lex = MakeLexicon("aaa a_B a_I a_E\nx a_S\n", true);
  LexiconOptions o;
  o.phone_words = {PhonemeWordStyle::kPositionDependent, false};
  auto g = MakeL(lex, o);
  EXPECT_TRUE(Produces(g, "a_B a_I a_E", "#phn:a_B #phn:a_I #phn:a_E"));
  EXPECT_TRUE(Produces(g, "a_B a_I a_E", "aaa"));
  EXPECT_FALSE(Produces(g, "a_B sil a_E", "#phn:a_B #phn:a_E"));
  EXPECT_TRUE(Produces(g, "a_B a_E sil a_S", "#phn:a_B #phn:a_E #phn:a_S"));
  // The phoneme-word path is hub1 -> N -> N -> hub2.
  StateId n = static_cast<StateId>(g.l.NumStates() - 1);
  Label b = g.phones->Get("a_B"), i = g.phones->Get("a_I"), e = g.phones->Get("a_E");
  auto has = [&](StateId s, Label l, StateId d) {
    for (const Arc &a : g.l.Arcs(s))
      if (a.ilabel == l && a.nextstate == d && IsPhoneWordSymbol(g.words->Symbol(a.olabel)))
        return true;
    return false;
  };
  EXPECT_TRUE(has(kLexiconHub1, b, n));
  EXPECT_TRUE(has(n, i, n));
  EXPECT_TRUE(has(n, e, kLexiconHub2));
  o.phone_words.style = PhonemeWordStyle::kPositionDependent;
  EXPECT_THROW(MakeL(MakeLexicon("ab a b\n"), o), Error);
}

TEST(BuildGTest, UnigramOnly) {
  NGramModel lm;
  lm.AddNGram({"a"}, -1.0);
  Lexicon lex = MakeLexicon("a a\n");
  Wfst g = BuildG(lm, {}, MakeWordTable(lex));
  ASSERT_EQ(g.NumStates(), 1u);
  ASSERT_EQ(g.NumArcs(0), 1u);
  EXPECT_NEAR(g.Arcs(0)[0].weight.Value(), std::numbers::ln10, 1e-12);
  EXPECT_NEAR(g.Arcs(0)[0].weight.Value(), 2.302585, 1e-6);
}

TEST(BuildGTest, Hash0RelabelsBackoffArcs) {
  Lexicon lex = MakeLexicon("a a\nb b\nc c\n");
  auto words = MakeWordTable(lex);
  NGramModel lm = GenerateToyLm({"a", "b", "c"}, {});
  Wfst plain = BuildG(lm, {false}, words), h0 = BuildG(lm, {true}, words);
  Label hash0 = words->Get("#0");
  size_t backoffs = 0;
  for (StateId s = 0; s < static_cast<StateId>(h0.NumStates()); ++s) {
    auto pa = plain.Arcs(s), ha = h0.Arcs(s);
    ASSERT_EQ(pa.size(), ha.size());
    for (size_t k = 0; k < pa.size(); ++k) {
      if (pa[k].ilabel == kEpsilon) {
        ++backoffs;
        EXPECT_EQ(ha[k].ilabel, hash0);
        EXPECT_EQ(ha[k].olabel, kEpsilon);
      } else {
        EXPECT_EQ(ha[k].ilabel, pa[k].ilabel);
      }
    }
  }
  EXPECT_GT(backoffs, 0u);
}

// Best path weight of a word sequence through G.
double GraphCost(const Wfst &g, const LabelSeq &words) {
  return ShortestPath(Compose(LinearAcceptor(words, g.InputSymbols()), g)).weight.Value();
}

void ExpectArpaFidelity(int order, unsigned seed) {
  std::vector<std::string> vocab{"a", "b", "c"};
  ToyLmOptions o;
  o.order = order;
  o.seed = seed;
  o.history_fraction = 0.8;
  NGramModel lm = GenerateToyLm(vocab, o);
  // Round-trip through text first, as a user would.
  std::stringstream ss;
  WriteArpa(lm, ss);
  lm = ReadArpa(ss);
  Lexicon lex = MakeLexicon("a a\nb b\nc c\n");
  auto words = MakeWordTable(lex);
  Wfst g = ArcSort(BuildG(lm, {}, words), SortSide::kInput);
  std::vector<std::string> sentence;
  int checked = 0;
  std::function<void()> rec = [&]() {
    if (!sentence.empty()) {
      LabelSeq ls;
      for (const auto &w : sentence) ls.push_back(words->Get(w));
      EXPECT_NEAR(GraphCost(g, ls), lm.SentenceCost(sentence), 1e-9)
          << "seed " << seed << ": " << NGramModel::Join(sentence);
      ++checked;
    }
    if (sentence.size() == 4) return;
    for (const auto &w : vocab) {
      sentence.push_back(w);
      rec();
      sentence.pop_back();
    }
  };
  rec();
  EXPECT_EQ(checked, 3 + 9 + 27 + 81);
}

TEST(BuildGTest, BigramMatchesBackoffComputation) {
  for (unsigned seed = 1; seed <= 20; ++seed) ExpectArpaFidelity(2, seed);
}

TEST(BuildGTest, TrigramMatchesBackoffComputation) {
  for (unsigned seed = 1; seed <= 20; ++seed) ExpectArpaFidelity(3, seed);
}

TEST(ArpaTest, ParsesStandardFile) {
  std::istringstream ss(
      "\\data\\\nngram 1=4\nngram 2=2\n\n\\1-grams:\n-0.5 </s>\n-99 <s> -0.3\n"
      "-0.6 a -0.2\n-0.9 b\n\n\\2-grams:\n-0.1 <s> a\n-0.2 a b\n\n\\end\\\n");
  NGramModel lm = ReadArpa(ss);
  EXPECT_EQ(lm.Order(), 2);
  EXPECT_DOUBLE_EQ(lm.Log10Prob("b", {"a"}), -0.2);
  EXPECT_DOUBLE_EQ(lm.Log10Prob("a", {"b"}), -0.6);
  EXPECT_DOUBLE_EQ(lm.Log10Prob("b", {"<s>"}), -0.3 - 0.9);
  EXPECT_EQ(lm.Vocabulary(), (std::vector<std::string>{"a", "b"}));
}

TEST(ArpaTest, RejectsMalformed) {
  std::istringstream counts("\\data\\\nngram 1=3\n\\1-grams:\n-0.5 a\n\\end\\\n");
  EXPECT_THROW(ReadArpa(counts), ParseError);
  std::istringstream context("\\data\\\nngram 1=1\nngram 2=1\n\\1-grams:\n-0.5 a\n"
                             "\\2-grams:\n-0.1 b a\n\\end\\\n");
  EXPECT_THROW(ReadArpa(context), Error);
  std::istringstream number("\\data\\\nngram 1=1\n\\1-grams:\n-x a\n\\end\\\n");
  try {
    ReadArpa(number);
    FAIL();
  } catch (const ParseError &e) {
    EXPECT_EQ(e.line(), 4);
  }
  std::istringstream positive("\\data\\\nngram 1=1\n\\1-grams:\n0.5 a\n\\end\\\n");
  EXPECT_THROW(ReadArpa(positive), Error);
}

TEST(BuildCTest, MonoIsIdentity) {
  Lexicon lex = MakeLexicon("ab a b\n");
  auto phones = MakePhoneTable(lex, 1);
  Wfst c = BuildC(phones, ContextType::kMono);
  for (const Path &p : EnumeratePaths(c, 2).Paths()) EXPECT_EQ(p.in, p.out);
  EXPECT_EQ(EnumeratePaths(c, 1).Size(), phones->Size());
}

TEST(BuildCTest, BiphoneMapsUnitsToPhones) {
  Lexicon lex = MakeLexicon("ab a b\n");
  auto phones = MakePhoneTable(lex, 0);
  Wfst c = BuildC(phones, ContextType::kLeftBiphone);
  const SymbolTable &units = *c.InputSymbols();
  PathSet out = Transduce(c, Labels(units, "-/a a/b"));
  ASSERT_EQ(out.Size(), 1u);
  EXPECT_EQ(out.Paths()[0].out, Labels(*phones, "a b"));
  EXPECT_TRUE(Transduce(c, Labels(units, "-/a b/b")).Empty());
}

TEST(BuildCTest, BiphoneSeesCrossWordContext) {
  Lexicon lex = MakeLexicon("x a\ny b\n");
  auto phones = MakePhoneTable(lex, 0);
  auto words = MakeWordTable(lex);
  Wfst l = BuildL(lex, {}, phones, words);
  Wfst c = BuildC(phones, ContextType::kLeftBiphone);
  Wfst cl = Compose(c, ArcSort(l, SortSide::kInput));
  const SymbolTable &units = *c.InputSymbols();
  PathSet ps = EnumeratePathsBounded(cl, 3, 2);
  LabelSeq xy = Labels(*words, "x y");
  EXPECT_FALSE(ps.Find(Labels(units, "-/a a/b"), xy).IsZero());
  EXPECT_TRUE(ps.Find(Labels(units, "-/a -/b"), xy).IsZero());
  EXPECT_FALSE(ps.Find(Labels(units, "-/a a/sil sil/b"), xy).IsZero());
}

TEST(BuildHTest, OneStateIsRelabeling) {
  Lexicon lex = MakeLexicon("ab a b\n");
  auto phones = MakePhoneTable(lex, 0);
  Wfst h = BuildH(phones, {1});
  EXPECT_EQ(h.NumStates(), 1u);
  for (const Arc &a : h.Arcs(0)) EXPECT_NE(a.olabel, kEpsilon);
  EXPECT_EQ(NumEmittingUnits(*h.InputSymbols()), 3u);
}

TEST(BuildHTest, ThreeStateChains) {
  Lexicon lex = MakeLexicon("ab a b\n");
  auto phones = MakePhoneTable(lex, 1);
  Wfst h = BuildH(phones, {3});
  const SymbolTable &emit = *h.InputSymbols();
  EXPECT_EQ(NumEmittingUnits(emit), 9u);
  EXPECT_EQ(emit.Get("b.0"), 4);  // (c-1)*k + q + 1 with c=2 (b), q=0
  PathSet out = Transduce(h, Labels(emit, "b.0 b.1 b.2"));
  ASSERT_EQ(out.Size(), 1u);
  EXPECT_EQ(out.Paths()[0].out, Labels(*phones, "b"));
  EXPECT_TRUE(Transduce(h, Labels(emit, "b.0 b.1")).Empty());
  EXPECT_FALSE(Transduce(h, Labels(emit, "#0")).Empty());
}

TEST(BuildHTest, HclSpellsWord) {
  Lexicon lex = MakeLexicon("ab a b\n");
  auto phones = MakePhoneTable(lex, 0);
  auto words = MakeWordTable(lex);
  Wfst l = ArcSort(BuildL(lex, {}, phones, words), SortSide::kInput);
  Wfst c = ArcSort(BuildC(phones, ContextType::kMono), SortSide::kInput);
  Wfst h = BuildH(phones, {3});
  Wfst hcl = Compose(h, Compose(c, l));
  const SymbolTable &emit = *h.InputSymbols();
  PathSet ps = EnumeratePathsBounded(hcl, 6, 1);
  std::set<LabelSeq> inputs;
  for (const Path &p : ps.Paths())
    if (p.out == Labels(*words, "ab")) inputs.insert(p.in);
  EXPECT_EQ(inputs, (std::set<LabelSeq>{Labels(emit, "a.0 a.1 a.2 b.0 b.1 b.2")}));
}

TEST(BuildHTest, ToyCascadeDeterminizes) {
  Lexicon lex = GenerateToyLexicon({});
  LexiconOptions o;
  o.disambig = true;
  o.hash0 = true;
  o.hash0_input = true;
  o.phone_words = {PhonemeWordStyle::kSelfLoop, true};
  auto phones = MakePhoneTableFor(lex, o);
  auto words = MakeWordTable(lex);
  Wfst l = ArcSort(BuildL(lex, o, phones, words), SortSide::kInput);
  for (ContextType ctx : {ContextType::kMono, ContextType::kLeftBiphone}) {
    Wfst c = BuildC(phones, ctx);
    Wfst h = BuildH(c.InputSymbols(), {1});
    Wfst hcl = Compose(h, Compose(ArcSort(c, SortSide::kInput), l));
    Wfst det = Minimize(Determinize(hcl));
    EXPECT_TRUE(det.Has(kIDeterministic));
    EXPECT_LE(det.NumStates(), hcl.NumStates());
  }
}

TEST(ToyTest, LexiconIsWellFormed) {
  Lexicon lex = GenerateToyLexicon({});
  EXPECT_EQ(lex.entries.size(), 50u);
  EXPECT_EQ(lex.Phones().size(), 20u);
  EXPECT_NO_THROW(lex.Validate());
  std::set<std::vector<std::string>> prons;
  for (const auto &e : lex.entries) EXPECT_TRUE(prons.insert(e.phones).second) << e.word;
  Lexicon extra = GenerateToyNewWords(lex, 5, 3);
  EXPECT_EQ(extra.entries.size(), 5u);
  for (const auto &e : extra.entries) {
    EXPECT_FALSE(prons.count(e.phones)) << e.word;
    EXPECT_FALSE(lex.HasWord(e.word));
  }
}

}  // namespace
}  // namespace dynvoc
