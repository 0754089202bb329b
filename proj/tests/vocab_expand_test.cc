// tests/vocab_expand_test.cc

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
#include <functional>
#include <random>
#include <sstream>
#include <tuple>

#include "dynvoc/graph_build.h"
#include "dynvoc/lazy_compose.h"
#include "dynvoc/toy.h"
#include "dynvoc/vocab_expand.h"
#include "test_util.h"

namespace dynvoc {
namespace {

using testing::Labels;
using testing::LinearAcceptor;
using testing::Transduce;

Lexicon MakeLexicon(const std::string &text) {
  std::istringstream ss(text);
  return ReadLexicon(ss);
}

NewWordList MakeNewWords(const std::string &text) {
  std::istringstream ss(text);
  return ReadNewWords(ss);
}

// Base toy setup: two words, a bigram LM with $unknown, L with phone words.
struct ToySetup {
  Lexicon lex = MakeLexicon("ab a b\ncd c d\n");
  SymbolTablePtr phones, words, ext;
  NGramModel lm;
  Wfst l, g, body;

  explicit ToySetup(PhonemeWordStyle style = PhonemeWordStyle::kSelfLoop, bool hash0 = false,
                 int order = 2, unsigned seed = 3, const std::string &new_words = "zork d a\n") {
    LexiconOptions lo;
    lo.hash0 = hash0;
    lo.phone_words = {style, true};
    phones = MakePhoneTableFor(lex, lo);
    words = MakeWordTable(lex);
    l = ArcSort(BuildL(lex, lo, phones, words), SortSide::kOutput);
    ToyLmOptions to;
    to.order = order;
    to.seed = seed;
    to.history_fraction = 1.0;
    lm = GenerateToyLm({"ab", "cd"}, to);
    g = ArcSort(BuildG(lm, {hash0}, words), SortSide::kInput);
    NewWordList list = MakeNewWords(new_words);
    ext = ExtendWordTable(words, list);
    body = BuildTLprime(list, ext);
  }

  Wfst Expanded(bool hash0_aware) const {
    return ArcSort(ReplaceUnknown(g, body, hash0_aware).fst, SortSide::kInput);
  }
};

// Min weight over paths of `f` writing exactly `out`.
Weight OutputWeight(const Wfst &f, const LabelSeq &out) {
  Wfst fo = f.Has(kOLabelSorted) ? f : ArcSort(f, SortSide::kOutput);
  Wfst c = Compose(fo, LinearAcceptor(out, f.OutputSymbols()));
  try {
    return ShortestPath(c).weight;
  } catch (const Error &) {
    return Weight::Zero();
  }
}

void ForEachSentence(const std::vector<Label> &vocab, size_t max_len,
                     const std::function<void(const LabelSeq &)> &fn) {
  LabelSeq s;
  std::function<void()> rec = [&]() {
    if (!s.empty()) fn(s);
    if (s.size() == max_len) return;
    for (Label w : vocab) {
      s.push_back(w);
      rec();
      s.pop_back();
    }
  };
  rec();
}

TEST(NewWordsTest, ReadsAndValidates) {
  NewWordList list = MakeNewWords("zork d a\n; skipped\nquux b\n");
  ASSERT_EQ(list.entries.size(), 2u);
  EXPECT_EQ(list.entries[0].weight, Weight(10.0));
  EXPECT_EQ(list.entries[1].phones, (std::vector<std::string>{"b"}));
  EXPECT_THROW(MakeNewWords("zork\n"), ParseError);
  auto words = MakeWordTable(MakeLexicon("ab a b\n"));
  EXPECT_NO_THROW(ValidateNewWords(list.entries.size() ? MakeNewWords("zork b a\n") : list, *words));
  EXPECT_THROW(ValidateNewWords(MakeNewWords("ab a\n"), *words), Error);
  EXPECT_THROW(ValidateNewWords(MakeNewWords("zork a\nzork b\n"), *words), Error);
  EXPECT_THROW(ValidateNewWords(MakeNewWords("zork q\n"), *words), Error);
  EXPECT_THROW(ValidateNewWords(MakeNewWords("#zork a\n"), *words), Error);
}

TEST(NewWordsTest, ExtendedTableKeepsBaseLabels) {
  auto words = MakeWordTable(MakeLexicon("ab a b\n"));
  auto ext = ExtendWordTable(words, MakeNewWords("zork b a\n"));
  EXPECT_TRUE(ext->CompatibleWith(*words));
  EXPECT_EQ(ext->Size(), words->Size() + 1);
  EXPECT_EQ(ext->Get("zork"), static_cast<Label>(words->Size()));
  EXPECT_EQ(words->Find("zork"), kNoLabel);
}

TEST(TLprimeTest, OptionalTrailingSilence) {
  auto words = MakeWordTable(MakeLexicon("x p1 p2\n"));
  auto ext = ExtendWordTable(words, MakeNewWords("zork p1 p2\n"));
  Wfst t = BuildTLprime(MakeNewWords("zork p1 p2\n"), ext);
  LabelSeq zork = Labels(*ext, "zork");
  EXPECT_EQ(Transduce(t, Labels(*ext, "#phn:p1 #phn:p2")).Find({}, zork), Weight(10.0));
  EXPECT_EQ(Transduce(t, Labels(*ext, "#phn:p1 #phn:p2 #phn:sil")).Find({}, zork), Weight(10.0));
  EXPECT_TRUE(Transduce(t, Labels(*ext, "#phn:sil #phn:p1 #phn:p2")).Empty());
  EXPECT_TRUE(Transduce(t, Labels(*ext, "#phn:p1 #phn:sil #phn:p2")).Empty());
  // The first arc carries the word and its weight.
  ASSERT_EQ(t.NumArcs(t.Start()), 1u);
  EXPECT_EQ(t.Arcs(t.Start())[0].olabel, zork[0]);
  EXPECT_EQ(t.Arcs(t.Start())[0].weight, Weight(10.0));

  Wfst strict = BuildTLprime(MakeNewWords("zork p1 p2\n"), ext, {"sil", false});
  EXPECT_TRUE(Transduce(strict, Labels(*ext, "#phn:p1 #phn:p2")).Empty());
  EXPECT_FALSE(Transduce(strict, Labels(*ext, "#phn:p1 #phn:p2 #phn:sil")).Empty());
}

TEST(TLprimeTest, EmptyListAndErrors) {
  auto words = MakeWordTable(MakeLexicon("x p1\n"));
  Wfst t = BuildTLprime({}, words);
  EXPECT_TRUE(EnumeratePaths(t, 4).Empty());
  EXPECT_THROW(BuildTLprime(MakeNewWords("x p1\nx p1\n"), words), Error);
  NewWordList empty_pron;
  empty_pron.entries.push_back({"y", {}, Weight(10.0)});
  EXPECT_THROW(BuildTLprime(empty_pron, words), Error);
}

TEST(ReplaceUnknownTest, AcceptsBaseAndNewWords) {
  auto words = MakeWordTable(MakeLexicon("foo f\n"));
  NGramModel lm;
  lm.AddNGram({"foo"}, -0.5);
  lm.AddNGram({"$unknown"}, -1.0);
  lm.AddNGram({"</s>"}, 0.0);
  Wfst g = ArcSort(BuildG(lm, {}, words), SortSide::kInput);
  auto list = MakeNewWords("zork f f\n");
  auto ext = ExtendWordTable(words, list);
  ReplaceResult r = ReplaceUnknown(g, BuildTLprime(list, ext), false);
  EXPECT_TRUE(r.replaced);
  PathSet ps = EnumeratePathsBounded(r.fst, 3, 2);
  double foo = Log10ToCost(-0.5), unk = Log10ToCost(-1.0);
  EXPECT_NEAR(ps.Find(Labels(*ext, "foo"), Labels(*ext, "foo")).Value(), foo, 1e-12);
  EXPECT_NEAR(ps.Find(Labels(*ext, "#phn:f #phn:f"), Labels(*ext, "zork")).Value(), unk + 10,
              1e-12);
  EXPECT_NEAR(ps.Find(Labels(*ext, "#phn:f #phn:f #phn:sil"), Labels(*ext, "zork")).Value(),
              unk + 10, 1e-12);
  EXPECT_NEAR(ps.Find(Labels(*ext, "foo #phn:f #phn:f"), Labels(*ext, "foo zork")).Value(),
              foo + unk + 10, 1e-12);
  for (const Path &p : ps.Paths())
    EXPECT_EQ(std::count(p.out.begin(), p.out.end(), ext->Get("$unknown")), 0);
}

TEST(ReplaceUnknownTest, MissingUnknownIsFlagged) {
  auto words = MakeWordTable(MakeLexicon("foo f\n"));
  NGramModel lm;
  lm.AddNGram({"foo"}, -0.5);
  Wfst g = BuildG(lm, {}, words);
  ReplaceResult r = ReplaceUnknown(g, BuildTLprime({}, words), false);
  EXPECT_FALSE(r.replaced);
  EXPECT_TRUE(r.fst == g);
}

TEST(ReplaceUnknownTest, EmptyBodyRemovesUnknownPaths) {
  ToySetup s;
  Wfst r = ReplaceUnknown(s.g, BuildTLprime({}, s.words), false).fst;
  PathSet with = EnumeratePathsBounded(s.g, 3, 3), without = EnumeratePathsBounded(r, 3, 3);
  PathSet expected;
  Label unk = s.words->Get("$unknown");
  for (const Path &p : with.Paths())
    if (std::find(p.out.begin(), p.out.end(), unk) == p.out.end()) expected.Add(p.in, p.out, p.weight);
  auto d = ComparePathSets(without, expected, 1e-12);
  EXPECT_TRUE(d.equal) << d.first_difference;
}

// Cross-encoding oracle: #0 back-off and connectors with a #0-consuming L
// against plain <eps> everywhere.
TEST(ReplaceUnknownTest, Hash0PipelineMatchesPlain) {
  for (unsigned seed = 1; seed <= 6; ++seed) {
    ToySetup plain(PhonemeWordStyle::kSelfLoop, false, 2 + seed % 2, seed);
    ToySetup h0(PhonemeWordStyle::kSelfLoop, true, 2 + seed % 2, seed);
    PathSet a = EnumeratePathsBounded(Compose(plain.l, plain.Expanded(false)), 6, 3);
    PathSet b = EnumeratePathsBounded(Compose(h0.l, h0.Expanded(true)), 6, 3);
    ASSERT_GT(a.Size(), 20u);
    auto d = ComparePathSets(a, b, 1e-9);
    EXPECT_TRUE(d.equal) << "seed " << seed << ": " << d.first_difference;
  }
}

TEST(ReplaceUnknownTest, Hash0ConnectorsRead0) {
  ToySetup s(PhonemeWordStyle::kSelfLoop, true);
  Wfst r = ReplaceUnknown(s.g, s.body, true).fst;
  Label hash0 = s.ext->Get("#0");
  size_t eps_in = 0;
  for (StateId q = 0; q < static_cast<StateId>(r.NumStates()); ++q)
    for (const Arc &a : r.Arcs(q))
      if (a.ilabel == kEpsilon) ++eps_in;
      else if (a.ilabel == hash0) EXPECT_EQ(a.olabel, kEpsilon);
  EXPECT_EQ(eps_in, 0u);
}

TEST(IntraWordSilenceTest, SelfLoopForbidsPauseInsideNewWord) {
  ToySetup s(PhonemeWordStyle::kSelfLoop);
  Wfst lg = Compose(s.l, s.Expanded(false));
  LabelSeq zork = Labels(*s.ext, "zork");
  EXPECT_FALSE(Transduce(lg, Labels(*s.phones, "d a")).Find({}, zork).IsZero());
  EXPECT_FALSE(Transduce(lg, Labels(*s.phones, "d a sil")).Find({}, zork).IsZero());
  EXPECT_TRUE(Transduce(lg, Labels(*s.phones, "d sil a")).Find({}, zork).IsZero());
  EXPECT_FALSE(Transduce(lg, Labels(*s.phones, "a b sil d a")).Find({}, Labels(*s.ext, "ab zork")).IsZero());
}

TEST(IntraWordSilenceTest, PathStyleAdmitsPause) {
  ToySetup s(PhonemeWordStyle::kPath);
  Wfst lg = Compose(s.l, s.Expanded(false));
  LabelSeq zork = Labels(*s.ext, "zork");
  EXPECT_FALSE(Transduce(lg, Labels(*s.phones, "d sil a")).Find({}, zork).IsZero());
}

TEST(SplitK1Test, PreservesSentenceWeights) {
  for (int order : {2, 3})
    for (unsigned seed = 1; seed <= 4; ++seed) {
      ToySetup s(PhonemeWordStyle::kNone, false, order, seed);
      SplitK1Result r = SplitK1(s.l, s.lm);
      Wfst ref = Compose(s.l, s.g);
      Wfst split = Compose(ArcSort(r.hclg1, SortSide::kOutput), ArcSort(r.gn1, SortSide::kInput));
      std::vector<Label> vocab{s.words->Get("ab"), s.words->Get("cd")};
      int n = 0;
      ForEachSentence(vocab, 4, [&](const LabelSeq &sent) {
        Weight a = OutputWeight(ref, sent), b = OutputWeight(split, sent);
        ASSERT_FALSE(a.IsZero());
        EXPECT_NEAR(a.Value(), b.Value(), 1e-9);
        ++n;
      });
      EXPECT_EQ(n, 2 + 4 + 8 + 16);
    }
}

TEST(SplitK1Test, MovesUnigramOntoWordArcs) {
  ToySetup s(PhonemeWordStyle::kNone);
  SplitK1Result r = SplitK1(s.l, s.lm);
  Label ab = s.words->Get("ab");
  double u = Log10ToCost(s.lm.Find({"ab"})->logp);
  for (const Arc &a : r.hclg1.Arcs(kLexiconHub1))
    if (a.olabel == ab) EXPECT_NEAR(a.weight.Value(), u, 1e-12);
  for (StateId q = 0; q < static_cast<StateId>(r.gn1.NumStates()); ++q)
    for (const Arc &a : r.gn1.Arcs(q))
      if (a.ilabel == s.words->Get("$unknown"))
        EXPECT_NEAR(a.weight.Value(), Log10ToCost(s.lm.Find({"$unknown"})->logp), 1e-12);
}

TEST(SplitK1Test, UnigramModelRejectedUnlessAllowed) {
  ToySetup s(PhonemeWordStyle::kNone);
  NGramModel uni;
  uni.AddNGram({"ab"}, -0.3);
  uni.AddNGram({"cd"}, -0.4);
  EXPECT_THROW(SplitK1(s.l, uni), Error);
  SplitK1Result r = SplitK1(s.l, uni, {{}, true});
  for (StateId q = 0; q < static_cast<StateId>(r.gn1.NumStates()); ++q)
    for (const Arc &a : r.gn1.Arcs(q)) EXPECT_NEAR(a.weight.Value(), 0.0, 1e-12);
  NGramModel partial;
  partial.AddNGram({"ab"}, -0.3);
  partial.AddNGram({"<s>"}, -99, -0.1, true);
  partial.AddNGram({"<s>", "ab"}, -0.1);
  EXPECT_THROW(SplitK1(s.l, partial), Error);
}

TEST(AugmentLmTest, AddsPhoneWordUnigrams) {
  ToySetup s;
  NGramModel aug = AugmentLmWithPhoneWords(s.lm, *s.words);
  ASSERT_TRUE(aug.HasUnigram("#phn:a"));
  ASSERT_TRUE(aug.HasUnigram("#phn:sil"));
  EXPECT_EQ(aug.Find({"#phn:a"})->logp, 0.0);
  NGramModel w = AugmentLmWithPhoneWords(s.lm, *s.words, Weight(2.0));
  EXPECT_NEAR(Log10ToCost(w.Find({"#phn:d"})->logp), 2.0, 1e-12);
  EXPECT_THROW(AugmentLmWithPhoneWords(s.lm, *s.words, Weight(-1.0)), Error);
}

TEST(VocabAcceptorTest, ContiguousVocabularyIsOneRange) {
  auto words = MakeWordTable(MakeLexicon("a a\nb b\nc c\n"));
  Wfst g0 = BuildG0(words);
  VocabAcceptor v = VocabAcceptor::Compress(g0);
  ASSERT_EQ(v.NumRanges(), 1u);
  EXPECT_EQ(v.Ranges(0)[0], (CompactArcRange{1, 3, Weight::One(), 0}));
  EXPECT_EQ(v.NumArcs(0), 3u);
  EXPECT_TRUE(v.ExplicitArcs(0).empty());
  EXPECT_TRUE(v.IsFinal(0));
  EXPECT_TRUE(v.ToWfst() == g0);
}

std::vector<std::tuple<Label, Label, double, StateId>> SortedArcs(const Wfst &f, StateId s) {
  std::vector<std::tuple<Label, Label, double, StateId>> out;
  for (const Arc &a : f.Arcs(s)) out.emplace_back(a.ilabel, a.olabel, a.weight.Value(), a.nextstate);
  std::sort(out.begin(), out.end());
  return out;
}

TEST(VocabAcceptorTest, RandomRoundTrip) {
  std::mt19937 rng(5);
  for (int trial = 0; trial < 200; ++trial) {
    // Identity-heavy graphs so that runs form.
    Wfst f;
    int n = 1 + static_cast<int>(rng() % 4);
    f.AddStates(n);
    f.SetStart(0);
    for (int s = 0; s < n; ++s) {
      if (rng() % 2) f.SetFinal(s, Weight(static_cast<double>(rng() % 3)));
      for (Label l = 1; l <= 12; ++l) {
        int r = static_cast<int>(rng() % 6);
        if (r == 0) continue;
        Label o = r == 1 ? static_cast<Label>(rng() % 5) : l;
        Weight w(r == 2 ? 1.0 : 0.0);
        f.AddArc(s, l, o, w, r == 3 ? static_cast<StateId>(rng() % n) : 0);
      }
      if (rng() % 3 == 0) f.AddArc(s, kEpsilon, kEpsilon, Weight(0.5), static_cast<StateId>(rng() % n));
    }
    f.Freeze();
    VocabAcceptor v = VocabAcceptor::Compress(f);
    Wfst back = v.ToWfst();
    ASSERT_EQ(back.NumStates(), f.NumStates());
    EXPECT_TRUE(back.Has(kILabelSorted));
    for (StateId s = 0; s < n; ++s) {
      EXPECT_EQ(SortedArcs(back, s), SortedArcs(f, s));
      EXPECT_EQ(back.Final(s), f.Final(s));
      EXPECT_EQ(v.NumArcs(s), f.NumArcs(s));
      for (Label l = 0; l <= 13; ++l) {
        std::vector<Arc> a, b;
        v.ForEachInputMatch(s, l, [&](const Arc &x) { a.push_back(x); });
        back.ForEachInputMatch(s, l, [&](const Arc &x) { b.push_back(x); });
        std::sort(a.begin(), a.end(), [](const Arc &x, const Arc &y) {
          return std::tie(x.olabel, x.nextstate) < std::tie(y.olabel, y.nextstate);
        });
        std::sort(b.begin(), b.end(), [](const Arc &x, const Arc &y) {
          return std::tie(x.olabel, x.nextstate) < std::tie(y.olabel, y.nextstate);
        });
        EXPECT_EQ(a, b);
      }
    }
    std::stringstream ss;
    v.Write(ss);
    EXPECT_TRUE(VocabAcceptor::Read(ss) == v);
  }
}

TEST(VocabAcceptorTest, RejectsCorruptInput) {
  std::stringstream bad("DVWFST1\0\0\0\0");
  EXPECT_THROW(VocabAcceptor::Read(bad), Error);
  auto words = MakeWordTable(MakeLexicon("a a\nb b\n"));
  std::stringstream ss;
  VocabAcceptor::Compress(BuildG0(words)).Write(ss);
  std::string bytes = ss.str();
  std::stringstream cut(bytes.substr(0, bytes.size() - 4));
  EXPECT_THROW(VocabAcceptor::Read(cut), Error);
}

TEST(SplitKnTest, NoNewWordsMatchesStatic) {
  for (unsigned seed = 1; seed <= 4; ++seed) {
    ToySetup s(PhonemeWordStyle::kSelfLoop, false, 2 + seed % 2, seed);
    Wfst hclgn = ArcSort(BuildHCLGn(s.l, s.lm), SortSide::kOutput);
    VocabAcceptor g0 = VocabAcceptor::Compress(BuildG0(s.words));
    EXPECT_EQ(g0.NumRanges(), 1u);
    // Reference: L o G with $unknown removed (no new words).
    Wfst ref = Compose(s.l, ArcSort(ReplaceUnknown(s.g, BuildTLprime({}, s.words), false).fst,
                                    SortSide::kInput));
    Wfst offline = Compose(hclgn, g0.ToWfst());
    ComposeOptions co;
    LazyCompose<VocabAcceptor> lc(hclgn, g0, co);
    Wfst lazy = Materialize(lc, 100000);
    PathSet a = EnumeratePathsBounded(ref, 6, 3);
    auto d1 = ComparePathSets(a, EnumeratePathsBounded(offline, 6, 3), 1e-9);
    auto d2 = ComparePathSets(a, EnumeratePathsBounded(lazy, 6, 3), 1e-9);
    EXPECT_TRUE(d1.equal) << d1.first_difference;
    EXPECT_TRUE(d2.equal) << d2.first_difference;
  }
}

TEST(SplitKnTest, NewWordsMatchStatic) {
  for (unsigned seed = 1; seed <= 4; ++seed) {
    ToySetup s(PhonemeWordStyle::kSelfLoop, false, 2 + seed % 2, seed, "zork d a\nquux b b c\n");
    Wfst hclgn = ArcSort(BuildHCLGn(s.l, s.lm), SortSide::kOutput);
    Wfst g0 = BuildG0(s.ext, &s.body, UnknownEntryWeight(s.lm));
    Wfst ref = Compose(s.l, s.Expanded(false));
    Wfst split = Compose(hclgn, g0);
    auto d = ComparePathSets(EnumeratePathsBounded(ref, 7, 3), EnumeratePathsBounded(split, 7, 3),
                             1e-9);
    EXPECT_TRUE(d.equal) << "seed " << seed << ": " << d.first_difference;
    EXPECT_FALSE(Transduce(split, Labels(*s.phones, "b b c sil")).Find({}, Labels(*s.ext, "quux")).IsZero());
  }
}

TEST(SplitKnTest, NewWordPathWeight) {
  ToySetup s;
  Wfst g0 = BuildG0(s.ext, &s.body, UnknownEntryWeight(s.lm));
  Label zork = s.ext->Get("zork");
  // The entry arc carries the word weight plus the $unknown unigram.
  double u = Log10ToCost(s.lm.Find({"$unknown"})->logp);
  bool found = false;
  for (const Arc &a : g0.Arcs(0))
    if (a.olabel == zork) {
      found = true;
      EXPECT_NEAR(a.weight.Value(), 10.0 + u, 1e-12);
    }
  EXPECT_TRUE(found);
  // With phone-word unigram weight w, each of the two #phn symbols adds w.
  SplitKnOptions o;
  o.phone_word_weight = Weight(0.25);
  Wfst hclgn = ArcSort(BuildHCLGn(s.l, s.lm, o), SortSide::kOutput);
  Wfst split = Compose(hclgn, g0);
  Wfst base = Compose(ArcSort(BuildHCLGn(s.l, s.lm), SortSide::kOutput), g0);
  LabelSeq in = Labels(*s.phones, "d a");
  double with = Transduce(split, in).Find({}, {zork}).Value();
  double without = Transduce(base, in).Find({}, {zork}).Value();
  EXPECT_NEAR(with - without, 0.5, 1e-9);
}

TEST(SplitKnTest, RequiresPhoneWords) {
  ToySetup s(PhonemeWordStyle::kNone);
  EXPECT_THROW(BuildHCLGn(s.l, s.lm), Error);
}

}  // namespace
}  // namespace dynvoc
