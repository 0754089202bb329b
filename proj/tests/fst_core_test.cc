// tests/fst_core_test.cc

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

#include <random>
#include <sstream>

#include "dynvoc/io.h"
#include "dynvoc/wfst.h"
#include "test_util.h"

namespace dynvoc {
namespace {

TEST(WeightTest, PlusIsMin) {
  EXPECT_EQ(Plus(Weight(1.0), Weight(2.0)), Weight(1.0));
  EXPECT_EQ(Plus(Weight(3.5), Weight::Zero()), Weight(3.5));
  EXPECT_EQ(Plus(Weight(0.0), Weight(0.0)), Weight(0.0));
}

TEST(WeightTest, TimesIsAddition) {
  EXPECT_EQ(Times(Weight(1.0), Weight(2.0)), Weight(3.0));
  EXPECT_EQ(Times(Weight(4.25), Weight::One()), Weight(4.25));
  EXPECT_TRUE(Times(Weight(5.0), Weight::Zero()).IsZero());
}

TEST(WeightTest, SemiringAxiomsOnRandomPairs) {
  std::mt19937 rng(7);
  std::uniform_real_distribution<double> u(0, 100);
  auto draw = [&]() { return u(rng) < 5 ? Weight::Zero() : Weight(u(rng)); };
  for (int k = 0; k < 10000; ++k) {
    Weight a = draw(), b = draw(), c = draw();
    EXPECT_EQ(Plus(a, b), Plus(b, a));
    EXPECT_EQ(Plus(Plus(a, b), c), Plus(a, Plus(b, c)));
    EXPECT_EQ(Times(a, Weight::Zero()), Weight::Zero());
    EXPECT_EQ(Plus(a, Weight::Zero()), a);
    EXPECT_EQ(Times(a, Weight::One()), a);
    // Distributivity holds exactly: x + min(y, z) == min(x + y, x + z).
    EXPECT_EQ(Times(a, Plus(b, c)), Plus(Times(a, b), Times(a, c)));
  }
}

TEST(WeightTest, TextRoundTripIsExact) {
  std::mt19937 rng(3);
  std::uniform_real_distribution<double> u(0, 1e6);
  for (int k = 0; k < 1000; ++k) {
    Weight w(u(rng) / 7.0);
    Weight back;
    ASSERT_TRUE(ParseWeight(WeightToString(w), &back));
    EXPECT_EQ(back, w);
  }
  Weight z;
  ASSERT_TRUE(ParseWeight(WeightToString(Weight::Zero()), &z));
  EXPECT_TRUE(z.IsZero());
}

TEST(SymbolTableTest, EpsilonIsZeroAndIdsAreDense) {
  SymbolTable t;
  EXPECT_EQ(t.Find("<eps>"), 0);
  EXPECT_EQ(t.AddSymbol("a"), 1);
  EXPECT_EQ(t.AddSymbol("#0"), 2);
  EXPECT_EQ(t.AddSymbol("a"), 1);
  EXPECT_EQ(t.Symbol(2), "#0");
  EXPECT_EQ(t.Find("missing"), kNoLabel);
  std::stringstream ss;
  t.WriteText(ss);
  SymbolTable back = SymbolTable::ReadText(ss);
  EXPECT_EQ(back, t);
}

TEST(SymbolTableTest, SymbolConventions) {
  EXPECT_TRUE(IsPhoneWordSymbol(PhoneWordSymbol("p1")));
  EXPECT_EQ(PhoneWordSymbol("p1"), "#phn:p1");
  EXPECT_TRUE(IsDisambigSymbol("#0"));
  EXPECT_TRUE(IsDisambigSymbol("#12"));
  EXPECT_FALSE(IsDisambigSymbol("#phn:a"));
  EXPECT_TRUE(IsAuxiliarySymbol("#phn:a"));
  EXPECT_FALSE(IsAuxiliarySymbol("$unknown"));
}

TEST(SymbolTableTest, RejectsNonDenseIds) {
  std::istringstream is("<eps> 0\na 2\n");
  EXPECT_THROW(SymbolTable::ReadText(is), ParseError);
}

TEST(WfstTest, SinglePathConstruction) {
  Wfst f;
  StateId s0 = f.AddState(), s1 = f.AddState();
  f.SetStart(s0);
  f.AddArc(s0, 1, 2, Weight(1.0), s1);
  f.SetFinal(s1, Weight::One());
  f.Freeze();
  PathSet ps = EnumeratePaths(f, 5);
  ASSERT_EQ(ps.Size(), 1u);
  EXPECT_EQ(ps.Find({1}, {2}), Weight(1.0));
}

TEST(WfstTest, MutationAfterFreezeIsRejected) {
  Wfst f;
  f.AddState();
  f.SetStart(0);
  f.Freeze();
  EXPECT_THROW(f.AddState(), Error);
  EXPECT_THROW(f.SetFinal(0, Weight::One()), Error);
  EXPECT_THROW(f.AddArc(0, 1, 1, Weight::One(), 0), Error);
  Wfst g = f.Thawed();
  EXPECT_NO_THROW(g.AddState());
}

TEST(WfstTest, InvalidStateIdIsRejected) {
  Wfst f;
  f.AddStates(2);
  EXPECT_THROW(f.AddArc(0, 1, 1, Weight::One(), 99), Error);
  EXPECT_THROW(f.SetStart(5), Error);
}

TEST(WfstTest, DeterministicFlagDefinition) {
  Wfst f;
  f.AddStates(3);
  f.SetStart(0);
  f.AddArc(0, 1, 1, Weight::One(), 1);
  f.AddArc(0, 2, 2, Weight::One(), 2);
  Wfst g = f.Thawed();
  f.Freeze();
  EXPECT_TRUE(f.Has(kIDeterministic));
  g.AddArc(0, 2, 3, Weight::One(), 1);
  Wfst h = g.Thawed();
  g.Freeze();
  EXPECT_FALSE(g.Has(kIDeterministic));
  Wfst e = f.Thawed();
  e.AddArc(0, kEpsilon, 3, Weight::One(), 1);
  e.Freeze();
  EXPECT_FALSE(e.Has(kIDeterministic));
}

TEST(WfstTest, FreezePropertiesAgreeWithScan) {
  std::mt19937 rng(11);
  for (int trial = 0; trial < 300; ++trial) {
    testing::RandomWfstOptions o;
    o.num_states = 2 + trial % 9;
    o.acyclic = trial % 2 == 0;
    o.eps_in_prob = 0.15;
    o.acceptor = trial % 5 == 0;
    Wfst f = testing::RandomWfst(rng, o);
    if (trial % 3 == 0) f = ArcSort(f, SortSide::kInput);
    if (trial % 3 == 1) f = ArcSort(f, SortSide::kOutput);
    auto scan = testing::ScanProperties(f);
    EXPECT_EQ(f.Has(kAcceptor), scan.acceptor);
    EXPECT_EQ(f.Has(kILabelSorted), scan.isorted);
    EXPECT_EQ(f.Has(kOLabelSorted), scan.osorted);
    EXPECT_EQ(f.Has(kIDeterministic), scan.ideterministic);
  }
}

TEST(ArcSortTest, SortsAndIsIdempotent) {
  Wfst f;
  f.AddStates(2);
  f.SetStart(0);
  f.AddArc(0, 3, 3, Weight::One(), 1);
  f.AddArc(0, 1, 1, Weight::One(), 1);
  f.AddArc(0, 2, 2, Weight::One(), 1);
  f.SetFinal(1, Weight::One());
  f.Freeze();
  Wfst s = ArcSort(f, SortSide::kInput);
  ASSERT_EQ(s.NumArcs(0), 3u);
  EXPECT_EQ(s.Arcs(0)[0].ilabel, 1);
  EXPECT_EQ(s.Arcs(0)[1].ilabel, 2);
  EXPECT_EQ(s.Arcs(0)[2].ilabel, 3);
  EXPECT_TRUE(s.Has(kILabelSorted));
  Wfst again = ArcSort(s, SortSide::kInput);
  EXPECT_EQ(again, s);
  Wfst empty;
  empty.Freeze();
  EXPECT_TRUE(ArcSort(empty, SortSide::kOutput).Empty());
}

TEST(TextFormatTest, ParsesDocumentedExample) {
  auto syms = std::make_shared<SymbolTable>();
  syms->AddSymbol("a");
  syms->AddSymbol("x");
  Wfst f = FromText("0 1 a x 1.0\n1 0.0\n", syms, syms);
  ASSERT_EQ(f.NumStates(), 2u);
  EXPECT_EQ(f.Start(), 0);
  ASSERT_EQ(f.NumArcs(0), 1u);
  EXPECT_EQ(f.Arcs(0)[0].ilabel, syms->Find("a"));
  EXPECT_EQ(f.Arcs(0)[0].olabel, syms->Find("x"));
  EXPECT_EQ(f.Arcs(0)[0].weight, Weight(1.0));
  EXPECT_EQ(f.Final(1), Weight::One());
}

TEST(TextFormatTest, MalformedLinesNameTheLine) {
  try {
    FromText("0 1 a\n");
    FAIL() << "expected ParseError";
  } catch (const ParseError &e) {
    EXPECT_EQ(e.line(), 1);
  }
  auto syms = std::make_shared<SymbolTable>();
  syms->AddSymbol("a");
  try {
    FromText("0 1 a a\n1 2 a zz\n", syms, syms);
    FAIL() << "expected ParseError";
  } catch (const ParseError &e) {
    EXPECT_EQ(e.line(), 2);
  }
  EXPECT_THROW(FromText("-1 2 1 1\n"), ParseError);
}

TEST(TextFormatTest, RandomRoundTrip) {
  std::mt19937 rng(5);
  std::uniform_real_distribution<double> u(0, 20);
  for (int trial = 0; trial < 50; ++trial) {
    testing::RandomWfstOptions o;
    o.num_states = 50;
    o.acyclic = false;
    o.eps_in_prob = 0.1;
    o.eps_out_prob = 0.1;
    Wfst base = testing::RandomWfst(rng, o);
    // Non-dyadic weights exercise shortest round-trip printing.
    Wfst f = base.Thawed();
    for (StateId s = 0; s < 50; ++s) {
      std::vector<Arc> arcs(base.Arcs(s).begin(), base.Arcs(s).end());
      for (Arc &a : arcs) a.weight = Weight(u(rng) / 3.0);
      f.SetArcs(s, arcs);
    }
    f.Freeze();
    Wfst back = FromText(ToText(f));
    EXPECT_EQ(back, f);
    std::stringstream bin;
    WriteBinary(f, bin);
    EXPECT_EQ(ReadBinary(bin), f);
  }
}

TEST(BinaryFormatTest, RejectsBadMagic) {
  std::stringstream ss("not a wfst at all");
  EXPECT_THROW(ReadBinary(ss), Error);
}

}  // namespace
}  // namespace dynvoc
