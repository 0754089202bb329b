// include/dynvoc/vocab_expand.h

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

#ifndef DYNVOC_VOCAB_EXPAND_H_
#define DYNVOC_VOCAB_EXPAND_H_

#include <algorithm>
#include <fstream>
#include <istream>
#include <memory>
#include <numbers>
#include <span>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "dynvoc/arpa.h"
#include "dynvoc/compose.h"
#include "dynvoc/connect.h"
#include "dynvoc/graph_build.h"
#include "dynvoc/io.h"
#include "dynvoc/lexicon.h"
#include "dynvoc/replace.h"
#include "dynvoc/wfst.h"

namespace dynvoc {

inline constexpr double kDefaultNewWordWeight = 10.0;

struct NewWord {
  std::string word;
  std::vector<std::string> phones;
  Weight weight{kDefaultNewWordWeight};
};

struct NewWordList {
  std::vector<NewWord> entries;
};

// One word per line: `word phone1 phone2 ...`. Blank lines and lines
// starting with ';' are skipped.
inline NewWordList ReadNewWords(std::istream &is, double weight = kDefaultNewWordWeight) {
  NewWordList out;
  std::string line;
  int lineno = 0;
  while (std::getline(is, line)) {
    ++lineno;
    std::istringstream ls(line);
    NewWord w;
    if (!(ls >> w.word) || w.word[0] == ';') continue;
    for (std::string p; ls >> p;) w.phones.push_back(p);
    if (w.phones.empty()) throw ParseError("new word '" + w.word + "' has no pronunciation", lineno);
    w.weight = Weight(weight);
    out.entries.push_back(std::move(w));
  }
  return out;
}

inline NewWordList ReadNewWordsFile(const std::string &path,
                                    double weight = kDefaultNewWordWeight) {
  std::ifstream is(path);
  if (!is) Fail("cannot open '", path, "'");
  return ReadNewWords(is, weight);
}

inline void WriteNewWords(const NewWordList &list, std::ostream &os) {
  for (const NewWord &w : list.entries) {
    os << w.word;
    for (const auto &p : w.phones) os << ' ' << p;
    os << '\n';
  }
}

inline NewWordList ToNewWords(const Lexicon &lex, double weight = kDefaultNewWordWeight) {
  NewWordList out;
  for (const auto &e : lex.entries) out.entries.push_back({e.word, e.phones, Weight(weight)});
  return out;
}

// Checks the list against the base word table (which must carry a #phn
// symbol for every phone used).
inline void ValidateNewWords(const NewWordList &list, const SymbolTable &base_words) {
  std::set<std::string> seen;
  for (const NewWord &w : list.entries) {
    if (w.phones.empty()) Fail("new word '", w.word, "' has an empty pronunciation");
    if (!seen.insert(w.word).second) Fail("duplicate new word '", w.word, "'");
    if (!IsRealWord(w.word)) Fail("new word '", w.word, "' uses a reserved spelling");
    if (base_words.Find(w.word) != kNoLabel)
      Fail("new word '", w.word, "' is already in the vocabulary");
    for (const auto &p : w.phones)
      if (base_words.Find(PhoneWordSymbol(p)) == kNoLabel)
        Fail("new word '", w.word, "' uses unknown phone '", p, "'");
  }
}

// Copy of `base` with the new words appended. Base labels are unchanged, so
// the result is compatible with every graph built on `base`.
inline SymbolTablePtr ExtendWordTable(const SymbolTablePtr &base, const NewWordList &list) {
  ValidateNewWords(list, *base);
  auto out = std::make_shared<SymbolTable>(*base);
  for (const NewWord &w : list.entries) out->AddSymbol(w.word);
  return out;
}

struct TLprimeOptions {
  std::string silence = "sil";
  // Final pre-silence state: the trailing silence is optional.
  bool pre_sil_final = true;
};

// T o L' built directly. One path per word from the start state reading the
// #phn symbols of its pronunciation; the word and its weight sit on the first
// arc. All paths meet in a pre-silence state with an arc #phn:sil:<eps> to a
// second final state.
inline Wfst BuildTLprime(const NewWordList &list, const SymbolTablePtr &words,
                         const TLprimeOptions &o = {}) {
  Wfst f;
  f.SetInputSymbols(words);
  f.SetOutputSymbols(words);
  std::set<std::string> seen;
  for (const NewWord &w : list.entries) {
    if (w.phones.empty()) Fail("new word '", w.word, "' has an empty pronunciation");
    if (!seen.insert(w.word).second) Fail("duplicate new word '", w.word, "'");
  }
  if (list.entries.empty()) {
    // No accepting path.
    f.SetStart(f.AddState());
    f.Freeze();
    return f;
  }
  StateId start = f.AddState(), pre_sil = f.AddState(), post_sil = f.AddState();
  f.SetStart(start);
  Label sil = internal::MustFind(*words, PhoneWordSymbol(o.silence), "word");
  f.AddArc(pre_sil, sil, kEpsilon, Weight::One(), post_sil);
  f.SetFinal(post_sil, Weight::One());
  if (o.pre_sil_final) f.SetFinal(pre_sil, Weight::One());
  for (const NewWord &w : list.entries) {
    std::vector<Label> in;
    for (const auto &p : w.phones) in.push_back(internal::MustFind(*words, PhoneWordSymbol(p), "word"));
    internal::AddChain(&f, start, pre_sil, in, internal::MustFind(*words, w.word, "word"), w.weight);
  }
  f.Freeze();
  return f;
}

struct ReplaceResult {
  Wfst fst;
  // False when the grammar has no $unknown arc; fst is then the input.
  bool replaced = false;
};

// Replace($unknown) in G. With hash0_aware the connectors read #0 rather
// than <eps>.
inline ReplaceResult ReplaceUnknown(const Wfst &g, const Wfst &body, bool hash0_aware) {
  const SymbolTable &words = *g.OutputSymbols();
  Label unk = words.Find(std::string(kUnknownSymbol));
  bool present = false;
  if (unk != kNoLabel)
    for (StateId s = 0; s < static_cast<StateId>(g.NumStates()) && !present; ++s)
      for (const Arc &a : g.Arcs(s))
        if (a.olabel == unk) {
          present = true;
          break;
        }
  if (!present) return {g, false};
  ReplaceSpec spec;
  spec.root = &g;
  spec.nonterminal = unk;
  spec.body = &body;
  if (hash0_aware) spec.epsilon_alias = internal::MustFind(words, std::string(kHash0Symbol), "word");
  return {Replace(spec), true};
}

namespace internal {

// Unigram cost per word label; kNoLabel entries are not LM words.
inline std::vector<double> UnigramCosts(const NGramModel &lm, const SymbolTable &words) {
  std::vector<double> cost(words.Size(), -1.0);
  for (const auto &[g, e] : lm.NGrams(1)) {
    Label l = words.Find(g[0]);
    if (l != kNoLabel) cost[l] = Log10ToCost(e.logp);
  }
  return cost;
}

}  // namespace internal

// HCLG1: every arc of `hcl` whose output is a real word is multiplied by the
// word's unigram weight.
inline Wfst ApplyUnigramWeights(const Wfst &hcl, const NGramModel &lm) {
  const SymbolTable &words = *hcl.OutputSymbols();
  auto cost = internal::UnigramCosts(lm, words);
  Wfst out = hcl.Thawed();
  for (StateId s = 0; s < static_cast<StateId>(out.NumStates()); ++s) {
    std::vector<Arc> arcs(out.Arcs(s).begin(), out.Arcs(s).end());
    for (Arc &a : arcs) {
      if (a.olabel == kEpsilon || !IsRealWord(words.Symbol(a.olabel))) continue;
      if (cost[a.olabel] < 0 && !lm.HasUnigram(words.Symbol(a.olabel)))
        Fail("word '", words.Symbol(a.olabel), "' has no unigram in the language model");
      a.weight = Times(a.weight, Weight(cost[a.olabel]));
    }
    out.SetArcs(s, std::move(arcs));
  }
  out.Freeze();
  return out;
}

// G_{n-1}: G with every real-word arc divided by the word's unigram weight.
// Back-off arcs, final weights and $unknown are untouched.
inline Wfst DivideUnigramWeights(const Wfst &g, const NGramModel &lm) {
  const SymbolTable &words = *g.InputSymbols();
  auto cost = internal::UnigramCosts(lm, words);
  Wfst out = g.Thawed();
  for (StateId s = 0; s < static_cast<StateId>(out.NumStates()); ++s) {
    std::vector<Arc> arcs(out.Arcs(s).begin(), out.Arcs(s).end());
    for (Arc &a : arcs)
      if (a.ilabel != kEpsilon && cost[a.ilabel] >= 0 &&
          IsRealWord(words.Symbol(a.ilabel)))
        a.weight = Weight(a.weight.Value() - cost[a.ilabel]);
    out.SetArcs(s, std::move(arcs));
  }
  out.Freeze();
  return out;
}

struct SplitK1Options {
  GrammarOptions grammar;
  // Unigram-only models leave G_{n-1} weightless; refused unless set.
  bool allow_unigram = false;
};

struct SplitK1Result {
  Wfst hclg1;
  Wfst gn1;
};

// HCL must still carry word labels on the arcs that should receive the
// unigram weight; the recipe applies this before determinization.
inline SplitK1Result SplitK1(const Wfst &hcl, const NGramModel &lm, const SplitK1Options &o = {}) {
  if (lm.Order() < 2 && !o.allow_unigram)
    Fail("split_k1 needs a language model of order >= 2");
  SplitK1Result r;
  r.hclg1 = ApplyUnigramWeights(hcl, lm);
  r.gn1 = DivideUnigramWeights(BuildG(lm, o.grammar, hcl.OutputSymbols()), lm);
  return r;
}

// Adds every #phn symbol of `words` as a unigram with cost `weight`.
inline NGramModel AugmentLmWithPhoneWords(const NGramModel &lm, const SymbolTable &words,
                                          Weight weight = Weight::One()) {
  if (weight.Value() < 0) Fail("phone-word unigram weight must be non-negative");
  NGramModel out = lm;
  double logp = -weight.Value() / std::numbers::ln10;
  for (size_t l = 0; l < words.Size(); ++l) {
    const std::string &sym = words.Symbol(static_cast<Label>(l));
    if (IsPhoneWordSymbol(sym)) out.AddNGram({sym}, logp);
  }
  return out;
}

// Run of identity arcs with consecutive labels [lo, hi] sharing weight and
// destination.
struct CompactArcRange {
  Label lo = kNoLabel;
  Label hi = kNoLabel;
  Weight weight;
  StateId nextstate = kNoStateId;

  friend bool operator==(const CompactArcRange &, const CompactArcRange &) = default;
};

inline constexpr char kVocabAcceptorMagic[8] = "DVG0RG1";
inline constexpr uint32_t kVocabAcceptorVersion = 1;

// Wfst whose identity arcs may be stored as label ranges. Used for G0: its
// start state holds one loop per real word.
class VocabAcceptor {
 public:
  VocabAcceptor() = default;

  // Identity arcs in runs of at least min_run consecutive labels become ranges.
  static VocabAcceptor Compress(const Wfst &f, size_t min_run = 2) {
    VocabAcceptor v;
    Wfst rest;
    rest.SetInputSymbols(f.InputSymbols());
    rest.SetOutputSymbols(f.OutputSymbols());
    rest.AddStates(f.NumStates());
    if (!f.Empty()) rest.SetStart(f.Start());
    v.ranges_.resize(f.NumStates());
    for (StateId s = 0; s < static_cast<StateId>(f.NumStates()); ++s) {
      rest.SetFinal(s, f.Final(s));
      std::vector<Arc> arcs(f.Arcs(s).begin(), f.Arcs(s).end());
      std::stable_sort(arcs.begin(), arcs.end(), [](const Arc &a, const Arc &b) {
        return a.ilabel < b.ilabel;
      });
      std::vector<Arc> explicit_arcs;
      for (size_t k = 0; k < arcs.size();) {
        size_t e = k;
        const Arc &a = arcs[k];
        if (a.ilabel == a.olabel && a.ilabel != kEpsilon) {
          while (e + 1 < arcs.size() && arcs[e + 1].ilabel == arcs[e].ilabel + 1 &&
                 arcs[e + 1].olabel == arcs[e + 1].ilabel && arcs[e + 1].weight == a.weight &&
                 arcs[e + 1].nextstate == a.nextstate)
            ++e;
        }
        if (e - k + 1 >= min_run && a.ilabel == a.olabel && a.ilabel != kEpsilon) {
          v.ranges_[s].push_back({a.ilabel, arcs[e].ilabel, a.weight, a.nextstate});
          k = e + 1;
        } else {
          explicit_arcs.push_back(arcs[k++]);
        }
      }
      rest.SetArcs(s, std::move(explicit_arcs));
    }
    rest.Freeze();
    v.rest_ = std::move(rest);
    if (!v.rest_.Empty() && !v.rest_.Has(kILabelSorted)) Fail("vocab acceptor: unsorted arcs");
    return v;
  }

  StateId Start() const { return rest_.Start(); }
  bool Empty() const { return rest_.Empty(); }
  size_t NumStates() const { return rest_.NumStates(); }
  Weight Final(StateId s) const { return rest_.Final(s); }
  bool IsFinal(StateId s) const { return rest_.IsFinal(s); }
  size_t NumArcs(StateId s) const {
    size_t n = rest_.NumArcs(s);
    for (const auto &r : ranges_[s]) n += static_cast<size_t>(r.hi - r.lo + 1);
    return n;
  }
  // Ranges are sorted identity arcs without <eps>; other properties are
  // not tracked.
  bool Has(uint32_t props) const {
    constexpr uint32_t kKept = kAcceptor | kILabelSorted | kNoIEpsilons | kNoOEpsilons;
    return (props & ~kKept) == 0 && rest_.Has(props);
  }
  const SymbolTablePtr &InputSymbols() const { return rest_.InputSymbols(); }
  const SymbolTablePtr &OutputSymbols() const { return rest_.OutputSymbols(); }
  std::span<const CompactArcRange> Ranges(StateId s) const { return ranges_[s]; }
  std::span<const Arc> ExplicitArcs(StateId s) const { return rest_.Arcs(s); }
  size_t NumRanges() const {
    size_t n = 0;
    for (const auto &r : ranges_) n += r.size();
    return n;
  }

  template <typename F>
  void ForEachInputMatch(StateId s, Label label, F &&fn) const {
    const auto &rs = ranges_[s];
    auto it = std::upper_bound(rs.begin(), rs.end(), label,
                               [](Label l, const CompactArcRange &r) { return l < r.lo; });
    if (it != rs.begin() && label <= std::prev(it)->hi) {
      const CompactArcRange &r = *std::prev(it);
      fn(Arc(label, label, r.weight, r.nextstate));
    }
    rest_.ForEachInputMatch(s, label, fn);
  }

  // Arcs in input-label order.
  template <typename F>
  void ForEachArc(StateId s, F &&fn) const {
    auto arcs = rest_.Arcs(s);
    size_t k = 0;
    for (const CompactArcRange &r : ranges_[s])
      for (Label l = r.lo; l <= r.hi; ++l) {
        for (; k < arcs.size() && arcs[k].ilabel < l; ++k) fn(arcs[k]);
        fn(Arc(l, l, r.weight, r.nextstate));
      }
    for (; k < arcs.size(); ++k) fn(arcs[k]);
  }

  Wfst ToWfst() const {
    Wfst f = rest_.Thawed();
    for (StateId s = 0; s < static_cast<StateId>(NumStates()); ++s) {
      std::vector<Arc> arcs;
      ForEachArc(s, [&](const Arc &a) { arcs.push_back(a); });
      f.SetArcs(s, std::move(arcs));
    }
    f.Freeze();
    return f;
  }

  size_t BytesEstimate() const {
    size_t n = NumRanges() * sizeof(CompactArcRange);
    for (StateId s = 0; s < static_cast<StateId>(NumStates()); ++s)
      n += rest_.NumArcs(s) * sizeof(Arc) + sizeof(Weight);
    return n;
  }

  // Layout: magic[8], u32 version, u64 num_states, per state u64 count and
  // count x {i32 lo, i32 hi, f64 weight, i32 nextstate}; then the explicit
  // part as a Wfst section.
  void Write(std::ostream &os) const {
    using internal::WritePod;
    internal::WriteMagic(os, kVocabAcceptorMagic, kVocabAcceptorVersion);
    WritePod<uint64_t>(os, ranges_.size());
    for (const auto &rs : ranges_) {
      WritePod<uint64_t>(os, rs.size());
      for (const auto &r : rs) {
        WritePod<int32_t>(os, r.lo);
        WritePod<int32_t>(os, r.hi);
        WritePod<double>(os, r.weight.Value());
        WritePod<int32_t>(os, r.nextstate);
      }
    }
    WriteBinary(rest_, os);
  }

  static VocabAcceptor Read(std::istream &is, SymbolTablePtr syms = nullptr) {
    using internal::ReadPod;
    internal::ExpectMagic(is, kVocabAcceptorMagic, kVocabAcceptorVersion);
    VocabAcceptor v;
    v.ranges_.resize(ReadPod<uint64_t>(is));
    for (auto &rs : v.ranges_) {
      rs.resize(ReadPod<uint64_t>(is));
      for (auto &r : rs) {
        r.lo = ReadPod<int32_t>(is);
        r.hi = ReadPod<int32_t>(is);
        r.weight = Weight(ReadPod<double>(is));
        r.nextstate = ReadPod<int32_t>(is);
      }
    }
    v.rest_ = ReadBinary(is, syms, syms);
    if (v.rest_.NumStates() != v.ranges_.size()) Fail("vocab acceptor: state count mismatch");
    for (StateId s = 0; s < static_cast<StateId>(v.NumStates()); ++s)
      for (const auto &r : v.ranges_[s])
        if (r.lo > r.hi || r.nextstate < 0 || r.nextstate >= static_cast<StateId>(v.NumStates()))
          Fail("vocab acceptor: corrupt range");
    return v;
  }

  friend bool operator==(const VocabAcceptor &a, const VocabAcceptor &b) {
    return a.ranges_ == b.ranges_ && a.rest_ == b.rest_;
  }

 private:
  std::vector<std::vector<CompactArcRange>> ranges_;
  Wfst rest_;
};

inline void WriteVocabAcceptorFile(const VocabAcceptor &v, const std::string &path) {
  std::ofstream os(path, std::ios::binary);
  if (!os) Fail("cannot write '", path, "'");
  v.Write(os);
}

inline VocabAcceptor ReadVocabAcceptorFile(const std::string &path, SymbolTablePtr syms = nullptr) {
  std::ifstream is(path, std::ios::binary);
  if (!is) Fail("cannot open '", path, "'");
  return VocabAcceptor::Read(is, std::move(syms));
}

// G0 over the real words of `words` that precede #0 (the base vocabulary):
// a single final state with a weightless loop per word. When `body` (T o L')
// is given, its start arcs are merged into state 0 with `entry_weight`
// added, and its final states return to 0 by <eps> arcs.
inline Wfst BuildG0(const SymbolTablePtr &words, const Wfst *body = nullptr,
                    Weight entry_weight = Weight::One()) {
  Label hash0 = internal::MustFind(*words, std::string(kHash0Symbol), "word");
  Wfst f;
  f.SetInputSymbols(words);
  f.SetOutputSymbols(words);
  f.SetStart(f.AddState());
  f.SetFinal(0, Weight::One());
  for (Label l = 1; l < hash0; ++l)
    if (IsRealWord(words->Symbol(l))) f.AddArc(0, l, l, Weight::One(), 0);
  if (body && !body->Empty()) {
    if (body->IsFinal(body->Start())) Fail("G0: new-word body accepts the empty string");
    StateId offset = static_cast<StateId>(f.NumStates());
    f.AddStates(body->NumStates());
    for (StateId b = 0; b < static_cast<StateId>(body->NumStates()); ++b) {
      StateId src = b == body->Start() ? 0 : offset + b;
      for (const Arc &a : body->Arcs(b)) {
        if (a.nextstate == body->Start()) Fail("G0: new-word body re-enters its start state");
        Weight w = b == body->Start() ? Times(a.weight, entry_weight) : a.weight;
        f.AddArc(src, a.ilabel, a.olabel, w, offset + a.nextstate);
      }
      if (body->IsFinal(b)) f.AddArc(offset + b, kEpsilon, kEpsilon, body->Final(b), 0);
    }
  }
  f = ArcSort(Connect(f), SortSide::kInput);
  return f;
}

struct SplitKnOptions {
  GrammarOptions grammar;
  Weight phone_word_weight = Weight::One();
};

// HCLGn = connect(HCL o G(lm + phone-word unigrams)).
inline Wfst BuildHCLGn(const Wfst &hcl, const NGramModel &lm, const SplitKnOptions &o = {}) {
  const SymbolTablePtr &words = hcl.OutputSymbols();
  bool has_phone_words = false;
  for (StateId s = 0; s < static_cast<StateId>(hcl.NumStates()) && !has_phone_words; ++s)
    for (const Arc &a : hcl.Arcs(s))
      if (a.olabel != kEpsilon && IsPhoneWordSymbol(words->Symbol(a.olabel))) {
        has_phone_words = true;
        break;
      }
  if (!has_phone_words) Fail("split_kn: HCL has no phoneme-word outputs");
  NGramModel aug = AugmentLmWithPhoneWords(lm, *words, o.phone_word_weight);
  Wfst g = ArcSort(BuildG(aug, o.grammar, words), SortSide::kInput);
  const Wfst &left = hcl.Has(kOLabelSorted) ? hcl : ArcSort(hcl, SortSide::kOutput);
  return Connect(Compose(left, g));
}

// Offset added to new-word entries of G0 so that HCLGn o G0 scores a new
// word as the static graph does: the $unknown unigram weight.
inline Weight UnknownEntryWeight(const NGramModel &lm) {
  const auto *e = lm.Find({std::string(kUnknownSymbol)});
  return e ? Weight(Log10ToCost(e->logp)) : Weight::One();
}

}  // namespace dynvoc

#endif  // DYNVOC_VOCAB_EXPAND_H_
