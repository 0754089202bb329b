// include/dynvoc/graph_build.h

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

#ifndef DYNVOC_GRAPH_BUILD_H_
#define DYNVOC_GRAPH_BUILD_H_

#include <algorithm>
#include <map>
#include <memory>
#include <string>
#include <unordered_map>
#include <vector>

#include "dynvoc/arpa.h"
#include "dynvoc/lexicon.h"
#include "dynvoc/wfst.h"

namespace dynvoc {

// Hub states of a lexicon transducer built by BuildL.
inline constexpr StateId kLexiconHub1 = 0;
inline constexpr StateId kLexiconHub2 = 1;

struct LexiconOptions {
  bool hash0 = false;           // self-loop at hub1 writing #0
  bool hash0_input = false;     // that loop reads #0 instead of <eps>
  bool disambig = false;        // append #k to ambiguous pronunciations
  PhonemeWordConfig phone_words{PhonemeWordStyle::kNone, true};
};

namespace internal {

inline Label MustFind(const SymbolTable &t, const std::string &sym, const char *what) {
  Label l = t.Find(sym);
  if (l == kNoLabel) Fail("symbol '", sym, "' missing from ", what, " table");
  return l;
}

// Adds a chain src -> ... -> dst reading `in`, writing `out` on the first
// arc (eps elsewhere) with `w` on the first arc.
inline void AddChain(Wfst *f, StateId src, StateId dst, const std::vector<Label> &in,
                     Label out, Weight w) {
  StateId cur = src;
  for (size_t k = 0; k < in.size(); ++k) {
    StateId next = k + 1 == in.size() ? dst : f->AddState();
    f->AddArc(cur, in[k], k == 0 ? out : kEpsilon, k == 0 ? w : Weight::One(), next);
    cur = next;
  }
}

}  // namespace internal

// Adds phoneme-word arcs to a lexicon transducer built by BuildL. With
// `disambig`, each phoneme-word arc is followed by the highest #k of the
// input table (reserved for phoneme words).
inline Wfst AugmentLWithPhonemeWords(const Wfst &l, const Lexicon &lex,
                                     const PhonemeWordConfig &cfg, bool disambig) {
  if (cfg.style == PhonemeWordStyle::kNone) return l;
  if (cfg.style == PhonemeWordStyle::kPositionDependent && !lex.position_dependent)
    Fail("position-dependent phoneme words need a position-dependent lexicon");
  if (l.Start() != kLexiconHub1 || l.NumStates() < 2)
    Fail("AugmentLWithPhonemeWords: input is not a hub-topology lexicon");
  const SymbolTable &phones = *l.InputSymbols();
  const SymbolTable &words = *l.OutputSymbols();
  Label reserved = kNoLabel;
  if (disambig) {
    for (size_t k = phones.Size(); k-- > 1;)
      if (IsDisambigSymbol(phones.Symbol(static_cast<Label>(k))) &&
          phones.Symbol(static_cast<Label>(k)) != kHash0Symbol) {
        reserved = static_cast<Label>(k);
        break;
      }
    if (reserved == kNoLabel) Fail("no disambiguation symbol reserved for phoneme words");
  }
  Wfst f = l.Thawed();
  auto add = [&](StateId src, StateId dst, const std::string &phone) {
    Label in = internal::MustFind(phones, phone, "phone");
    Label out = internal::MustFind(words, PhoneWordSymbol(phone), "word");
    if (reserved == kNoLabel) {
      f.AddArc(src, in, out, Weight::One(), dst);
    } else {
      StateId mid = f.AddState();
      f.AddArc(src, in, out, Weight::One(), mid);
      f.AddArc(mid, reserved, kEpsilon, Weight::One(), dst);
    }
  };
  StateId n = kNoStateId;
  if (cfg.style == PhonemeWordStyle::kPositionDependent) n = f.AddState();
  for (const std::string &p : lex.Phones()) {
    bool sil = p == lex.silence;
    if (sil && !cfg.include_sil_phone_word) continue;
    switch (cfg.style) {
      case PhonemeWordStyle::kPath:
        add(kLexiconHub1, kLexiconHub2, p);
        break;
      case PhonemeWordStyle::kSelfLoop:
        add(kLexiconHub1, kLexiconHub1, p);
        break;
      case PhonemeWordStyle::kPositionDependent: {
        char pos = sil ? 'S' : Lexicon::Position(p);
        if (pos == 'S') add(kLexiconHub1, kLexiconHub2, p);
        else if (pos == 'B') add(kLexiconHub1, n, p);
        else if (pos == 'I') add(n, n, p);
        else if (pos == 'E') add(n, kLexiconHub2, p);
        else Fail("phone '", p, "' has no word-position suffix");
        break;
      }
      case PhonemeWordStyle::kNone:
        break;
    }
  }
  f.Freeze();
  return f;
}

// Two-hub lexicon transducer: hub1 (start, final) -> word pronunciation ->
// hub2, then back to hub1 via <eps>:<eps> or sil:<eps>, so silence can only
// follow a word.
inline Wfst BuildL(const Lexicon &lex, const LexiconOptions &opts, SymbolTablePtr phones,
                   SymbolTablePtr words) {
  lex.Validate();
  DisambigInfo dis = AssignDisambig(lex, opts.phone_words.style);
  Wfst f;
  f.SetInputSymbols(phones);
  f.SetOutputSymbols(words);
  f.AddStates(2);
  f.SetStart(kLexiconHub1);
  f.SetFinal(kLexiconHub1, Weight::One());
  Label sil = internal::MustFind(*phones, lex.silence, "phone");
  f.AddArc(kLexiconHub2, kEpsilon, kEpsilon, Weight::One(), kLexiconHub1);
  f.AddArc(kLexiconHub2, sil, kEpsilon, Weight::One(), kLexiconHub1);
  for (size_t k = 0; k < lex.entries.size(); ++k) {
    const LexiconEntry &e = lex.entries[k];
    std::vector<Label> in;
    for (const auto &p : e.phones) {
      Label l = phones->Find(p);
      if (l == kNoLabel) Fail("unknown phone '", p, "' in word '", e.word, "'");
      in.push_back(l);
    }
    if (opts.disambig && dis.entry_symbol[k] > 0)
      in.push_back(internal::MustFind(*phones, DisambigSymbol(dis.entry_symbol[k]), "phone"));
    internal::AddChain(&f, kLexiconHub1, kLexiconHub2, in,
                       internal::MustFind(*words, e.word, "word"), e.weight);
  }
  if (opts.hash0) {
    Label w0 = internal::MustFind(*words, std::string(kHash0Symbol), "word");
    Label p0 = opts.hash0_input ? internal::MustFind(*phones, std::string(kHash0Symbol), "phone")
                                : kEpsilon;
    f.AddArc(kLexiconHub1, p0, w0, Weight::One(), kLexiconHub1);
  }
  f.Freeze();
  if (opts.phone_words.style != PhonemeWordStyle::kNone)
    return AugmentLWithPhonemeWords(f, lex, opts.phone_words, opts.disambig);
  return f;
}

// Phone table sized for the disambiguation symbols BuildL will need.
inline SymbolTablePtr MakePhoneTableFor(const Lexicon &lex, const LexiconOptions &opts) {
  int n = 0;
  if (opts.disambig) n = AssignDisambig(lex, opts.phone_words.style).Count();
  return MakePhoneTable(lex, n);
}

struct GrammarOptions {
  bool hash0 = false;  // back-off arcs read #0 (output stays <eps>)
};

// Back-off acceptor: one state per history, start = "<s>", "</s>" as final
// weight, back-off arcs to the history with its first word dropped.
inline Wfst BuildG(const NGramModel &lm, const GrammarOptions &opts, SymbolTablePtr words) {
  lm.Validate();
  const int n = lm.Order();
  Wfst f;
  f.SetInputSymbols(words);
  f.SetOutputSymbols(words);
  std::map<NGram, StateId> states;
  auto state_of = [&](const NGram &h) {
    auto [it, inserted] = states.try_emplace(h, kNoStateId);
    if (inserted) it->second = f.AddState();
    return it->second;
  };
  state_of({});
  // Histories: every n-gram of order < n not ending in </s>, if it has a
  // continuation or a back-off weight.
  std::map<NGram, bool> has_next;
  for (int k = 2; k <= n; ++k)
    for (const auto &[g, e] : lm.NGrams(k)) has_next[NGram(g.begin(), g.end() - 1)] = true;
  for (int k = 1; k < n; ++k)
    for (const auto &[g, e] : lm.NGrams(k))
      if (g.back() != kEosSymbol && (has_next.count(g) || (e.has_bow && e.bow != 0.0)))
        state_of(g);
  NGram bos{std::string(kBosSymbol)};
  if (n == 1) bos.clear();
  else if (!states.count(bos)) state_of(bos);
  f.SetStart(states.at(bos));
  auto longest_state = [&](NGram h) {
    if (static_cast<int>(h.size()) > n - 1) h.erase(h.begin(), h.end() - (n - 1));
    while (!states.count(h)) h.erase(h.begin());
    return states.at(h);
  };
  Label backoff_in = opts.hash0 ? internal::MustFind(*words, std::string(kHash0Symbol), "word")
                                : kEpsilon;
  // Snapshot: states is not modified past this point.
  for (const auto &[h, s] : states) {
    const auto &next = lm.NGrams(static_cast<int>(h.size()) + 1);
    for (auto it = next.lower_bound(h); it != next.end(); ++it) {
      const auto &[g, e] = *it;
      if (!std::equal(h.begin(), h.end(), g.begin())) break;
      const std::string &w = g.back();
      if (w == kBosSymbol) continue;
      Weight cost(Log10ToCost(e.logp));
      if (w == kEosSymbol) {
        f.SetFinal(s, cost);
        continue;
      }
      Label l = words->Find(w);
      if (l == kNoLabel) Fail("language-model word '", w, "' missing from word table");
      f.AddArc(s, l, l, cost, longest_state(g));
    }
    if (!h.empty()) {
      NGram shorter(h.begin() + 1, h.end());
      f.AddArc(s, backoff_in, kEpsilon, Weight(Log10ToCost(lm.BackoffLog10(h))),
               longest_state(shorter));
    }
  }
  f.Freeze();
  return f;
}

enum class ContextType { kMono, kLeftBiphone };

inline ContextType ParseContextType(const std::string &s) {
  if (s == "mono") return ContextType::kMono;
  if (s == "biphone" || s == "left-biphone") return ContextType::kLeftBiphone;
  Fail("unknown context type '", s, "'");
}

inline constexpr std::string_view kNoContext = "-";

// Context-dependency transducer from context-dependent units to phones.
// Mono: identity over the phone table. Left biphone: state = previous phone
// (start = none); unit "prev/cur" writes cur. Disambiguation symbols pass
// through on self-loops. All states are final.
inline Wfst BuildC(SymbolTablePtr phones, ContextType ctx) {
  std::vector<Label> real, aux;
  for (size_t l = 1; l < phones->Size(); ++l)
    (IsAuxiliarySymbol(phones->Symbol(static_cast<Label>(l))) ? aux : real)
        .push_back(static_cast<Label>(l));
  Wfst f;
  f.SetOutputSymbols(phones);
  if (ctx == ContextType::kMono) {
    f.SetInputSymbols(phones);
    f.AddState();
    f.SetStart(0);
    f.SetFinal(0, Weight::One());
    for (size_t l = 1; l < phones->Size(); ++l)
      f.AddArc(0, static_cast<Label>(l), static_cast<Label>(l), Weight::One(), 0);
    f.Freeze();
    return f;
  }
  auto units = std::make_shared<SymbolTable>();
  std::vector<std::string> prevs{std::string(kNoContext)};
  for (Label p : real) prevs.push_back(phones->Symbol(p));
  for (const auto &prev : prevs)
    for (Label cur : real) units->AddSymbol(prev + "/" + phones->Symbol(cur));
  for (Label a : aux) units->AddSymbol(phones->Symbol(a));
  f.SetInputSymbols(units);
  f.AddStates(prevs.size());
  f.SetStart(0);
  for (size_t s = 0; s < prevs.size(); ++s) {
    f.SetFinal(static_cast<StateId>(s), Weight::One());
    for (size_t c = 0; c < real.size(); ++c) {
      Label unit = units->Get(prevs[s] + "/" + phones->Symbol(real[c]));
      f.AddArc(static_cast<StateId>(s), unit, real[c], Weight::One(), static_cast<StateId>(c + 1));
    }
    for (Label a : aux)
      f.AddArc(static_cast<StateId>(s), units->Get(phones->Symbol(a)), a, Weight::One(),
               static_cast<StateId>(s));
  }
  f.Freeze();
  return f;
}

struct HmmTopology {
  int states_per_phone = 1;
};

// Emitting-unit table for H: "<unit>.<q>" for every real unit and state,
// ids (c-1)*k + q + 1, followed by the auxiliary symbols of the unit table.
inline SymbolTablePtr MakeEmitTable(const SymbolTable &units, const HmmTopology &topo) {
  auto t = std::make_shared<SymbolTable>();
  std::vector<std::string> aux;
  for (size_t l = 1; l < units.Size(); ++l) {
    const std::string &u = units.Symbol(static_cast<Label>(l));
    if (IsAuxiliarySymbol(u)) {
      aux.push_back(u);
      continue;
    }
    for (int q = 0; q < topo.states_per_phone; ++q) t->AddSymbol(u + "." + std::to_string(q));
  }
  for (const auto &a : aux) t->AddSymbol(a);
  return t;
}

// Number of emitting ids (the decoder's score columns).
inline size_t NumEmittingUnits(const SymbolTable &emit) {
  size_t n = 0;
  for (size_t l = 1; l < emit.Size(); ++l)
    if (!IsAuxiliarySymbol(emit.Symbol(static_cast<Label>(l)))) ++n;
  return n;
}

// HMM transducer: one hub state; per unit a left-to-right chain of emitting
// ids returning to the hub, unit label on the first arc. Self-loops are left
// to the decoder. Auxiliary symbols pass through on hub self-loops.
inline Wfst BuildH(SymbolTablePtr units, const HmmTopology &topo) {
  if (topo.states_per_phone < 1) Fail("states per phone must be positive");
  auto emit = MakeEmitTable(*units, topo);
  Wfst f;
  f.SetInputSymbols(emit);
  f.SetOutputSymbols(units);
  f.AddState();
  f.SetStart(0);
  f.SetFinal(0, Weight::One());
  Label next_emit = 1;
  for (size_t l = 1; l < units->Size(); ++l) {
    Label u = static_cast<Label>(l);
    const std::string &sym = units->Symbol(u);
    if (IsAuxiliarySymbol(sym)) {
      f.AddArc(0, emit->Get(sym), u, Weight::One(), 0);
      continue;
    }
    std::vector<Label> in;
    for (int q = 0; q < topo.states_per_phone; ++q) in.push_back(next_emit++);
    internal::AddChain(&f, 0, 0, in, u, Weight::One());
  }
  f.Freeze();
  return f;
}

// Input labels that are disambiguation symbols (#0, #1, ...) become <eps>.
inline Wfst RemoveDisambig(const Wfst &f) {
  if (!f.InputSymbols()) Fail("RemoveDisambig needs an input symbol table");
  const SymbolTable &t = *f.InputSymbols();
  Wfst out = f.Thawed();
  for (StateId s = 0; s < static_cast<StateId>(f.NumStates()); ++s) {
    std::vector<Arc> arcs(f.Arcs(s).begin(), f.Arcs(s).end());
    for (Arc &a : arcs)
      if (a.ilabel != kEpsilon && IsDisambigSymbol(t.Symbol(a.ilabel))) a.ilabel = kEpsilon;
    out.SetArcs(s, std::move(arcs));
  }
  out.Freeze();
  return out;
}

}  // namespace dynvoc

#endif  // DYNVOC_GRAPH_BUILD_H_
