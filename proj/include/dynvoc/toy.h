// include/dynvoc/toy.h

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

#ifndef DYNVOC_TOY_H_
#define DYNVOC_TOY_H_

#include <algorithm>
#include <cmath>
#include <map>
#include <random>
#include <set>
#include <string>
#include <vector>

#include "dynvoc/arpa.h"
#include "dynvoc/lexicon.h"

namespace dynvoc {

// Small synthetic resources for tests and demos.

inline const std::vector<std::string> &ToyConsonants() {
  static const std::vector<std::string> v{"b", "d", "f", "g", "k", "l", "m", "n", "p", "s", "t"};
  return v;
}

inline const std::vector<std::string> &ToyVowels() {
  static const std::vector<std::string> v{"aa", "ae", "ah", "eh", "ih", "iy", "ow", "uw"};
  return v;
}

inline std::string ToySpelling(const std::vector<std::string> &phones) {
  static const std::map<std::string, std::string> vowel{
      {"aa", "a"}, {"ae", "ae"}, {"ah", "u"}, {"eh", "e"},
      {"ih", "i"}, {"iy", "ee"}, {"ow", "o"}, {"uw", "oo"}};
  std::string s;
  for (const auto &p : phones) {
    auto it = vowel.find(p);
    s += it == vowel.end() ? p : it->second;
  }
  return s;
}

struct ToyLexiconOptions {
  int num_words = 50;
  int num_single_phone_words = 2;
  unsigned seed = 7;
};

// Words are one or two CV(C) syllables; spellings and pronunciations are
// unique. `avoid` lists pronunciations that must not be produced.
inline Lexicon GenerateToyLexicon(const ToyLexiconOptions &o,
                                  const std::set<std::vector<std::string>> &avoid = {}) {
  std::mt19937 rng(o.seed);
  Lexicon lex;
  std::set<std::vector<std::string>> prons = avoid;
  std::set<std::string> names;
  auto pick = [&](const std::vector<std::string> &v) { return v[rng() % v.size()]; };
  auto add = [&](const std::vector<std::string> &p) {
    std::string name = ToySpelling(p);
    if (prons.count(p) || names.count(name)) return false;
    prons.insert(p);
    names.insert(name);
    lex.entries.push_back({name, p, Weight::One()});
    return true;
  };
  for (int k = 0; k < o.num_single_phone_words;) k += add({ToyVowels()[(k * 3 + 2) % 8]});
  while (static_cast<int>(lex.entries.size()) < o.num_words) {
    std::vector<std::string> p;
    int syl = 1 + static_cast<int>(rng() % 2);
    for (int s = 0; s < syl; ++s) {
      p.push_back(pick(ToyConsonants()));
      p.push_back(pick(ToyVowels()));
      if (rng() % 3 == 0) p.push_back(pick(ToyConsonants()));
    }
    add(p);
  }
  lex.extra_phones.insert(ToyConsonants().begin(), ToyConsonants().end());
  lex.extra_phones.insert(ToyVowels().begin(), ToyVowels().end());
  std::sort(lex.entries.begin(), lex.entries.end(),
            [](const LexiconEntry &a, const LexiconEntry &b) { return a.word < b.word; });
  return lex;
}

// New words with pronunciations absent from `base`, spelled with a "x" prefix
// so they never collide with base spellings.
inline Lexicon GenerateToyNewWords(const Lexicon &base, int n, unsigned seed) {
  std::set<std::vector<std::string>> avoid;
  for (const auto &e : base.entries) avoid.insert(e.phones);
  ToyLexiconOptions o;
  o.num_words = n;
  o.num_single_phone_words = 0;
  o.seed = seed;
  Lexicon lex = GenerateToyLexicon(o, avoid);
  for (auto &e : lex.entries) e.word = "x" + e.word;
  return lex;
}

struct ToyLmOptions {
  int order = 2;
  double history_fraction = 0.5;   // share of candidate histories kept
  int max_successors = 5;
  bool with_unknown = true;        // add a $unknown unigram
  unsigned seed = 11;
};

// Random back-off model in which every explicit n-gram is at least 1.5
// times as likely as its back-off estimate, so the best path through the
// back-off acceptor always takes the explicit arc when there is one.
inline NGramModel GenerateToyLm(const std::vector<std::string> &vocab, const ToyLmOptions &o) {
  std::mt19937 rng(o.seed);
  std::uniform_real_distribution<double> u(0, 1);
  NGramModel m;
  std::vector<std::string> words = vocab;
  if (o.with_unknown) words.push_back(std::string(kUnknownSymbol));
  std::vector<std::string> events = words;
  events.push_back(std::string(kEosSymbol));
  std::vector<double> p(events.size());
  double z = 0;
  for (double &x : p) z += (x = 0.2 + u(rng));
  for (size_t k = 0; k < events.size(); ++k) m.AddNGram({events[k]}, std::log10(p[k] / z));
  m.AddNGram({std::string(kBosSymbol)}, -99.0);
  // Successor candidates exclude $unknown, which stays a unigram.
  std::vector<std::string> succ(vocab);
  succ.push_back(std::string(kEosSymbol));
  std::vector<NGram> histories{{std::string(kBosSymbol)}};
  for (const auto &w : vocab)
    if (u(rng) < o.history_fraction) histories.push_back({w});
  // Ratio of each explicit history n-gram over its back-off estimate. A
  // history's bow is kept >= 1/ratio so that entering the history state never
  // loses to the back-off path later on.
  std::map<NGram, double> ratio;
  for (int k = 2; k <= o.order; ++k) {
    std::vector<NGram> next_histories;
    for (const NGram &h : histories) {
      auto rt = ratio.find(h);
      double lo = rt == ratio.end() ? 0.2 : std::max(0.2, 1.0 / rt->second);
      double bow = lo + (0.8 - lo) * u(rng);
      int ns = 1 + static_cast<int>(rng() % o.max_successors);
      std::set<std::string> chosen;
      for (int s = 0; s < ns; ++s) chosen.insert(succ[rng() % succ.size()]);
      bool any = false;
      for (const auto &w : chosen) {
        double base = std::pow(10.0, m.Log10Prob(w, NGram(h.begin() + 1, h.end())));
        double hi = std::min(4.0, 1.0 / (bow * base));
        if (hi < 1.6) continue;
        double r = 1.5 + (hi - 1.5) * u(rng);
        NGram g = h;
        g.push_back(w);
        m.AddNGram(g, std::log10(r * bow * base));
        any = true;
        if (k < o.order && w != kEosSymbol && u(rng) < o.history_fraction) {
          next_histories.push_back(g);
          ratio[g] = r;
        }
      }
      if (any) {
        const auto *e = m.Find(h);
        m.AddNGram(h, e->logp, std::log10(bow), true);
      }
    }
    histories = std::move(next_histories);
  }
  m.Validate();
  return m;
}

// Random word sequence from `vocab`, length in [1, max_len].
inline std::vector<std::string> RandomSentence(std::mt19937 &rng,
                                               const std::vector<std::string> &vocab,
                                               int max_len) {
  std::vector<std::string> s(1 + rng() % max_len);
  for (auto &w : s) w = vocab[rng() % vocab.size()];
  return s;
}

}  // namespace dynvoc

#endif  // DYNVOC_TOY_H_
