// include/dynvoc/corpus.h

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

#ifndef DYNVOC_CORPUS_H_
#define DYNVOC_CORPUS_H_

#include <fstream>
#include <istream>
#include <map>
#include <ostream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "dynvoc/decode.h"
#include "dynvoc/recipe.h"

namespace dynvoc {

// One synthetic utterance. Transcript lines read
//   <id> <trailing_sil 0|1> <seed> word...
struct Utterance {
  std::string id;
  std::vector<std::string> words;
  bool trailing_sil = false;
  unsigned seed = 1;
};

inline std::vector<Utterance> ReadTranscripts(std::istream &is) {
  std::vector<Utterance> out;
  std::string line;
  int lineno = 0;
  while (std::getline(is, line)) {
    ++lineno;
    std::istringstream ls(line);
    Utterance u;
    int sil = -1;
    if (!(ls >> u.id)) continue;
    if (!(ls >> sil >> u.seed) || (sil != 0 && sil != 1))
      throw ParseError("expected '<id> <0|1> <seed> word...'", lineno);
    u.trailing_sil = sil == 1;
    for (std::string w; ls >> w;) u.words.push_back(w);
    if (u.words.empty()) throw ParseError("utterance '" + u.id + "' has no words", lineno);
    out.push_back(std::move(u));
  }
  return out;
}

inline std::vector<Utterance> ReadTranscriptsFile(const std::string &path) {
  std::ifstream is(path);
  if (!is) Fail("cannot open transcripts '", path, "'");
  return ReadTranscripts(is);
}

inline void WriteTranscripts(const std::vector<Utterance> &utts, std::ostream &os) {
  for (const Utterance &u : utts) {
    os << u.id << ' ' << (u.trailing_sil ? 1 : 0) << ' ' << u.seed;
    for (const auto &w : u.words) os << ' ' << w;
    os << '\n';
  }
}

// Words joined by the silence phone, optionally followed by one more.
inline std::vector<std::string> SentencePhones(const Resources &r,
                                               const std::vector<std::string> &words,
                                               bool trailing_sil) {
  std::map<std::string, const std::vector<std::string> *> pron;
  for (const auto &e : r.lexicon.entries) pron.emplace(e.word, &e.phones);
  for (const auto &e : r.new_words.entries) pron.emplace(e.word, &e.phones);
  std::vector<std::string> phones;
  for (size_t k = 0; k < words.size(); ++k) {
    auto it = pron.find(words[k]);
    if (it == pron.end()) Fail("no pronunciation for '", words[k], "'");
    if (k) phones.push_back(r.lexicon.silence);
    phones.insert(phones.end(), it->second->begin(), it->second->end());
  }
  if (trailing_sil) phones.push_back(r.lexicon.silence);
  return phones;
}

inline FrameScores UtteranceScores(const Resources &r, const Cascade &c, const Utterance &u,
                                   ScoreGenOptions o = {}) {
  ContextType ctx = ParseContextType(c.recipe.settings.count("context")
                                         ? c.recipe.settings.at("context")
                                         : DefaultRecipeSettings().at("context"));
  int hmm = std::stoi(c.recipe.settings.count("hmm_states") ? c.recipe.settings.at("hmm_states")
                                                            : DefaultRecipeSettings().at("hmm_states"));
  LabelSeq units = UnitsForPhones(SentencePhones(r, u.words, u.trailing_sil), *c.EmitSymbols(), ctx, hmm);
  o.seed = u.seed;
  return GenerateScores(units, c.NumUnits(), o);
}

struct ToyCorpusOptions {
  int num_utterances = 30;
  int max_words = 3;
  double new_word_fraction = 0.4;  // utterances containing a new word
  double trailing_sil_fraction = 0.3;
  unsigned seed = 21;
};

// Each new word is used at least once when the corpus is long enough.
inline std::vector<Utterance> GenerateToyCorpus(const Resources &r, const ToyCorpusOptions &o = {}) {
  std::mt19937 rng(o.seed);
  std::uniform_real_distribution<double> u(0, 1);
  std::vector<std::string> base;
  for (const auto &e : r.lexicon.entries) base.push_back(e.word);
  std::vector<Utterance> out;
  size_t next_new = 0;
  for (int k = 0; k < o.num_utterances; ++k) {
    Utterance utt;
    utt.id = StrCat("utt", k < 9 ? "0" : "", k + 1);
    int n = 1 + static_cast<int>(rng() % o.max_words);
    for (int w = 0; w < n; ++w) utt.words.push_back(base[rng() % base.size()]);
    if (!r.new_words.entries.empty() && u(rng) < o.new_word_fraction) {
      utt.words[rng() % n] = r.new_words.entries[next_new % r.new_words.entries.size()].word;
      ++next_new;
    }
    utt.trailing_sil = u(rng) < o.trailing_sil_fraction;
    utt.seed = 1000 + k;
    out.push_back(std::move(utt));
  }
  return out;
}

}  // namespace dynvoc

#endif  // DYNVOC_CORPUS_H_
