// include/dynvoc/lexicon.h

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

#ifndef DYNVOC_LEXICON_H_
#define DYNVOC_LEXICON_H_

#include <algorithm>
#include <fstream>
#include <map>
#include <memory>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "dynvoc/symbol_table.h"
#include "dynvoc/weight.h"

namespace dynvoc {

struct LexiconEntry {
  std::string word;
  std::vector<std::string> phones;
  Weight weight = Weight::One();
};

struct Lexicon {
  std::vector<LexiconEntry> entries;
  std::string silence = "sil";
  // Phones carry _B/_I/_E/_S word-position suffixes (silence excepted).
  bool position_dependent = false;
  // Inventory phones that no entry uses yet.
  std::set<std::string> extra_phones;

  // Sorted, including the silence phone.
  std::vector<std::string> Phones() const {
    std::set<std::string> s = extra_phones;
    s.insert(silence);
    for (const auto &e : entries) s.insert(e.phones.begin(), e.phones.end());
    return {s.begin(), s.end()};
  }

  // Sorted distinct words.
  std::vector<std::string> Words() const {
    std::set<std::string> s;
    for (const auto &e : entries) s.insert(e.word);
    return {s.begin(), s.end()};
  }

  bool HasWord(const std::string &w) const {
    for (const auto &e : entries)
      if (e.word == w) return true;
    return false;
  }

  void Validate() const {
    if (entries.empty()) Fail("empty lexicon");
    for (const auto &e : entries) {
      if (e.phones.empty()) Fail("word '", e.word, "' has an empty pronunciation");
      if (e.word.empty() || e.word[0] == '#' || e.word == kUnknownSymbol ||
          e.word == "<s>" || e.word == "</s>" || e.word == kEpsilonSymbol)
        Fail("reserved word '", e.word, "' in lexicon");
      for (const auto &p : e.phones) {
        if (p == silence) Fail("word '", e.word, "' uses the silence phone");
        if (p.empty() || p[0] == '#') Fail("invalid phone '", p, "' in word '", e.word, "'");
      }
      if (position_dependent && !IsPositionShaped(e.phones))
        Fail("word '", e.word, "' is not a _S or _B _I* _E pronunciation");
    }
  }

  static char Position(const std::string &phone) {
    if (phone.size() < 3 || phone[phone.size() - 2] != '_') return 0;
    char c = phone.back();
    return (c == 'B' || c == 'I' || c == 'E' || c == 'S') ? c : 0;
  }

  static bool IsPositionShaped(const std::vector<std::string> &p) {
    if (p.size() == 1) return Position(p[0]) == 'S';
    if (Position(p.front()) != 'B' || Position(p.back()) != 'E') return false;
    for (size_t k = 1; k + 1 < p.size(); ++k)
      if (Position(p[k]) != 'I') return false;
    return true;
  }
};

// "word phone1 phone2 ..." per line; with_weights expects a weight column
// after the word. Blank lines and lines starting with ';' are skipped.
inline Lexicon ReadLexicon(std::istream &is, bool with_weights = false) {
  Lexicon lex;
  std::string line;
  int lineno = 0;
  while (std::getline(is, line)) {
    ++lineno;
    std::istringstream ss(line);
    LexiconEntry e;
    if (!(ss >> e.word) || e.word[0] == ';') continue;
    if (with_weights) {
      std::string w;
      if (!(ss >> w) || !ParseWeight(w, &e.weight))
        throw ParseError("bad pronunciation weight for '" + e.word + "'", lineno);
    }
    std::string p;
    while (ss >> p) e.phones.push_back(p);
    if (e.phones.empty())
      throw ParseError("word '" + e.word + "' has an empty pronunciation", lineno);
    lex.entries.push_back(std::move(e));
  }
  return lex;
}

inline Lexicon ReadLexiconFile(const std::string &path, bool with_weights = false) {
  std::ifstream is(path);
  if (!is) Fail("cannot open '", path, "'");
  return ReadLexicon(is, with_weights);
}

inline void WriteLexicon(const Lexicon &lex, std::ostream &os, bool with_weights = false) {
  for (const auto &e : lex.entries) {
    os << e.word;
    if (with_weights) os << ' ' << WeightToString(e.weight);
    for (const auto &p : e.phones) os << ' ' << p;
    os << '\n';
  }
}

enum class PhonemeWordStyle { kNone, kPath, kSelfLoop, kPositionDependent };

inline PhonemeWordStyle ParsePhonemeWordStyle(const std::string &s) {
  if (s == "none") return PhonemeWordStyle::kNone;
  if (s == "path") return PhonemeWordStyle::kPath;
  if (s == "self-loop") return PhonemeWordStyle::kSelfLoop;
  if (s == "posdep" || s == "position-dependent") return PhonemeWordStyle::kPositionDependent;
  Fail("unknown phoneme-word style '", s, "'");
}

inline std::string ToString(PhonemeWordStyle s) {
  switch (s) {
    case PhonemeWordStyle::kNone: return "none";
    case PhonemeWordStyle::kPath: return "path";
    case PhonemeWordStyle::kSelfLoop: return "self-loop";
    case PhonemeWordStyle::kPositionDependent: return "posdep";
  }
  return "?";
}

struct PhonemeWordConfig {
  PhonemeWordStyle style = PhonemeWordStyle::kSelfLoop;
  bool include_sil_phone_word = true;
};

// Disambiguation symbols #1..#n on pronunciations that are duplicates or
// prefixes of other pronunciations. With phoneme words every pronunciation
// that is also a prefix of a phoneme-word spelling gets one too, and the
// phoneme-word arcs use their own symbol #(n+1).
struct DisambigInfo {
  std::vector<int> entry_symbol;  // per entry; 0 = none
  int num_real = 0;
  int phone_word_symbol = 0;      // 0 when phoneme words are off
  int Count() const { return std::max(num_real, phone_word_symbol); }
};

inline DisambigInfo AssignDisambig(const Lexicon &lex, PhonemeWordStyle style) {
  DisambigInfo d;
  d.entry_symbol.assign(lex.entries.size(), 0);
  std::map<std::vector<std::string>, std::vector<size_t>> groups;
  for (size_t k = 0; k < lex.entries.size(); ++k) groups[lex.entries[k].phones].push_back(k);
  std::set<std::vector<std::string>> proper_prefixes;
  for (const auto &[pron, ids] : groups)
    for (size_t n = 1; n < pron.size(); ++n)
      proper_prefixes.insert(std::vector<std::string>(pron.begin(), pron.begin() + n));
  for (const auto &[pron, ids] : groups) {
    bool need = ids.size() > 1 || proper_prefixes.count(pron) > 0;
    if ((style == PhonemeWordStyle::kPath || style == PhonemeWordStyle::kSelfLoop) &&
        pron.size() == 1)
      need = true;
    if (style == PhonemeWordStyle::kPositionDependent) need = true;
    if (!need) continue;
    for (size_t k = 0; k < ids.size(); ++k) d.entry_symbol[ids[k]] = static_cast<int>(k + 1);
    d.num_real = std::max(d.num_real, static_cast<int>(ids.size()));
  }
  if (style != PhonemeWordStyle::kNone) d.phone_word_symbol = d.num_real + 1;
  return d;
}

inline std::string DisambigSymbol(int k) { return "#" + std::to_string(k); }

// <eps>, sorted phones, #0, #1..#num_disambig.
inline SymbolTablePtr MakePhoneTable(const Lexicon &lex, int num_disambig) {
  auto t = std::make_shared<SymbolTable>();
  for (const auto &p : lex.Phones()) t->AddSymbol(p);
  t->AddSymbol(std::string(kHash0Symbol));
  for (int k = 1; k <= num_disambig; ++k) t->AddSymbol(DisambigSymbol(k));
  return t;
}

// <eps>, sorted words, $unknown, #phn:<phone> for every phone, #0. Words
// added later are appended after these.
inline SymbolTablePtr MakeWordTable(const Lexicon &lex) {
  auto t = std::make_shared<SymbolTable>();
  for (const auto &w : lex.Words()) t->AddSymbol(w);
  t->AddSymbol(std::string(kUnknownSymbol));
  for (const auto &p : lex.Phones()) t->AddSymbol(PhoneWordSymbol(p));
  t->AddSymbol(std::string(kHash0Symbol));
  return t;
}

// Real words: not <eps>, not $unknown, not auxiliary (#...).
inline bool IsRealWord(const std::string &sym) {
  return sym != kEpsilonSymbol && sym != kUnknownSymbol && !IsAuxiliarySymbol(sym);
}

}  // namespace dynvoc

#endif  // DYNVOC_LEXICON_H_
