// include/dynvoc/arpa.h

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

#ifndef DYNVOC_ARPA_H_
#define DYNVOC_ARPA_H_

#include <charconv>
#include <cstdio>
#include <cmath>
#include <fstream>
#include <map>
#include <numbers>
#include <sstream>
#include <string>
#include <vector>

#include "dynvoc/base.h"
#include "dynvoc/weight.h"

namespace dynvoc {

inline constexpr std::string_view kBosSymbol = "<s>";
inline constexpr std::string_view kEosSymbol = "</s>";

// ARPA log10 probability -> tropical cost.
inline double Log10ToCost(double log10p) { return -log10p * std::numbers::ln10; }

using NGram = std::vector<std::string>;

// Back-off n-gram model with log10 probabilities and back-off weights.
class NGramModel {
 public:
  struct Entry {
    double logp = 0.0;
    double bow = 0.0;
    bool has_bow = false;
  };

  int Order() const { return static_cast<int>(grams_.size()); }

  void AddNGram(const NGram &g, double logp, double bow = 0.0, bool has_bow = false) {
    if (g.empty()) Fail("empty n-gram");
    if (grams_.size() < g.size()) grams_.resize(g.size());
    grams_[g.size() - 1][g] = {logp, bow, has_bow};
  }

  const std::map<NGram, Entry> &NGrams(int k) const { return grams_.at(k - 1); }

  const Entry *Find(const NGram &g) const {
    if (g.empty() || g.size() > grams_.size()) return nullptr;
    auto it = grams_[g.size() - 1].find(g);
    return it == grams_[g.size() - 1].end() ? nullptr : &it->second;
  }

  bool HasUnigram(const std::string &w) const { return Find({w}) != nullptr; }

  double BackoffLog10(const NGram &h) const {
    const Entry *e = Find(h);
    return e ? e->bow : 0.0;
  }

  // log10 P(w | history) by the back-off recursion. The history is trimmed
  // to the last Order()-1 words.
  double Log10Prob(const std::string &w, NGram h) const {
    if (static_cast<int>(h.size()) > Order() - 1)
      h.erase(h.begin(), h.end() - (Order() - 1));
    double acc = 0.0;
    while (true) {
      NGram g = h;
      g.push_back(w);
      if (const Entry *e = Find(g)) return acc + e->logp;
      if (h.empty()) Fail("word '", w, "' is not in the language model");
      acc += BackoffLog10(h);
      h.erase(h.begin());
    }
  }

  // Cost (-ln P) of "<s> words </s>".
  double SentenceCost(const std::vector<std::string> &words) const {
    NGram h{std::string(kBosSymbol)};
    double cost = 0.0;
    for (size_t k = 0; k <= words.size(); ++k) {
      const std::string w = k < words.size() ? words[k] : std::string(kEosSymbol);
      cost += Log10ToCost(Log10Prob(w, h));
      h.push_back(w);
      if (static_cast<int>(h.size()) > Order() - 1) h.erase(h.begin());
    }
    return cost;
  }

  // Unigram words other than <s> and </s>, sorted.
  std::vector<std::string> Vocabulary() const {
    std::vector<std::string> v;
    if (grams_.empty()) return v;
    for (const auto &[g, e] : grams_[0])
      if (g[0] != kBosSymbol && g[0] != kEosSymbol) v.push_back(g[0]);
    return v;
  }

  void Validate() const {
    if (grams_.empty() || grams_[0].empty()) Fail("language model has no unigrams");
    for (size_t k = 0; k < grams_.size(); ++k) {
      for (const auto &[g, e] : grams_[k]) {
        if (e.logp > 0) Fail("positive log probability for '", Join(g), "'");
        if (k > 0 && !Find(NGram(g.begin(), g.end() - 1)))
          Fail("context of '", Join(g), "' is missing");
        if (k + 1 == grams_.size() && e.has_bow)
          Fail("highest-order n-gram '", Join(g), "' has a back-off weight");
      }
    }
  }

  static std::string Join(const NGram &g) {
    std::string s;
    for (const auto &w : g) s += (s.empty() ? "" : " ") + w;
    return s;
  }

 private:
  std::vector<std::map<NGram, Entry>> grams_;
};

namespace internal {

inline double ParseDouble(const std::string &tok, int line) {
  double v = 0;
  auto r = std::from_chars(tok.data(), tok.data() + tok.size(), v);
  if (r.ec != std::errc() || r.ptr != tok.data() + tok.size())
    throw ParseError("bad number '" + tok + "'", line);
  return v;
}

}  // namespace internal

inline NGramModel ReadArpa(std::istream &is) {
  NGramModel m;
  std::map<int, size_t> declared;
  std::string line;
  int lineno = 0, section = -1;  // -1 preamble, 0 \data\, k for \k-grams:
  while (std::getline(is, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    if (line == "\\data\\") {
      section = 0;
      continue;
    }
    if (line == "\\end\\") break;
    if (line[0] == '\\') {
      int k = 0;
      if (std::sscanf(line.c_str(), "\\%d-grams:", &k) != 1 || k < 1)
        throw ParseError("unknown section '" + line + "'", lineno);
      if (!declared.count(k)) throw ParseError("undeclared " + std::to_string(k) + "-grams", lineno);
      section = k;
      continue;
    }
    if (section == 0) {
      int k = 0;
      unsigned long n = 0;
      if (std::sscanf(line.c_str(), "ngram %d=%lu", &k, &n) != 2)
        throw ParseError("bad count line '" + line + "'", lineno);
      declared[k] = n;
      continue;
    }
    if (section < 1) continue;
    std::istringstream ss(line);
    std::vector<std::string> tok;
    for (std::string t; ss >> t;) tok.push_back(t);
    size_t k = static_cast<size_t>(section);
    if (tok.size() != k + 1 && tok.size() != k + 2)
      throw ParseError("expected " + std::to_string(k) + "-gram line", lineno);
    double logp = internal::ParseDouble(tok[0], lineno);
    NGram g(tok.begin() + 1, tok.begin() + 1 + k);
    if (tok.size() == k + 2)
      m.AddNGram(g, logp, internal::ParseDouble(tok.back(), lineno), true);
    else
      m.AddNGram(g, logp);
  }
  if (declared.empty()) throw ParseError("missing \\data\\ section", 0);
  for (const auto &[k, n] : declared)
    if (k > m.Order() || m.NGrams(k).size() != n)
      throw ParseError(StrCat("declared ", n, " ", k, "-grams but found ",
                              k > m.Order() ? 0 : m.NGrams(k).size()), 0);
  m.Validate();
  return m;
}

inline NGramModel ReadArpaFile(const std::string &path) {
  std::ifstream is(path);
  if (!is) Fail("cannot open '", path, "'");
  return ReadArpa(is);
}

inline void WriteArpa(const NGramModel &m, std::ostream &os) {
  os << "\n\\data\\\n";
  for (int k = 1; k <= m.Order(); ++k) os << "ngram " << k << "=" << m.NGrams(k).size() << "\n";
  for (int k = 1; k <= m.Order(); ++k) {
    os << "\n\\" << k << "-grams:\n";
    for (const auto &[g, e] : m.NGrams(k)) {
      os << WeightToString(Weight(e.logp));
      for (const auto &w : g) os << ' ' << w;
      if (e.has_bow) os << ' ' << WeightToString(Weight(e.bow));
      os << '\n';
    }
  }
  os << "\n\\end\\\n";
}

}  // namespace dynvoc

#endif  // DYNVOC_ARPA_H_
