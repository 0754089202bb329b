// include/dynvoc/symbol_table.h

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

#ifndef DYNVOC_SYMBOL_TABLE_H_
#define DYNVOC_SYMBOL_TABLE_H_

#include <fstream>
#include <istream>
#include <memory>
#include <ostream>
#include <sstream>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "dynvoc/base.h"

namespace dynvoc {

inline constexpr std::string_view kEpsilonSymbol = "<eps>";
inline constexpr std::string_view kHash0Symbol = "#0";
inline constexpr std::string_view kUnknownSymbol = "$unknown";
inline constexpr std::string_view kPhoneWordPrefix = "#phn:";

inline std::string PhoneWordSymbol(std::string_view phone) {
  return std::string(kPhoneWordPrefix) + std::string(phone);
}

inline bool IsPhoneWordSymbol(std::string_view sym) {
  return sym.substr(0, kPhoneWordPrefix.size()) == kPhoneWordPrefix;
}

// Auxiliary symbols ("#0", "#1", "#phn:x") all start with '#'.
inline bool IsAuxiliarySymbol(std::string_view sym) {
  return !sym.empty() && sym.front() == '#';
}

// "#0", "#1", ...: disambiguation symbols, removed from graph inputs after
// determinization.
inline bool IsDisambigSymbol(std::string_view sym) {
  if (sym.size() < 2 || sym.front() != '#') return false;
  for (size_t i = 1; i < sym.size(); ++i)
    if (sym[i] < '0' || sym[i] > '9') return false;
  return true;
}

// Dense bijection between strings and labels; label 0 is always <eps>.
class SymbolTable {
 public:
  SymbolTable() { AddSymbol(std::string(kEpsilonSymbol)); }

  // Returns the existing label if the symbol is already present.
  Label AddSymbol(const std::string &sym) {
    auto it = index_.find(sym);
    if (it != index_.end()) return it->second;
    Label id = static_cast<Label>(symbols_.size());
    symbols_.push_back(sym);
    index_.emplace(sym, id);
    return id;
  }

  Label Find(std::string_view sym) const {
    auto it = index_.find(std::string(sym));
    return it == index_.end() ? kNoLabel : it->second;
  }

  // Throws if absent.
  Label Get(std::string_view sym) const {
    Label l = Find(sym);
    if (l == kNoLabel) Fail("unknown symbol '", sym, "'");
    return l;
  }

  const std::string &Symbol(Label l) const {
    if (l < 0 || static_cast<size_t>(l) >= symbols_.size())
      Fail("label ", l, " out of range for symbol table of size ",
           symbols_.size());
    return symbols_[l];
  }

  bool Contains(Label l) const {
    return l >= 0 && static_cast<size_t>(l) < symbols_.size();
  }

  size_t Size() const { return symbols_.size(); }
  const std::vector<std::string> &Symbols() const { return symbols_; }

  // One table extends the other: every label both know maps to the same
  // string.
  bool CompatibleWith(const SymbolTable &other) const {
    size_t n = std::min(Size(), other.Size());
    for (size_t i = 0; i < n; ++i)
      if (symbols_[i] != other.symbols_[i]) return false;
    return true;
  }

  friend bool operator==(const SymbolTable &a, const SymbolTable &b) {
    return a.symbols_ == b.symbols_;
  }

  void WriteText(std::ostream &os) const {
    for (size_t i = 0; i < symbols_.size(); ++i) os << symbols_[i] << ' ' << i << '\n';
  }

  // Format: "symbol id" per line, ids dense from 0 with <eps> at 0.
  static SymbolTable ReadText(std::istream &is) {
    SymbolTable table;
    table.symbols_.clear();
    table.index_.clear();
    std::string line;
    int lineno = 0;
    while (std::getline(is, line)) {
      ++lineno;
      std::istringstream ls(line);
      std::string sym, extra;
      long id = -1;
      if (!(ls >> sym)) continue;
      if (!(ls >> id) || (ls >> extra))
        throw ParseError("expected 'symbol id'", lineno);
      if (id != static_cast<long>(table.symbols_.size()))
        throw ParseError(StrCat("non-dense symbol id ", id), lineno);
      if (table.index_.count(sym))
        throw ParseError("duplicate symbol '" + sym + "'", lineno);
      table.index_.emplace(sym, static_cast<Label>(id));
      table.symbols_.push_back(sym);
    }
    if (table.symbols_.empty() || table.symbols_[0] != kEpsilonSymbol)
      throw ParseError("symbol table must start with <eps> 0", 1);
    return table;
  }

  static SymbolTable ReadTextFile(const std::string &path) {
    std::ifstream is(path);
    if (!is) Fail("cannot open symbol table '", path, "'");
    return ReadText(is);
  }

  void WriteTextFile(const std::string &path) const {
    std::ofstream os(path);
    if (!os) Fail("cannot write symbol table '", path, "'");
    WriteText(os);
  }

 private:
  std::vector<std::string> symbols_;
  std::unordered_map<std::string, Label> index_;
};

using SymbolTablePtr = std::shared_ptr<const SymbolTable>;

}  // namespace dynvoc

#endif  // DYNVOC_SYMBOL_TABLE_H_
