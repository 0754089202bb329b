// include/dynvoc/io.h

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

#ifndef DYNVOC_IO_H_
#define DYNVOC_IO_H_

#include <bit>
#include <cstring>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "dynvoc/base.h"
#include "dynvoc/wfst.h"

namespace dynvoc {

// Text format: one arc per line "src dst isym osym [weight]", final states
// as "state [weight]". The first line's source is the start state. A state
// written as "s Infinity" exists but is not final; the writer uses this for
// states that would otherwise not appear.
inline void WriteText(const Wfst &f, std::ostream &os,
                      const SymbolTable *isyms = nullptr,
                      const SymbolTable *osyms = nullptr) {
  if (!isyms && f.InputSymbols()) isyms = f.InputSymbols().get();
  if (!osyms && f.OutputSymbols()) osyms = f.OutputSymbols().get();
  if (f.Empty()) return;
  auto label = [](const SymbolTable *t, Label l) {
    return t ? t->Symbol(l) : std::to_string(l);
  };
  std::vector<StateId> order;
  order.push_back(f.Start());
  for (StateId s = 0; s < static_cast<StateId>(f.NumStates()); ++s)
    if (s != f.Start()) order.push_back(s);
  for (StateId s : order) {
    for (const Arc &a : f.Arcs(s)) {
      os << s << ' ' << a.nextstate << ' ' << label(isyms, a.ilabel) << ' '
         << label(osyms, a.olabel) << ' ' << WeightToString(a.weight) << '\n';
    }
    if (f.IsFinal(s)) {
      os << s << ' ' << WeightToString(f.Final(s)) << '\n';
    } else if (f.NumArcs(s) == 0) {
      os << s << " Infinity\n";
    }
  }
}

inline std::string ToText(const Wfst &f) {
  std::ostringstream os;
  WriteText(f, os);
  return os.str();
}

// Inverse of WriteText. Symbols are resolved through the tables when given,
// otherwise labels must be integers. The result is frozen and carries the
// tables.
inline Wfst ReadText(std::istream &is, SymbolTablePtr isyms = nullptr,
                     SymbolTablePtr osyms = nullptr) {
  struct PendingArc {
    StateId src;
    Arc arc;
  };
  std::vector<PendingArc> arcs;
  std::vector<std::pair<StateId, Weight>> finals;
  StateId start = kNoStateId;
  StateId max_state = -1;
  std::string line;
  int lineno = 0;

  auto parse_state = [&](const std::string &tok) -> StateId {
    long v = 0;
    auto res = std::from_chars(tok.data(), tok.data() + tok.size(), v);
    if (res.ec != std::errc() || res.ptr != tok.data() + tok.size())
      throw ParseError("bad state id '" + tok + "'", lineno);
    if (v < 0) throw ParseError("negative state id " + tok, lineno);
    return static_cast<StateId>(v);
  };
  auto parse_label = [&](const SymbolTablePtr &t, const std::string &tok) {
    if (t) {
      Label l = t->Find(tok);
      if (l == kNoLabel) throw ParseError("unknown symbol '" + tok + "'", lineno);
      return l;
    }
    long v = 0;
    auto res = std::from_chars(tok.data(), tok.data() + tok.size(), v);
    if (res.ec != std::errc() || res.ptr != tok.data() + tok.size() || v < 0)
      throw ParseError("bad label '" + tok + "'", lineno);
    return static_cast<Label>(v);
  };
  auto parse_weight = [&](const std::string &tok) {
    Weight w;
    if (!ParseWeight(tok, &w)) throw ParseError("bad weight '" + tok + "'", lineno);
    return w;
  };

  while (std::getline(is, line)) {
    ++lineno;
    std::istringstream ls(line);
    std::vector<std::string> tok;
    for (std::string t; ls >> t;) tok.push_back(t);
    if (tok.empty()) continue;
    if (tok.size() == 1 || tok.size() == 2) {
      StateId s = parse_state(tok[0]);
      Weight w = tok.size() == 2 ? parse_weight(tok[1]) : Weight::One();
      finals.emplace_back(s, w);
      if (start == kNoStateId) start = s;
      max_state = std::max(max_state, s);
    } else if (tok.size() == 4 || tok.size() == 5) {
      PendingArc p;
      p.src = parse_state(tok[0]);
      p.arc.nextstate = parse_state(tok[1]);
      p.arc.ilabel = parse_label(isyms, tok[2]);
      p.arc.olabel = parse_label(osyms, tok[3]);
      p.arc.weight = tok.size() == 5 ? parse_weight(tok[4]) : Weight::One();
      if (start == kNoStateId) start = p.src;
      max_state = std::max({max_state, p.src, p.arc.nextstate});
      arcs.push_back(p);
    } else {
      throw ParseError(StrCat("expected 1, 2, 4 or 5 fields, got ", tok.size()),
                       lineno);
    }
  }
  Wfst f;
  f.SetInputSymbols(isyms);
  f.SetOutputSymbols(osyms);
  f.AddStates(static_cast<size_t>(max_state + 1));
  if (start != kNoStateId) f.SetStart(start);
  for (const auto &p : arcs) f.AddArc(p.src, p.arc);
  for (const auto &[s, w] : finals) f.SetFinal(s, w);
  f.Freeze();
  return f;
}

inline Wfst FromText(const std::string &text, SymbolTablePtr isyms = nullptr,
                     SymbolTablePtr osyms = nullptr) {
  std::istringstream is(text);
  return ReadText(is, std::move(isyms), std::move(osyms));
}

namespace internal {

static_assert(std::endian::native == std::endian::little,
              "binary formats assume a little-endian host");

template <typename T>
void WritePod(std::ostream &os, const T &v) {
  os.write(reinterpret_cast<const char *>(&v), sizeof(T));
}

template <typename T>
T ReadPod(std::istream &is) {
  T v{};
  is.read(reinterpret_cast<char *>(&v), sizeof(T));
  if (!is) Fail("truncated binary input");
  return v;
}

inline void WriteMagic(std::ostream &os, const char (&magic)[8], uint32_t version) {
  os.write(magic, 8);
  WritePod(os, version);
}

inline void ExpectMagic(std::istream &is, const char (&magic)[8], uint32_t version) {
  char buf[8];
  is.read(buf, 8);
  if (!is || std::memcmp(buf, magic, 8) != 0) Fail("bad magic: expected ", magic);
  uint32_t v = ReadPod<uint32_t>(is);
  if (v != version) Fail("unsupported version ", v, " for ", magic);
}

}  // namespace internal

inline constexpr char kWfstMagic[8] = "DVWFST1";
inline constexpr uint32_t kWfstVersion = 1;

// Binary layout (little-endian): magic[8], u32 version, i32 start,
// u64 num_states, then per state: f64 final, u64 num_arcs,
// num_arcs x {i32 ilabel, i32 olabel, f64 weight, i32 nextstate}.
// Symbol tables are stored separately.
inline void WriteBinary(const Wfst &f, std::ostream &os) {
  using internal::WritePod;
  internal::WriteMagic(os, kWfstMagic, kWfstVersion);
  WritePod<int32_t>(os, f.Start());
  WritePod<uint64_t>(os, f.NumStates());
  for (StateId s = 0; s < static_cast<StateId>(f.NumStates()); ++s) {
    WritePod<double>(os, f.Final(s).Value());
    WritePod<uint64_t>(os, f.NumArcs(s));
    for (const Arc &a : f.Arcs(s)) {
      WritePod<int32_t>(os, a.ilabel);
      WritePod<int32_t>(os, a.olabel);
      WritePod<double>(os, a.weight.Value());
      WritePod<int32_t>(os, a.nextstate);
    }
  }
}

inline Wfst ReadBinary(std::istream &is, SymbolTablePtr isyms = nullptr,
                       SymbolTablePtr osyms = nullptr) {
  using internal::ReadPod;
  internal::ExpectMagic(is, kWfstMagic, kWfstVersion);
  Wfst f;
  f.SetInputSymbols(std::move(isyms));
  f.SetOutputSymbols(std::move(osyms));
  int32_t start = ReadPod<int32_t>(is);
  uint64_t n = ReadPod<uint64_t>(is);
  f.AddStates(n);
  for (uint64_t s = 0; s < n; ++s) {
    f.SetFinal(static_cast<StateId>(s), Weight(ReadPod<double>(is)));
    uint64_t na = ReadPod<uint64_t>(is);
    for (uint64_t k = 0; k < na; ++k) {
      Arc a;
      a.ilabel = ReadPod<int32_t>(is);
      a.olabel = ReadPod<int32_t>(is);
      a.weight = Weight(ReadPod<double>(is));
      a.nextstate = ReadPod<int32_t>(is);
      f.AddArc(static_cast<StateId>(s), a);
    }
  }
  if (start != kNoStateId) f.SetStart(start);
  f.Freeze();
  return f;
}

inline void WriteBinaryFile(const Wfst &f, const std::string &path) {
  std::ofstream os(path, std::ios::binary);
  if (!os) Fail("cannot write '", path, "'");
  WriteBinary(f, os);
}

inline Wfst ReadBinaryFile(const std::string &path, SymbolTablePtr isyms = nullptr,
                           SymbolTablePtr osyms = nullptr) {
  std::ifstream is(path, std::ios::binary);
  if (!is) Fail("cannot open '", path, "'");
  return ReadBinary(is, std::move(isyms), std::move(osyms));
}

}  // namespace dynvoc

#endif  // DYNVOC_IO_H_
