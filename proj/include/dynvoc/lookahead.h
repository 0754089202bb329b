// include/dynvoc/lookahead.h

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

#ifndef DYNVOC_LOOKAHEAD_H_
#define DYNVOC_LOOKAHEAD_H_

#include <algorithm>
#include <fstream>
#include <map>
#include <memory>
#include <utility>
#include <vector>

#include "dynvoc/io.h"
#include "dynvoc/wfst.h"

namespace dynvoc {

// Inclusive label range.
struct LabelInterval {
  Label lo;
  Label hi;
  friend bool operator==(const LabelInterval &, const LabelInterval &) = default;
};

// For each state of a (left) transducer: the set of first non-eps output
// labels reachable from it, stored as sorted disjoint intervals, and whether
// a final state is reachable through output-eps arcs only.
class LookaheadTable {
 public:
  LookaheadTable() = default;

  size_t NumStates() const { return states_.size(); }

  std::span<const LabelInterval> Intervals(StateId s) const {
    const StateEntry &e = states_[s];
    return std::span<const LabelInterval>(intervals_.data() + e.begin, e.end - e.begin);
  }

  bool ReachesFinal(StateId s) const { return states_[s].reaches_final; }

  bool Contains(StateId s, Label l) const {
    auto iv = Intervals(s);
    auto it = std::upper_bound(iv.begin(), iv.end(), l,
                               [](Label x, const LabelInterval &v) { return x < v.lo; });
    return it != iv.begin() && std::prev(it)->hi >= l;
  }

  // Number of labels in the set at s.
  size_t Count(StateId s) const {
    size_t n = 0;
    for (const LabelInterval &v : Intervals(s)) n += v.hi - v.lo + 1;
    return n;
  }

  size_t TotalIntervals() const { return intervals_.size(); }

  // Label permutation the table was built under (empty when not relabeled).
  const std::vector<Label> &RelabelMap() const { return relabel_; }

  void AddState(const std::vector<Label> &sorted_labels, bool reaches_final) {
    StateEntry e;
    e.begin = intervals_.size();
    for (Label l : sorted_labels) {
      if (intervals_.size() > e.begin && intervals_.back().hi + 1 == l)
        intervals_.back().hi = l;
      else
        intervals_.push_back({l, l});
    }
    e.end = intervals_.size();
    e.reaches_final = reaches_final;
    states_.push_back(e);
  }

  void SetRelabelMap(std::vector<Label> m) { relabel_ = std::move(m); }

  friend bool operator==(const LookaheadTable &a, const LookaheadTable &b) {
    if (a.states_.size() != b.states_.size() || a.relabel_ != b.relabel_) return false;
    for (size_t s = 0; s < a.states_.size(); ++s) {
      StateId id = static_cast<StateId>(s);
      if (a.ReachesFinal(id) != b.ReachesFinal(id)) return false;
      auto x = a.Intervals(id), y = b.Intervals(id);
      if (!std::equal(x.begin(), x.end(), y.begin(), y.end())) return false;
    }
    return true;
  }

  size_t BytesEstimate() const {
    return states_.size() * sizeof(StateEntry) + intervals_.size() * sizeof(LabelInterval) +
           relabel_.size() * sizeof(Label);
  }

 private:
  struct StateEntry {
    size_t begin = 0;
    size_t end = 0;
    bool reaches_final = false;
  };
  std::vector<StateEntry> states_;
  std::vector<LabelInterval> intervals_;
  std::vector<Label> relabel_;
};

namespace internal {

// First non-eps output labels reachable from every state, by DFS over
// output-eps arcs.
inline void ReachableOutputs(const Wfst &f, std::vector<std::vector<Label>> *labels,
                             std::vector<bool> *finals) {
  size_t n = f.NumStates();
  labels->assign(n, {});
  finals->assign(n, false);
  std::vector<size_t> stamp(n, 0);
  std::vector<StateId> stack;
  for (size_t s = 0; s < n; ++s) {
    auto &out = (*labels)[s];
    stack.assign(1, static_cast<StateId>(s));
    stamp[s] = s + 1;
    while (!stack.empty()) {
      StateId q = stack.back();
      stack.pop_back();
      if (f.IsFinal(q)) (*finals)[s] = true;
      for (const Arc &a : f.Arcs(q)) {
        if (a.olabel != kEpsilon) {
          out.push_back(a.olabel);
        } else if (stamp[a.nextstate] != s + 1) {
          stamp[a.nextstate] = s + 1;
          stack.push_back(a.nextstate);
        }
      }
    }
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
  }
}

inline size_t LabelSpace(const Wfst &f, const SymbolTablePtr &syms, bool output) {
  size_t n = syms ? syms->Size() : 1;
  for (size_t s = 0; s < f.NumStates(); ++s)
    for (const Arc &a : f.Arcs(static_cast<StateId>(s)))
      n = std::max(n, static_cast<size_t>((output ? a.olabel : a.ilabel) + 1));
  return n;
}

inline SymbolTablePtr PermuteSymbols(const SymbolTablePtr &syms, const std::vector<Label> &map) {
  if (!syms) return nullptr;
  std::vector<const std::string *> by_new(syms->Size(), nullptr);
  for (size_t old = 0; old < syms->Size(); ++old) {
    Label nl = old < map.size() ? map[old] : static_cast<Label>(old);
    by_new[nl] = &syms->Symbol(static_cast<Label>(old));
  }
  auto t = std::make_shared<SymbolTable>();
  for (size_t l = 1; l < by_new.size(); ++l) t->AddSymbol(*by_new[l]);
  return t;
}

inline Label MapLabel(const std::vector<Label> &map, Label l) {
  return static_cast<size_t>(l) < map.size() ? map[l] : l;
}

}  // namespace internal

// Applies a label permutation to the output side (or input side) of f. Labels
// outside the map are left alone. The symbol table is permuted accordingly.
inline Wfst RelabelOutputs(const Wfst &f, const std::vector<Label> &map) {
  Wfst out = f.Thawed();
  for (size_t s = 0; s < f.NumStates(); ++s) {
    std::vector<Arc> arcs(f.Arcs(static_cast<StateId>(s)).begin(),
                          f.Arcs(static_cast<StateId>(s)).end());
    for (Arc &a : arcs) a.olabel = internal::MapLabel(map, a.olabel);
    out.SetArcs(static_cast<StateId>(s), std::move(arcs));
  }
  out.SetOutputSymbols(internal::PermuteSymbols(f.OutputSymbols(), map));
  out.Freeze();
  return out;
}

inline Wfst RelabelInputs(const Wfst &f, const std::vector<Label> &map) {
  Wfst out = f.Thawed();
  for (size_t s = 0; s < f.NumStates(); ++s) {
    std::vector<Arc> arcs(f.Arcs(static_cast<StateId>(s)).begin(),
                          f.Arcs(static_cast<StateId>(s)).end());
    for (Arc &a : arcs) a.ilabel = internal::MapLabel(map, a.ilabel);
    out.SetArcs(static_cast<StateId>(s), std::move(arcs));
  }
  out.SetInputSymbols(internal::PermuteSymbols(f.InputSymbols(), map));
  out.Freeze();
  return out;
}

struct LookaheadResult {
  LookaheadTable table;
  Wfst left;                // relabeled and olabel-sorted when relabel=true
  std::vector<Label> map;   // old label -> new label; empty without relabel
};

// Builds the reachability table for the left operand of a composition.
// With relabel=true the output labels are permuted so that labels reached
// from the same set of states become adjacent (labels reached from nowhere go
// last); the returned map must also be applied to the right operand's input
// side (RelabelInputs) before composing.
inline LookaheadResult BuildLookahead(const Wfst &left, bool relabel = false) {
  if (!left.Frozen()) Fail("BuildLookahead: operand must be frozen");
  LookaheadResult r;
  std::vector<std::vector<Label>> labels;
  std::vector<bool> finals;
  internal::ReachableOutputs(left, &labels, &finals);
  if (relabel) {
    size_t n = internal::LabelSpace(left, left.OutputSymbols(), true);
    std::vector<std::vector<StateId>> sig(n);
    for (size_t s = 0; s < labels.size(); ++s)
      for (Label l : labels[s]) sig[l].push_back(static_cast<StateId>(s));
    std::vector<Label> order;
    for (size_t l = 1; l < n; ++l) order.push_back(static_cast<Label>(l));
    std::stable_sort(order.begin(), order.end(), [&](Label a, Label b) {
      if (sig[a].empty() != sig[b].empty()) return !sig[a].empty();
      return sig[a] < sig[b];
    });
    r.map.assign(n, 0);
    for (size_t k = 0; k < order.size(); ++k) r.map[order[k]] = static_cast<Label>(k + 1);
    r.left = ArcSort(RelabelOutputs(left, r.map), SortSide::kOutput);
    for (auto &v : labels) {
      for (Label &l : v) l = r.map[l];
      std::sort(v.begin(), v.end());
    }
    r.table.SetRelabelMap(r.map);
  } else {
    r.left = left;
  }
  for (size_t s = 0; s < labels.size(); ++s) r.table.AddState(labels[s], finals[s]);
  return r;
}

inline constexpr char kLookaheadMagic[8] = "DVLATB1";
inline constexpr uint32_t kLookaheadVersion = 1;

// Layout: magic[8], u32 version, u64 map size, map entries (i32), u64 num
// states, then per state: u8 reaches_final, u64 num intervals, intervals as
// i32 pairs.
inline void WriteLookahead(const LookaheadTable &t, std::ostream &os) {
  using internal::WritePod;
  internal::WriteMagic(os, kLookaheadMagic, kLookaheadVersion);
  WritePod<uint64_t>(os, t.RelabelMap().size());
  for (Label l : t.RelabelMap()) WritePod<int32_t>(os, l);
  WritePod<uint64_t>(os, t.NumStates());
  for (size_t s = 0; s < t.NumStates(); ++s) {
    auto iv = t.Intervals(static_cast<StateId>(s));
    WritePod<uint8_t>(os, t.ReachesFinal(static_cast<StateId>(s)) ? 1 : 0);
    WritePod<uint64_t>(os, iv.size());
    for (const LabelInterval &v : iv) {
      WritePod<int32_t>(os, v.lo);
      WritePod<int32_t>(os, v.hi);
    }
  }
}

inline LookaheadTable ReadLookahead(std::istream &is) {
  using internal::ReadPod;
  internal::ExpectMagic(is, kLookaheadMagic, kLookaheadVersion);
  LookaheadTable t;
  std::vector<Label> map(ReadPod<uint64_t>(is));
  for (Label &l : map) l = ReadPod<int32_t>(is);
  t.SetRelabelMap(std::move(map));
  uint64_t n = ReadPod<uint64_t>(is);
  std::vector<Label> labels;
  for (uint64_t s = 0; s < n; ++s) {
    bool fin = ReadPod<uint8_t>(is) != 0;
    uint64_t k = ReadPod<uint64_t>(is);
    labels.clear();
    for (uint64_t i = 0; i < k; ++i) {
      Label lo = ReadPod<int32_t>(is), hi = ReadPod<int32_t>(is);
      if (hi < lo) Fail("corrupt lookahead table: interval [", lo, ", ", hi, "]");
      for (Label l = lo; l <= hi; ++l) labels.push_back(l);
    }
    t.AddState(labels, fin);
  }
  return t;
}

inline void WriteLookaheadFile(const LookaheadTable &t, const std::string &path) {
  std::ofstream os(path, std::ios::binary);
  if (!os) Fail("cannot write '", path, "'");
  WriteLookahead(t, os);
}

inline LookaheadTable ReadLookaheadFile(const std::string &path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) Fail("cannot open '", path, "'");
  return ReadLookahead(is);
}

}  // namespace dynvoc

#endif  // DYNVOC_LOOKAHEAD_H_
