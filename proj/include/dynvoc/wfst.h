// include/dynvoc/wfst.h

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

#ifndef DYNVOC_WFST_H_
#define DYNVOC_WFST_H_

#include <algorithm>
#include <cstdint>
#include <span>
#include <tuple>
#include <vector>

#include "dynvoc/base.h"
#include "dynvoc/symbol_table.h"
#include "dynvoc/weight.h"

namespace dynvoc {

struct Arc {
  Label ilabel = kEpsilon;
  Label olabel = kEpsilon;
  Weight weight = Weight::One();
  StateId nextstate = kNoStateId;

  Arc() = default;
  Arc(Label i, Label o, Weight w, StateId n)
      : ilabel(i), olabel(o), weight(w), nextstate(n) {}

  friend bool operator==(const Arc &a, const Arc &b) {
    return a.ilabel == b.ilabel && a.olabel == b.olabel &&
           a.weight == b.weight && a.nextstate == b.nextstate;
  }
};

// Property bits cached by Freeze().
enum Property : uint32_t {
  kAcceptor = 1u << 0,        // ilabel == olabel on every arc
  kILabelSorted = 1u << 1,    // arcs at every state sorted by ilabel
  kOLabelSorted = 1u << 2,    // arcs at every state sorted by olabel
  kIDeterministic = 1u << 3,  // no shared ilabel; no input-eps arc beside others
  kNoIEpsilons = 1u << 4,     // no arc with ilabel <eps>
  kNoOEpsilons = 1u << 5,     // no arc with olabel <eps>
  kAcyclic = 1u << 6,
};

enum class SortSide { kInput, kOutput };

class Wfst;
uint32_t ComputeProperties(const Wfst &f);

// Mutable while being built; Freeze() makes it read-only and caches
// properties. Frozen values are safe to share between threads.
class Wfst {
 public:
  Wfst() = default;

  StateId AddState() {
    CheckMutable();
    states_.emplace_back();
    return static_cast<StateId>(states_.size() - 1);
  }

  void AddStates(size_t n) {
    CheckMutable();
    states_.resize(states_.size() + n);
  }

  void SetStart(StateId s) {
    CheckMutable();
    CheckState(s);
    start_ = s;
  }

  void SetFinal(StateId s, Weight w) {
    CheckMutable();
    CheckState(s);
    states_[s].final = w;
  }

  void AddArc(StateId s, const Arc &arc) {
    CheckMutable();
    CheckState(s);
    CheckState(arc.nextstate);
    states_[s].arcs.push_back(arc);
  }

  void AddArc(StateId s, Label i, Label o, Weight w, StateId n) {
    AddArc(s, Arc(i, o, w, n));
  }

  // Replaces all arcs of s.
  void SetArcs(StateId s, std::vector<Arc> arcs) {
    CheckMutable();
    CheckState(s);
    for (const Arc &a : arcs) CheckState(a.nextstate);
    states_[s].arcs = std::move(arcs);
  }

  void SetInputSymbols(SymbolTablePtr t) {
    CheckMutable();
    isyms_ = std::move(t);
  }
  void SetOutputSymbols(SymbolTablePtr t) {
    CheckMutable();
    osyms_ = std::move(t);
  }

  void Freeze() {
    if (frozen_) return;
    if (start_ == kNoStateId && !states_.empty())
      Fail("cannot freeze a non-empty Wfst without a start state");
    properties_ = ComputeProperties(*this);
    frozen_ = true;
  }

  // Mutable deep copy.
  Wfst Thawed() const {
    Wfst copy = *this;
    copy.frozen_ = false;
    copy.properties_ = 0;
    return copy;
  }

  bool Frozen() const { return frozen_; }
  StateId Start() const { return start_; }
  size_t NumStates() const { return states_.size(); }
  bool Empty() const { return start_ == kNoStateId; }
  Weight Final(StateId s) const { return states_[s].final; }
  bool IsFinal(StateId s) const { return !states_[s].final.IsZero(); }
  std::span<const Arc> Arcs(StateId s) const { return states_[s].arcs; }
  size_t NumArcs(StateId s) const { return states_[s].arcs.size(); }

  size_t TotalArcs() const {
    size_t n = 0;
    for (const auto &st : states_) n += st.arcs.size();
    return n;
  }

  const SymbolTablePtr &InputSymbols() const { return isyms_; }
  const SymbolTablePtr &OutputSymbols() const { return osyms_; }

  // Only valid on frozen values; mutable ones report no properties.
  uint32_t Properties() const { return frozen_ ? properties_ : 0; }
  bool Has(uint32_t props) const { return (Properties() & props) == props; }

  // Arcs at s whose ilabel equals `label`; binary search when ilabel-sorted.
  template <typename F>
  void ForEachInputMatch(StateId s, Label label, F &&fn) const {
    const auto &arcs = states_[s].arcs;
    if (Has(kILabelSorted)) {
      auto it = std::lower_bound(
          arcs.begin(), arcs.end(), label,
          [](const Arc &a, Label l) { return a.ilabel < l; });
      for (; it != arcs.end() && it->ilabel == label; ++it) fn(*it);
    } else {
      for (const Arc &a : arcs)
        if (a.ilabel == label) fn(a);
    }
  }

  template <typename F>
  void ForEachArc(StateId s, F &&fn) const {
    for (const Arc &a : states_[s].arcs) fn(a);
  }

  friend bool operator==(const Wfst &a, const Wfst &b) {
    if (a.start_ != b.start_ || a.states_.size() != b.states_.size())
      return false;
    for (size_t s = 0; s < a.states_.size(); ++s) {
      if (a.states_[s].final != b.states_[s].final) return false;
      if (a.states_[s].arcs != b.states_[s].arcs) return false;
    }
    return true;
  }

 private:
  struct State {
    std::vector<Arc> arcs;
    Weight final = Weight::Zero();
  };

  void CheckMutable() const {
    if (frozen_) Fail("attempt to mutate a frozen Wfst");
  }
  void CheckState(StateId s) const {
    if (s < 0 || static_cast<size_t>(s) >= states_.size())
      Fail("invalid state id ", s, " (Wfst has ", states_.size(), " states)");
  }

  std::vector<State> states_;
  StateId start_ = kNoStateId;
  SymbolTablePtr isyms_;
  SymbolTablePtr osyms_;
  uint32_t properties_ = 0;
  bool frozen_ = false;
};

namespace internal {

inline bool IsCyclic(const Wfst &f) {
  // Iterative DFS with colors.
  size_t n = f.NumStates();
  std::vector<uint8_t> color(n, 0);
  std::vector<std::pair<StateId, size_t>> stack;
  for (size_t root = 0; root < n; ++root) {
    if (color[root]) continue;
    stack.emplace_back(static_cast<StateId>(root), 0);
    color[root] = 1;
    while (!stack.empty()) {
      auto &[s, pos] = stack.back();
      auto arcs = f.Arcs(s);
      if (pos < arcs.size()) {
        StateId t = arcs[pos++].nextstate;
        if (color[t] == 1) return true;
        if (color[t] == 0) {
          color[t] = 1;
          stack.emplace_back(t, 0);
        }
      } else {
        color[s] = 2;
        stack.pop_back();
      }
    }
  }
  return false;
}

}  // namespace internal

inline uint32_t ComputeProperties(const Wfst &f) {
  uint32_t props = kAcceptor | kILabelSorted | kOLabelSorted |
                   kIDeterministic | kNoIEpsilons | kNoOEpsilons;
  std::vector<Label> labels;
  for (StateId s = 0; s < static_cast<StateId>(f.NumStates()); ++s) {
    auto arcs = f.Arcs(s);
    labels.clear();
    bool has_ieps = false;
    for (size_t k = 0; k < arcs.size(); ++k) {
      const Arc &a = arcs[k];
      if (a.ilabel != a.olabel) props &= ~kAcceptor;
      if (a.ilabel == kEpsilon) {
        props &= ~kNoIEpsilons;
        has_ieps = true;
      }
      if (a.olabel == kEpsilon) props &= ~kNoOEpsilons;
      if (k > 0 && arcs[k - 1].ilabel > a.ilabel) props &= ~kILabelSorted;
      if (k > 0 && arcs[k - 1].olabel > a.olabel) props &= ~kOLabelSorted;
      labels.push_back(a.ilabel);
    }
    std::sort(labels.begin(), labels.end());
    if (std::adjacent_find(labels.begin(), labels.end()) != labels.end() ||
        (has_ieps && arcs.size() > 1))
      props &= ~kIDeterministic;
  }
  if (!internal::IsCyclic(f)) props |= kAcyclic;
  return props;
}

// Returns a frozen copy with arcs at each state stably sorted by the chosen
// label (ties broken by the other label, then nextstate, then weight).
inline Wfst ArcSort(const Wfst &f, SortSide side) {
  Wfst out = f.Thawed();
  for (StateId s = 0; s < static_cast<StateId>(f.NumStates()); ++s) {
    std::vector<Arc> arcs(f.Arcs(s).begin(), f.Arcs(s).end());
    auto key = [side](const Arc &a) {
      return side == SortSide::kInput
                 ? std::make_tuple(a.ilabel, a.olabel, a.nextstate, a.weight.Value())
                 : std::make_tuple(a.olabel, a.ilabel, a.nextstate, a.weight.Value());
    };
    std::stable_sort(arcs.begin(), arcs.end(),
                     [&](const Arc &a, const Arc &b) { return key(a) < key(b); });
    out.SetArcs(s, std::move(arcs));
  }
  out.Freeze();
  return out;
}

// Frozen copy of f (no-op when already frozen).
inline Wfst Frozen(Wfst f) {
  f.Freeze();
  return f;
}

}  // namespace dynvoc

#endif  // DYNVOC_WFST_H_
