// include/dynvoc/push.h

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

#ifndef DYNVOC_PUSH_H_
#define DYNVOC_PUSH_H_

#include <deque>
#include <optional>
#include <vector>

#include "dynvoc/paths.h"
#include "dynvoc/wfst.h"

namespace dynvoc {

namespace internal {

inline bool HasIncomingArcs(const Wfst &f, StateId target) {
  for (StateId s = 0; s < static_cast<StateId>(f.NumStates()); ++s)
    for (const Arc &a : f.Arcs(s))
      if (a.nextstate == target) return true;
  return false;
}

}  // namespace internal

// Moves weight toward the initial state using the shortest distance to a
// final state as potential. If the start state has incoming arcs a fresh
// start state carries the total weight. Every accessible state must be
// coaccessible.
inline Wfst PushWeights(const Wfst &f) {
  if (f.Empty()) return Frozen(f.Thawed());
  std::vector<Weight> d = ShortestDistanceToFinal(f);
  for (StateId s = 0; s < static_cast<StateId>(f.NumStates()); ++s)
    if (d[s].IsZero())
      Fail("PushWeights: state ", s,
           " cannot reach a final state; run Connect first");
  Wfst out = f.Thawed();
  for (StateId s = 0; s < static_cast<StateId>(f.NumStates()); ++s) {
    std::vector<Arc> arcs(f.Arcs(s).begin(), f.Arcs(s).end());
    for (Arc &a : arcs)
      a.weight = Divide(Times(a.weight, d[a.nextstate]), d[s]);
    out.SetArcs(s, std::move(arcs));
    if (f.IsFinal(s)) out.SetFinal(s, Divide(f.Final(s), d[s]));
  }
  StateId start = f.Start();
  Weight total = d[start];
  StateId new_start = start;
  if (internal::HasIncomingArcs(f, start)) {
    new_start = out.AddState();
    for (const Arc &a : out.Arcs(start)) out.AddArc(new_start, a);
    out.SetFinal(new_start, out.Final(start));
  }
  std::vector<Arc> arcs(out.Arcs(new_start).begin(), out.Arcs(new_start).end());
  for (Arc &a : arcs) a.weight = Times(total, a.weight);
  out.SetArcs(new_start, std::move(arcs));
  if (out.IsFinal(new_start)) out.SetFinal(new_start, Times(total, out.Final(new_start)));
  out.SetStart(new_start);
  out.Freeze();
  return out;
}

// Moves output labels toward the initial state: each state's potential is
// the longest common prefix of the output strings of its accepting suffixes.
// Arcs whose new output exceeds one label become chains with <eps> input.
// Arcs into states that cannot reach a final state are dropped.
inline Wfst PushLabels(const Wfst &f) {
  if (f.Empty()) return Frozen(f.Thawed());
  size_t n = f.NumStates();
  std::vector<std::optional<LabelSeq>> pot(n);
  std::vector<std::vector<std::pair<StateId, Label>>> rev(n);
  for (StateId s = 0; s < static_cast<StateId>(n); ++s)
    for (const Arc &a : f.Arcs(s)) rev[a.nextstate].emplace_back(s, a.olabel);
  std::deque<StateId> queue;
  for (StateId s = 0; s < static_cast<StateId>(n); ++s)
    if (f.IsFinal(s)) {
      pot[s] = LabelSeq{};
      queue.push_back(s);
    }
  while (!queue.empty()) {
    StateId t = queue.front();
    queue.pop_front();
    for (auto [s, olabel] : rev[t]) {
      LabelSeq cand;
      if (olabel != kEpsilon) cand.push_back(olabel);
      cand.insert(cand.end(), pot[t]->begin(), pot[t]->end());
      if (!pot[s]) {
        pot[s] = std::move(cand);
        queue.push_back(s);
        continue;
      }
      size_t k = 0;
      while (k < pot[s]->size() && k < cand.size() && (*pot[s])[k] == cand[k]) ++k;
      if (k < pot[s]->size()) {
        pot[s]->resize(k);
        queue.push_back(s);
      }
    }
  }
  Wfst out;
  out.SetInputSymbols(f.InputSymbols());
  out.SetOutputSymbols(f.OutputSymbols());
  out.AddStates(n);
  auto emit = [&](StateId src, Label ilabel, const LabelSeq &outs, Weight w,
                  StateId dst) {
    if (outs.size() <= 1) {
      out.AddArc(src, ilabel, outs.empty() ? kEpsilon : outs[0], w, dst);
      return;
    }
    StateId cur = src;
    for (size_t k = 0; k < outs.size(); ++k) {
      StateId next = k + 1 == outs.size() ? dst : out.AddState();
      out.AddArc(cur, k == 0 ? ilabel : kEpsilon, outs[k],
                 k == 0 ? w : Weight::One(), next);
      cur = next;
    }
  };
  auto residual = [&](StateId s, const Arc &a) {
    LabelSeq full;
    if (a.olabel != kEpsilon) full.push_back(a.olabel);
    full.insert(full.end(), pot[a.nextstate]->begin(), pot[a.nextstate]->end());
    return LabelSeq(full.begin() + static_cast<long>(pot[s]->size()), full.end());
  };
  for (StateId s = 0; s < static_cast<StateId>(n); ++s) {
    out.SetFinal(s, f.Final(s));
    if (!pot[s]) continue;
    for (const Arc &a : f.Arcs(s)) {
      if (!pot[a.nextstate]) continue;
      emit(s, a.ilabel, residual(s, a), a.weight, a.nextstate);
    }
  }
  StateId start = f.Start();
  if (!pot[start] || pot[start]->empty()) {
    out.SetStart(start);
    out.Freeze();
    return out;
  }
  // Emit the start potential on the way out of the start state.
  StateId new_start = start;
  if (internal::HasIncomingArcs(f, start)) new_start = out.AddState();
  out.SetArcs(new_start, {});
  for (const Arc &a : f.Arcs(start)) {
    if (!pot[a.nextstate]) continue;
    LabelSeq outs = *pot[start];
    LabelSeq r = residual(start, a);
    outs.insert(outs.end(), r.begin(), r.end());
    emit(new_start, a.ilabel, outs, a.weight, a.nextstate);
  }
  out.SetStart(new_start);
  out.Freeze();
  return out;
}

}  // namespace dynvoc

#endif  // DYNVOC_PUSH_H_
