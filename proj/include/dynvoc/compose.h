// include/dynvoc/compose.h

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

#ifndef DYNVOC_COMPOSE_H_
#define DYNVOC_COMPOSE_H_

#include <deque>
#include <map>
#include <tuple>

#include "dynvoc/wfst.h"

namespace dynvoc {

namespace internal {

inline void CheckComposable(const Wfst &a, const Wfst &b) {
  if (a.OutputSymbols() && b.InputSymbols() &&
      !a.OutputSymbols()->CompatibleWith(*b.InputSymbols()))
    Fail("compose: output symbols of the left operand do not match input "
         "symbols of the right operand");
}

}  // namespace internal

// Offline weighted composition with an epsilon-sequencing filter: between two
// matching transitions the left operand takes all of its output-eps moves
// before the right operand takes its input-eps moves, so each pair of
// joinable paths is represented exactly once. Requires the right operand
// ilabel-sorted or the left olabel-sorted (both operands frozen).
inline Wfst Compose(const Wfst &a, const Wfst &b) {
  internal::CheckComposable(a, b);
  if (!b.Has(kILabelSorted) && !a.Has(kOLabelSorted))
    Fail("compose: right operand must be ilabel-sorted or left olabel-sorted");
  Wfst out;
  out.SetInputSymbols(a.InputSymbols());
  out.SetOutputSymbols(b.OutputSymbols());
  if (a.Empty() || b.Empty()) {
    out.Freeze();
    return out;
  }
  // filter state 0: left eps moves still allowed; 1: right eps moves began.
  using Triple = std::tuple<StateId, StateId, int>;
  std::map<Triple, StateId> ids;
  std::deque<Triple> queue;
  auto find = [&](StateId i, StateId j, int fs) {
    Triple t{i, j, fs};
    auto it = ids.find(t);
    if (it != ids.end()) return it->second;
    StateId id = out.AddState();
    ids.emplace(t, id);
    queue.push_back(t);
    return id;
  };
  out.SetStart(find(a.Start(), b.Start(), 0));
  while (!queue.empty()) {
    auto [i, j, fs] = queue.front();
    queue.pop_front();
    StateId src = ids[{i, j, fs}];
    if (a.IsFinal(i) && b.IsFinal(j)) out.SetFinal(src, Times(a.Final(i), b.Final(j)));
    for (const Arc &la : a.Arcs(i)) {
      if (la.olabel == kEpsilon) {
        if (fs == 0)
          out.AddArc(src, la.ilabel, kEpsilon, la.weight, find(la.nextstate, j, 0));
        continue;
      }
      b.ForEachInputMatch(j, la.olabel, [&](const Arc &ra) {
        out.AddArc(src, la.ilabel, ra.olabel, Times(la.weight, ra.weight),
                   find(la.nextstate, ra.nextstate, 0));
      });
    }
    b.ForEachInputMatch(j, kEpsilon, [&](const Arc &ra) {
      out.AddArc(src, kEpsilon, ra.olabel, ra.weight, find(i, ra.nextstate, 1));
    });
  }
  out.Freeze();
  return out;
}

}  // namespace dynvoc

#endif  // DYNVOC_COMPOSE_H_
