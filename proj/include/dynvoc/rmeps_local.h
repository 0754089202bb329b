// include/dynvoc/rmeps_local.h

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

#ifndef DYNVOC_RMEPS_LOCAL_H_
#define DYNVOC_RMEPS_LOCAL_H_

#include <vector>

#include "dynvoc/wfst.h"

namespace dynvoc {

// Removes eps:eps arcs only where no state gains arcs:
//  - a non-negative eps self-loop is dropped (it never wins under min);
//  - an eps arc into an arc-less final state folds into the source's final
//    weight;
//  - an eps arc into a non-final state with a single outgoing arc is replaced
//    by that arc with the weights combined.
// States made unreachable are left in place; run Connect to drop them.
inline Wfst RemoveEpsLocal(const Wfst &f) {
  size_t n = f.NumStates();
  std::vector<std::vector<Arc>> arcs(n);
  std::vector<Weight> finals(n);
  for (StateId s = 0; s < static_cast<StateId>(n); ++s) {
    arcs[s].assign(f.Arcs(s).begin(), f.Arcs(s).end());
    finals[s] = f.Final(s);
  }
  size_t budget = 16 * (f.TotalArcs() + n) + 64;
  bool changed = true;
  while (changed && budget > 0) {
    changed = false;
    for (StateId s = 0; s < static_cast<StateId>(n); ++s) {
      for (size_t k = 0; k < arcs[s].size() && budget > 0;) {
        Arc &a = arcs[s][k];
        if (a.ilabel != kEpsilon || a.olabel != kEpsilon) {
          ++k;
          continue;
        }
        StateId t = a.nextstate;
        if (t == s) {
          if (a.weight.Value() >= 0) {
            arcs[s].erase(arcs[s].begin() + k);
            changed = true;
            --budget;
            continue;
          }
          ++k;
          continue;
        }
        if (arcs[t].empty() && !finals[t].IsZero()) {
          finals[s] = Plus(finals[s], Times(a.weight, finals[t]));
          arcs[s].erase(arcs[s].begin() + k);
          changed = true;
          --budget;
          continue;
        }
        if (arcs[t].size() == 1 && finals[t].IsZero()) {
          const Arc b = arcs[t][0];
          a = Arc(b.ilabel, b.olabel, Times(a.weight, b.weight), b.nextstate);
          changed = true;
          --budget;
          continue;  // re-examine the replacement
        }
        ++k;
      }
    }
  }
  Wfst out = f.Thawed();
  for (StateId s = 0; s < static_cast<StateId>(n); ++s) {
    out.SetArcs(s, std::move(arcs[s]));
    out.SetFinal(s, finals[s]);
  }
  out.Freeze();
  return out;
}

}  // namespace dynvoc

#endif  // DYNVOC_RMEPS_LOCAL_H_
