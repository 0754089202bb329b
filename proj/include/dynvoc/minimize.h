// include/dynvoc/minimize.h

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

#ifndef DYNVOC_MINIMIZE_H_
#define DYNVOC_MINIMIZE_H_

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <tuple>
#include <vector>

#include "dynvoc/connect.h"
#include "dynvoc/paths.h"
#include "dynvoc/wfst.h"

namespace dynvoc {

// Weight-pushes, encodes each arc's (ilabel, olabel, weight) as one symbol,
// and merges states by partition refinement (Moore) on the encoded
// automaton. The result never has more states than the input. Input must be
// deterministic.
inline Wfst Minimize(const Wfst &f, double weight_quantum = 1e-9) {
  if (!f.Frozen()) Fail("minimize: input must be frozen");
  if (!f.Has(kIDeterministic)) Fail("minimize: input must be deterministic");
  Wfst c = Connect(f);
  if (c.Empty()) return c;
  size_t n = c.NumStates();
  std::vector<Weight> d = ShortestDistanceToFinal(c);
  Weight total = d[c.Start()];
  auto q = [&](Weight w) -> long long {
    if (w.IsZero()) return std::numeric_limits<long long>::max();
    return std::llround(w.Value() / weight_quantum);
  };
  // Pushed arcs and finals; the start potential moves onto the finals so no
  // extra state is needed.
  std::vector<std::vector<Arc>> arcs(n);
  std::vector<Weight> finals(n);
  for (StateId s = 0; s < static_cast<StateId>(n); ++s) {
    for (const Arc &a : c.Arcs(s))
      arcs[s].emplace_back(a.ilabel, a.olabel,
                           Divide(Times(a.weight, d[a.nextstate]), d[s]), a.nextstate);
    finals[s] = c.IsFinal(s) ? Times(Divide(c.Final(s), d[s]), total) : Weight::Zero();
  }
  std::vector<int> cls(n);
  {
    std::map<long long, int> ids;
    for (size_t s = 0; s < n; ++s)
      cls[s] = ids.try_emplace(q(finals[s]), static_cast<int>(ids.size())).first->second;
  }
  size_t num_classes = 0;
  using Sig = std::pair<int, std::vector<std::tuple<Label, Label, long long, int>>>;
  while (true) {
    std::map<Sig, int> ids;
    std::vector<int> next(n);
    for (size_t s = 0; s < n; ++s) {
      Sig sig;
      sig.first = cls[s];
      for (const Arc &a : arcs[s])
        sig.second.emplace_back(a.ilabel, a.olabel, q(a.weight), cls[a.nextstate]);
      std::sort(sig.second.begin(), sig.second.end());
      next[s] = ids.try_emplace(std::move(sig), static_cast<int>(ids.size())).first->second;
    }
    cls = std::move(next);
    if (ids.size() == num_classes) break;
    num_classes = ids.size();
  }
  Wfst out;
  out.SetInputSymbols(c.InputSymbols());
  out.SetOutputSymbols(c.OutputSymbols());
  out.AddStates(num_classes);
  std::vector<char> built(num_classes, 0);
  for (size_t s = 0; s < n; ++s) {
    int k = cls[s];
    if (built[k]) continue;
    built[k] = 1;
    out.SetFinal(k, finals[s]);
    for (const Arc &a : arcs[s])
      out.AddArc(k, a.ilabel, a.olabel, a.weight, cls[a.nextstate]);
  }
  out.SetStart(cls[c.Start()]);
  out.Freeze();
  return out;
}

}  // namespace dynvoc

#endif  // DYNVOC_MINIMIZE_H_
