// include/dynvoc/equiv.h

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

#ifndef DYNVOC_EQUIV_H_
#define DYNVOC_EQUIV_H_

#include <string>
#include <vector>

#include "dynvoc/paths.h"
#include "dynvoc/wfst.h"

namespace dynvoc {

struct EquivalenceOptions {
  size_t max_in = 15;    // emitting units per path
  size_t max_out = 3;    // visible words per path
  double tolerance = 1e-6;
  size_t max_configurations = 4'000'000;
};

struct EquivalenceReport {
  bool equivalent = true;
  double max_weight_delta = 0;
  size_t paths = 0;
  std::string first_difference;
};

// Relabels `f` so that outputs are written in `words` and inputs in `units`
// (matched by symbol name). Auxiliary symbols on either side and $unknown
// become <eps>; a symbol missing from the target table gets a fresh label
// past its end.
inline Wfst CanonicalizeForComparison(const Wfst &f, const SymbolTable &units,
                                      const SymbolTable &words) {
  if (!f.InputSymbols() || !f.OutputSymbols()) Fail("comparison needs symbol tables on both sides");
  auto map_side = [](const SymbolTable &from, const SymbolTable &to) {
    std::vector<Label> m(from.Size());
    Label fresh = static_cast<Label>(to.Size());
    for (size_t k = 1; k < from.Size(); ++k) {
      const std::string &s = from.Symbol(static_cast<Label>(k));
      if ((IsAuxiliarySymbol(s) || s == kUnknownSymbol)) continue;
      Label l = to.Find(s);
      m[k] = l == kNoLabel ? fresh++ : l;
    }
    return m;
  };
  std::vector<Label> im = map_side(*f.InputSymbols(), units);
  std::vector<Label> om = map_side(*f.OutputSymbols(), words);
  Wfst out = f.Thawed();
  for (StateId s = 0; s < static_cast<StateId>(f.NumStates()); ++s) {
    std::vector<Arc> arcs(f.Arcs(s).begin(), f.Arcs(s).end());
    for (Arc &a : arcs) {
      a.ilabel = im.at(a.ilabel);
      a.olabel = om.at(a.olabel);
    }
    out.SetArcs(s, std::move(arcs));
  }
  out.Freeze();
  return out;
}

// Compares best weights of every (units, words) pair up to the bounds in
// `o`. Both graphs are read through a's tables.
inline EquivalenceReport CheckEquivalence(const Wfst &a, const Wfst &b,
                                          const EquivalenceOptions &o = {}) {
  if (!a.InputSymbols() || !a.OutputSymbols()) Fail("comparison needs symbol tables on both sides");
  Wfst ca = CanonicalizeForComparison(a, *a.InputSymbols(), *a.OutputSymbols());
  Wfst cb = CanonicalizeForComparison(b, *a.InputSymbols(), *a.OutputSymbols());
  PathSet pa = EnumeratePathsBounded(ca, o.max_in, o.max_out, o.max_configurations);
  PathSet pb = EnumeratePathsBounded(cb, o.max_in, o.max_out, o.max_configurations);
  PathSetDiff d = ComparePathSets(pa, pb, o.tolerance);
  EquivalenceReport r;
  r.equivalent = d.equal;
  r.max_weight_delta = d.max_weight_delta;
  r.paths = pa.Size();
  r.first_difference = d.first_difference;
  return r;
}

}  // namespace dynvoc

#endif  // DYNVOC_EQUIV_H_
