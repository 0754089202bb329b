// include/dynvoc/replace.h

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

#ifndef DYNVOC_REPLACE_H_
#define DYNVOC_REPLACE_H_

#include <vector>

#include "dynvoc/wfst.h"

namespace dynvoc {

struct ReplaceSpec {
  const Wfst *root = nullptr;
  // Arcs of root whose olabel equals this are substituted.
  Label nonterminal = kNoLabel;
  const Wfst *body = nullptr;
  // Input label of the entry/exit connector arcs; kNoLabel means <eps>.
  Label epsilon_alias = kNoLabel;
};

namespace internal {

// Picks whichever table extends the other.
inline SymbolTablePtr MergeTables(const SymbolTablePtr &a, const SymbolTablePtr &b) {
  if (!a) return b;
  if (!b) return a;
  if (!a->CompatibleWith(*b)) Fail("replace: incompatible symbol tables");
  return a->Size() >= b->Size() ? a : b;
}

}  // namespace internal

// Substitutes a fresh copy of body for every root arc labeled with the
// nonterminal on its output side: the arc's source enters the copy's start
// with the arc weight, every final state of the copy leaves to the arc's
// destination with its final weight. Connectors read epsilon_alias (or
// <eps>) and write <eps>.
inline Wfst Replace(const ReplaceSpec &spec) {
  if (!spec.root || !spec.body) Fail("replace: root and body are required");
  const Wfst &root = *spec.root;
  const Wfst &body = *spec.body;
  Label nt = spec.nonterminal;
  if (nt == kNoLabel || nt == kEpsilon) Fail("replace: invalid nonterminal label");
  for (StateId s = 0; s < static_cast<StateId>(root.NumStates()); ++s)
    for (const Arc &a : root.Arcs(s))
      if (a.ilabel == nt && a.olabel != nt)
        Fail("replace: nonterminal ", nt, " occurs on the input side of the root");
  for (StateId s = 0; s < static_cast<StateId>(body.NumStates()); ++s)
    for (const Arc &a : body.Arcs(s))
      if (a.ilabel == nt || a.olabel == nt)
        Fail("replace: body contains the nonterminal (recursion is not supported)");

  Label connector = spec.epsilon_alias == kNoLabel ? kEpsilon : spec.epsilon_alias;
  Wfst out;
  out.SetInputSymbols(internal::MergeTables(root.InputSymbols(), body.InputSymbols()));
  out.SetOutputSymbols(internal::MergeTables(root.OutputSymbols(), body.OutputSymbols()));
  out.AddStates(root.NumStates());
  if (root.Empty()) {
    out.Freeze();
    return out;
  }
  out.SetStart(root.Start());
  for (StateId s = 0; s < static_cast<StateId>(root.NumStates()); ++s) {
    out.SetFinal(s, root.Final(s));
    for (const Arc &a : root.Arcs(s)) {
      if (a.olabel != nt) {
        out.AddArc(s, a);
        continue;
      }
      if (body.Empty()) continue;
      StateId offset = static_cast<StateId>(out.NumStates());
      out.AddStates(body.NumStates());
      for (StateId b = 0; b < static_cast<StateId>(body.NumStates()); ++b) {
        for (const Arc &ba : body.Arcs(b))
          out.AddArc(offset + b, ba.ilabel, ba.olabel, ba.weight, offset + ba.nextstate);
        if (body.IsFinal(b))
          out.AddArc(offset + b, connector, kEpsilon, body.Final(b), a.nextstate);
      }
      out.AddArc(s, connector, kEpsilon, a.weight, offset + body.Start());
    }
  }
  out.Freeze();
  return out;
}

}  // namespace dynvoc

#endif  // DYNVOC_REPLACE_H_
