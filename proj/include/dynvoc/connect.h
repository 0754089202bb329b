// include/dynvoc/connect.h

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

#ifndef DYNVOC_CONNECT_H_
#define DYNVOC_CONNECT_H_

#include <vector>

#include "dynvoc/wfst.h"

namespace dynvoc {

// Keeps only states that are both accessible and coaccessible; ids are
// renumbered densely in increasing original order. No accepting path gives
// an empty Wfst.
inline Wfst Connect(const Wfst &f) {
  Wfst out;
  out.SetInputSymbols(f.InputSymbols());
  out.SetOutputSymbols(f.OutputSymbols());
  size_t n = f.NumStates();
  if (f.Empty()) {
    out.Freeze();
    return out;
  }
  std::vector<char> access(n, 0), coaccess(n, 0);
  std::vector<StateId> stack{f.Start()};
  access[f.Start()] = 1;
  while (!stack.empty()) {
    StateId s = stack.back();
    stack.pop_back();
    for (const Arc &a : f.Arcs(s))
      if (!access[a.nextstate]) {
        access[a.nextstate] = 1;
        stack.push_back(a.nextstate);
      }
  }
  std::vector<std::vector<StateId>> rev(n);
  for (StateId s = 0; s < static_cast<StateId>(n); ++s)
    for (const Arc &a : f.Arcs(s)) rev[a.nextstate].push_back(s);
  for (StateId s = 0; s < static_cast<StateId>(n); ++s)
    if (f.IsFinal(s)) {
      coaccess[s] = 1;
      stack.push_back(s);
    }
  while (!stack.empty()) {
    StateId t = stack.back();
    stack.pop_back();
    for (StateId s : rev[t])
      if (!coaccess[s]) {
        coaccess[s] = 1;
        stack.push_back(s);
      }
  }
  if (!(access[f.Start()] && coaccess[f.Start()])) {
    out.Freeze();
    return out;
  }
  std::vector<StateId> remap(n, kNoStateId);
  for (StateId s = 0; s < static_cast<StateId>(n); ++s)
    if (access[s] && coaccess[s]) remap[s] = out.AddState();
  for (StateId s = 0; s < static_cast<StateId>(n); ++s) {
    if (remap[s] == kNoStateId) continue;
    out.SetFinal(remap[s], f.Final(s));
    for (const Arc &a : f.Arcs(s))
      if (remap[a.nextstate] != kNoStateId)
        out.AddArc(remap[s], a.ilabel, a.olabel, a.weight, remap[a.nextstate]);
  }
  out.SetStart(remap[f.Start()]);
  out.Freeze();
  return out;
}

}  // namespace dynvoc

#endif  // DYNVOC_CONNECT_H_
