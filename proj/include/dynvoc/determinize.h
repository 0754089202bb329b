// include/dynvoc/determinize.h

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

#ifndef DYNVOC_DETERMINIZE_H_
#define DYNVOC_DETERMINIZE_H_

#include <algorithm>
#include <cmath>
#include <deque>
#include <map>
#include <tuple>
#include <vector>

#include "dynvoc/paths.h"
#include "dynvoc/wfst.h"

namespace dynvoc {

struct DeterminizeOptions {
  // Output may have at most this many times the input's states.
  double state_budget_factor = 100.0;
  // Residual weights are compared after rounding to this granularity.
  double weight_quantum = 1e-9;
};

namespace internal {

// One member of a determinized state: an input state together with the
// output labels and weight not yet emitted on the way to it.
struct DetElement {
  StateId state;
  LabelSeq residual;
  Weight weight;
};

class Determinizer {
 public:
  Determinizer(const Wfst &f, const DeterminizeOptions &opts)
      : f_(f), opts_(opts) {
    budget_ = static_cast<size_t>(
        std::max(1.0, opts.state_budget_factor * static_cast<double>(f.NumStates())));
  }

  Wfst Run() {
    out_.SetInputSymbols(f_.InputSymbols());
    out_.SetOutputSymbols(f_.OutputSymbols());
    if (f_.Empty()) {
      out_.Freeze();
      return std::move(out_);
    }
    std::vector<DetElement> start = Closure({{f_.Start(), {}, Weight::One()}});
    out_.SetStart(FindState(std::move(start)));
    while (!queue_.empty()) {
      StateId id = queue_.front();
      queue_.pop_front();
      Expand(id);
    }
    out_.Freeze();
    return std::move(out_);
  }

 private:
  using Key = std::vector<std::tuple<StateId, LabelSeq, long long>>;

  void CheckBudget() {
    if (out_.NumStates() > budget_)
      throw DeterminizeBudgetError(StrCat(
          "determinize: state budget of ", budget_,
          " exceeded; input is probably not determinizable"));
  }

  // Follows input-eps arcs, accumulating outputs into the residual.
  std::vector<DetElement> Closure(std::vector<DetElement> elems) {
    std::map<std::pair<StateId, LabelSeq>, Weight> best;
    std::deque<std::pair<StateId, LabelSeq>> queue;
    for (auto &e : elems) {
      auto key = std::make_pair(e.state, e.residual);
      auto [it, ins] = best.try_emplace(key, e.weight);
      if (!ins && e.weight.Value() >= it->second.Value()) continue;
      it->second = Plus(it->second, e.weight);
      queue.push_back(key);
    }
    size_t limit = 64 * (f_.NumStates() + 1);
    while (!queue.empty()) {
      auto key = queue.front();
      queue.pop_front();
      Weight w = best[key];
      for (const Arc &a : f_.Arcs(key.first)) {
        if (a.ilabel != kEpsilon) continue;
        LabelSeq r = key.second;
        if (a.olabel != kEpsilon) r.push_back(a.olabel);
        Weight nw = Times(w, a.weight);
        auto nk = std::make_pair(a.nextstate, std::move(r));
        auto it = best.find(nk);
        if (it != best.end() && nw.Value() >= it->second.Value() - 1e-12) continue;
        if (it == best.end()) {
          if (best.size() > limit)
            throw DeterminizeBudgetError(
                "determinize: epsilon closure does not terminate");
          best.emplace(nk, nw);
        } else {
          it->second = nw;
        }
        queue.push_back(std::move(nk));
      }
    }
    std::vector<DetElement> out;
    out.reserve(best.size());
    for (auto &[k, w] : best) out.push_back({k.first, k.second, w});
    return out;
  }

  long long Quantize(Weight w) const {
    return std::llround(w.Value() / opts_.weight_quantum);
  }

  StateId FindState(std::vector<DetElement> elems) {
    std::sort(elems.begin(), elems.end(), [](const DetElement &a, const DetElement &b) {
      return std::tie(a.state, a.residual) < std::tie(b.state, b.residual);
    });
    Key key;
    key.reserve(elems.size());
    for (const auto &e : elems) key.emplace_back(e.state, e.residual, Quantize(e.weight));
    auto it = ids_.find(key);
    if (it != ids_.end()) return it->second;
    StateId id = out_.AddState();
    CheckBudget();
    ids_.emplace(std::move(key), id);
    if (subsets_.size() <= static_cast<size_t>(id)) subsets_.resize(id + 1);
    subsets_[id] = std::move(elems);
    queue_.push_back(id);
    return id;
  }

  void SetFinal(StateId id) {
    const auto &subset = subsets_[id];
    bool any = false;
    Weight best = Weight::Zero();
    LabelSeq residual;
    for (const auto &e : subset) {
      if (!f_.IsFinal(e.state)) continue;
      Weight w = Times(e.weight, f_.Final(e.state));
      if (any && e.residual != residual)
        Fail("determinize: input is not functional (two outputs for one input)");
      any = true;
      residual = e.residual;
      best = Plus(best, w);
    }
    if (!any) return;
    if (residual.empty()) {
      out_.SetFinal(id, best);
      return;
    }
    // Pending output is flushed through an <eps>-input chain.
    StateId cur = id;
    for (Label l : residual) {
      StateId next = out_.AddState();
      out_.AddArc(cur, kEpsilon, l, Weight::One(), next);
      cur = next;
    }
    out_.SetFinal(cur, best);
  }

  void Expand(StateId id) {
    SetFinal(id);
    std::map<Label, std::vector<DetElement>> by_label;
    for (const auto &e : subsets_[id]) {
      for (const Arc &a : f_.Arcs(e.state)) {
        if (a.ilabel == kEpsilon) continue;
        LabelSeq r = e.residual;
        if (a.olabel != kEpsilon) r.push_back(a.olabel);
        by_label[a.ilabel].push_back({a.nextstate, std::move(r), Times(e.weight, a.weight)});
      }
    }
    for (auto &[label, elems] : by_label) {
      std::vector<DetElement> dest = Closure(std::move(elems));
      Weight w = Weight::Zero();
      for (const auto &e : dest) w = Plus(w, e.weight);
      // Emit the first label of the common residual prefix, if any.
      Label olabel = kEpsilon;
      const LabelSeq &first = dest.front().residual;
      if (!first.empty()) {
        olabel = first[0];
        for (const auto &e : dest)
          if (e.residual.empty() || e.residual[0] != olabel) {
            olabel = kEpsilon;
            break;
          }
      }
      for (auto &e : dest) {
        e.weight = Divide(e.weight, w);
        if (olabel != kEpsilon) e.residual.erase(e.residual.begin());
      }
      StateId next = FindState(std::move(dest));
      out_.AddArc(id, label, olabel, w, next);
    }
  }

  const Wfst &f_;
  DeterminizeOptions opts_;
  size_t budget_;
  Wfst out_;
  std::map<Key, StateId> ids_;
  std::vector<std::vector<DetElement>> subsets_;  // indexed by output state
  std::deque<StateId> queue_;
};

}  // namespace internal

// Weighted subset construction with residual weights and residual output
// strings. Input <eps> arcs are absorbed into subsets. The input must be
// functional; inputs without the twins property exceed the state budget and
// raise DeterminizeBudgetError.
inline Wfst Determinize(const Wfst &f, const DeterminizeOptions &opts = {}) {
  return internal::Determinizer(f, opts).Run();
}

}  // namespace dynvoc

#endif  // DYNVOC_DETERMINIZE_H_
