// include/dynvoc/paths.h

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

#ifndef DYNVOC_PATHS_H_
#define DYNVOC_PATHS_H_

#include <algorithm>
#include <cmath>
#include <deque>
#include <map>
#include <set>
#include <tuple>
#include <vector>

#include "dynvoc/base.h"
#include "dynvoc/wfst.h"

namespace dynvoc {

using LabelSeq = std::vector<Label>;

struct Path {
  LabelSeq in;
  LabelSeq out;
  Weight weight;
};

// Accepting paths keyed by (input, output) label sequences with <eps>
// removed; weights are the min over all paths sharing the key. Sorted
// lexicographically by (in, out).
class PathSet {
 public:
  void Add(const LabelSeq &in, const LabelSeq &out, Weight w) {
    auto [it, inserted] = paths_.try_emplace({in, out}, w);
    if (!inserted) it->second = Plus(it->second, w);
  }

  size_t Size() const { return paths_.size(); }
  bool Empty() const { return paths_.empty(); }

  std::vector<Path> Paths() const {
    std::vector<Path> out;
    out.reserve(paths_.size());
    for (const auto &[k, w] : paths_) out.push_back({k.first, k.second, w});
    return out;
  }

  // Zero when absent.
  Weight Find(const LabelSeq &in, const LabelSeq &out) const {
    auto it = paths_.find({in, out});
    return it == paths_.end() ? Weight::Zero() : it->second;
  }

  const std::map<std::pair<LabelSeq, LabelSeq>, Weight> &Map() const {
    return paths_;
  }

  // Output-side projection: best weight per output sequence.
  PathSet OutputProjection() const {
    PathSet p;
    for (const auto &[k, w] : paths_) p.Add({}, k.second, w);
    return p;
  }

 private:
  std::map<std::pair<LabelSeq, LabelSeq>, Weight> paths_;
};

struct PathSetDiff {
  bool equal = true;
  double max_weight_delta = 0.0;
  std::string first_difference;
};

// Same keys and weights within `tolerance`.
inline PathSetDiff ComparePathSets(const PathSet &a, const PathSet &b,
                                   double tolerance = 1e-9) {
  PathSetDiff d;
  auto describe = [](const std::pair<LabelSeq, LabelSeq> &k) {
    std::string s = "in=[";
    for (Label l : k.first) s += std::to_string(l) + " ";
    s += "] out=[";
    for (Label l : k.second) s += std::to_string(l) + " ";
    return s + "]";
  };
  auto ia = a.Map().begin(), ib = b.Map().begin();
  while (ia != a.Map().end() || ib != b.Map().end()) {
    if (ib == b.Map().end() || (ia != a.Map().end() && ia->first < ib->first)) {
      if (d.equal) d.first_difference = "only in first: " + describe(ia->first);
      d.equal = false;
      ++ia;
    } else if (ia == a.Map().end() || ib->first < ia->first) {
      if (d.equal) d.first_difference = "only in second: " + describe(ib->first);
      d.equal = false;
      ++ib;
    } else {
      double delta = std::fabs(ia->second.Value() - ib->second.Value());
      if (ia->second.IsZero() && ib->second.IsZero()) delta = 0;
      d.max_weight_delta = std::max(d.max_weight_delta, delta);
      if (delta > tolerance) {
        if (d.equal)
          d.first_difference = StrCat("weight ", ia->second, " vs ", ib->second,
                                      " at ", describe(ia->first));
        d.equal = false;
      }
      ++ia;
      ++ib;
    }
  }
  return d;
}

// All accepting paths with at most max_len arcs. Exponential; intended as an
// oracle on small graphs.
inline PathSet EnumeratePaths(const Wfst &f, size_t max_len) {
  PathSet out;
  if (f.Empty()) return out;
  LabelSeq in_seq, out_seq;
  struct Frame {
    StateId state;
    size_t arc;
    Weight weight;
    bool pushed_in, pushed_out;
  };
  std::vector<Frame> stack;
  stack.push_back({f.Start(), 0, Weight::One(), false, false});
  if (f.IsFinal(f.Start())) out.Add({}, {}, f.Final(f.Start()));
  while (!stack.empty()) {
    Frame &top = stack.back();
    auto arcs = f.Arcs(top.state);
    if (stack.size() > max_len || top.arc >= arcs.size()) {
      if (top.pushed_in) in_seq.pop_back();
      if (top.pushed_out) out_seq.pop_back();
      stack.pop_back();
      continue;
    }
    const Arc &a = arcs[top.arc++];
    Weight w = Times(top.weight, a.weight);
    Frame next{a.nextstate, 0, w, a.ilabel != kEpsilon, a.olabel != kEpsilon};
    if (next.pushed_in) in_seq.push_back(a.ilabel);
    if (next.pushed_out) out_seq.push_back(a.olabel);
    if (f.IsFinal(a.nextstate)) out.Add(in_seq, out_seq, Times(w, f.Final(a.nextstate)));
    stack.push_back(next);
  }
  return out;
}

// Best weight for every (input, output) pair with at most max_in input and
// max_out output labels, following any number of eps:eps arcs. Works on
// cyclic graphs provided no negative-weight cycle exists.
inline PathSet EnumeratePathsBounded(const Wfst &f, size_t max_in,
                                     size_t max_out,
                                     size_t max_configurations = 2000000) {
  PathSet out;
  if (f.Empty()) return out;
  using Key = std::tuple<StateId, LabelSeq, LabelSeq>;
  std::map<Key, Weight> best;
  std::deque<Key> queue;
  Key start{f.Start(), {}, {}};
  best[start] = Weight::One();
  queue.push_back(start);
  while (!queue.empty()) {
    Key key = std::move(queue.front());
    queue.pop_front();
    Weight w = best[key];
    const auto &[s, in, o] = key;
    for (const Arc &a : f.Arcs(s)) {
      LabelSeq nin = in, nout = o;
      if (a.ilabel != kEpsilon) nin.push_back(a.ilabel);
      if (a.olabel != kEpsilon) nout.push_back(a.olabel);
      if (nin.size() > max_in || nout.size() > max_out) continue;
      Weight nw = Times(w, a.weight);
      Key nk{a.nextstate, std::move(nin), std::move(nout)};
      auto it = best.find(nk);
      if (it == best.end() || nw.Value() < it->second.Value() - 1e-12) {
        if (it == best.end()) {
          if (best.size() >= max_configurations)
            Fail("EnumeratePathsBounded: configuration limit exceeded");
          best.emplace(nk, nw);
        } else {
          it->second = nw;
        }
        queue.push_back(std::move(nk));
      }
    }
  }
  for (const auto &[key, w] : best) {
    const auto &[s, in, o] = key;
    if (f.IsFinal(s)) out.Add(in, o, Times(w, f.Final(s)));
  }
  return out;
}

// Shortest distance from every state to a final state (label-correcting, so
// negative arcs are fine absent negative cycles).
inline std::vector<Weight> ShortestDistanceToFinal(const Wfst &f) {
  size_t n = f.NumStates();
  std::vector<std::vector<std::pair<StateId, Weight>>> rev(n);
  for (StateId s = 0; s < static_cast<StateId>(n); ++s)
    for (const Arc &a : f.Arcs(s)) rev[a.nextstate].emplace_back(s, a.weight);
  std::vector<Weight> d(n, Weight::Zero());
  std::deque<StateId> queue;
  std::vector<char> queued(n, 0);
  std::vector<size_t> updates(n, 0);
  for (StateId s = 0; s < static_cast<StateId>(n); ++s) {
    if (f.IsFinal(s)) {
      d[s] = f.Final(s);
      queue.push_back(s);
      queued[s] = 1;
    }
  }
  while (!queue.empty()) {
    StateId t = queue.front();
    queue.pop_front();
    queued[t] = 0;
    for (auto [s, w] : rev[t]) {
      Weight cand = Times(w, d[t]);
      if (cand.Value() < d[s].Value() - 1e-12 * (1 + std::fabs(cand.Value()))) {
        d[s] = cand;
        if (++updates[s] > n + 1) Fail("negative-weight cycle detected");
        if (!queued[s]) {
          queued[s] = 1;
          queue.push_back(s);
        }
      }
    }
  }
  return d;
}

struct BestPath {
  LabelSeq ilabels;
  LabelSeq olabels;
  Weight weight;
};

// Single best accepting path; ties (within 1e-9) are broken by the
// lexicographically smallest output label sequence.
inline BestPath ShortestPath(const Wfst &f) {
  if (f.Empty()) Fail("ShortestPath: no accepting path (empty Wfst)");
  std::vector<Weight> d = ShortestDistanceToFinal(f);
  StateId start = f.Start();
  if (d[start].IsZero()) Fail("ShortestPath: no accepting path");
  const double tol = 1e-9;
  auto on_best = [&](StateId s, const Arc &a) {
    if (d[a.nextstate].IsZero()) return false;
    return std::fabs(Times(a.weight, d[a.nextstate]).Value() - d[s].Value()) <=
           tol * (1 + std::fabs(d[s].Value()));
  };
  auto final_best = [&](StateId s) {
    return f.IsFinal(s) && std::fabs(f.Final(s).Value() - d[s].Value()) <=
                               tol * (1 + std::fabs(d[s].Value()));
  };
  // Greedy lexicographic walk over the optimal subgraph. Each frontier entry
  // remembers how it was reached so the input side can be rebuilt.
  struct Node {
    StateId state;
    int prev;
    Label ilabel, olabel;
  };
  std::vector<Node> nodes;
  auto closure = [&](std::vector<int> frontier) {
    std::set<StateId> seen;
    for (int id : frontier) seen.insert(nodes[id].state);
    for (size_t k = 0; k < frontier.size(); ++k) {
      StateId s = nodes[frontier[k]].state;
      for (const Arc &a : f.Arcs(s)) {
        if (a.olabel != kEpsilon || !on_best(s, a)) continue;
        if (!seen.insert(a.nextstate).second) continue;
        nodes.push_back({a.nextstate, frontier[k], a.ilabel, kEpsilon});
        frontier.push_back(static_cast<int>(nodes.size() - 1));
      }
    }
    return frontier;
  };
  nodes.push_back({start, -1, kEpsilon, kEpsilon});
  std::vector<int> frontier = closure({0});
  size_t limit = 4 * f.NumStates() + 8;
  for (size_t step = 0;; ++step) {
    if (step > limit) Fail("ShortestPath: tie-break walk did not terminate");
    int done = -1;
    for (int id : frontier)
      if (final_best(nodes[id].state)) {
        done = id;
        break;
      }
    if (done >= 0) {
      BestPath bp;
      bp.weight = d[start];
      for (int id = done; id > 0; id = nodes[id].prev) {
        if (nodes[id].ilabel != kEpsilon) bp.ilabels.push_back(nodes[id].ilabel);
        if (nodes[id].olabel != kEpsilon) bp.olabels.push_back(nodes[id].olabel);
      }
      std::reverse(bp.ilabels.begin(), bp.ilabels.end());
      std::reverse(bp.olabels.begin(), bp.olabels.end());
      return bp;
    }
    Label min_label = kNoLabel;
    for (int id : frontier)
      for (const Arc &a : f.Arcs(nodes[id].state))
        if (a.olabel != kEpsilon && on_best(nodes[id].state, a) &&
            (min_label == kNoLabel || a.olabel < min_label))
          min_label = a.olabel;
    if (min_label == kNoLabel) Fail("ShortestPath: optimal subgraph is broken");
    std::vector<int> next;
    std::set<StateId> seen;
    for (int id : frontier) {
      StateId s = nodes[id].state;
      for (const Arc &a : f.Arcs(s)) {
        if (a.olabel != min_label || !on_best(s, a)) continue;
        if (!seen.insert(a.nextstate).second) continue;
        nodes.push_back({a.nextstate, id, a.ilabel, a.olabel});
        next.push_back(static_cast<int>(nodes.size() - 1));
      }
    }
    frontier = closure(std::move(next));
  }
}

}  // namespace dynvoc

#endif  // DYNVOC_PATHS_H_
