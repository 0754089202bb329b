// include/dynvoc/lazy_compose.h

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

#ifndef DYNVOC_LAZY_COMPOSE_H_
#define DYNVOC_LAZY_COMPOSE_H_

#include <concepts>
#include <deque>
#include <list>
#include <memory>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "dynvoc/compose.h"
#include "dynvoc/lookahead.h"
#include "dynvoc/wfst.h"

namespace dynvoc {

// What the right operand of a lazy composition must provide. Wfst satisfies
// it; so does the compact single-state vocabulary acceptor.
template <typename F>
concept FstLike = requires(const F &f, StateId s, Label l) {
  { f.Start() } -> std::convertible_to<StateId>;
  { f.NumStates() } -> std::convertible_to<size_t>;
  { f.Final(s) } -> std::convertible_to<Weight>;
  { f.IsFinal(s) } -> std::convertible_to<bool>;
  { f.NumArcs(s) } -> std::convertible_to<size_t>;
  { f.Has(kILabelSorted) } -> std::convertible_to<bool>;
  { f.InputSymbols() } -> std::convertible_to<SymbolTablePtr>;
  { f.OutputSymbols() } -> std::convertible_to<SymbolTablePtr>;
  f.ForEachInputMatch(s, l, [](const Arc &) {});
  f.ForEachArc(s, [](const Arc &) {});
};

struct FilterStack {
  bool eps_matching = true;
  bool reachability = false;
  bool weight_pushing = false;
  bool label_pushing = false;

  void Validate() const {
    if ((weight_pushing || label_pushing) && !reachability)
      Fail("lookahead pushing filters require the reachability filter");
    if (reachability && !eps_matching)
      Fail("the reachability filter requires the epsilon-matching filter");
  }

  bool NeedsLookahead() const { return reachability; }

  std::string Name() const {
    if (!eps_matching) return "none";
    std::string n = "eps";
    if (reachability) n += "+reach";
    if (weight_pushing) n += "+wpush";
    if (label_pushing) n += "+lpush";
    return n;
  }

  static std::vector<FilterStack> AllValid() {
    return {{false, false, false, false}, {true, false, false, false},
            {true, true, false, false},   {true, true, true, false},
            {true, true, false, true},    {true, true, true, true}};
  }
};

enum class PairMode { kArithmetic, kCounter };

// (left state, right state, filter state) <-> composed id. Arithmetic ids are
// (fs * n_right + j) * n_left + i and need no storage; counter ids are dense
// in creation order.
class PairTable {
 public:
  struct Triple {
    StateId left;
    StateId right;
    uint64_t filter;
    friend bool operator==(const Triple &, const Triple &) = default;
  };

  PairTable(PairMode mode, uint64_t n_left, uint64_t n_right, uint64_t n_filter)
      : mode_(mode), n_left_(n_left), n_right_(n_right), n_filter_(n_filter) {
    if (n_left == 0 || n_right == 0 || n_filter == 0) Fail("PairTable: empty dimension");
    if (n_right > UINT64_MAX / n_left || n_filter > UINT64_MAX / (n_left * n_right))
      Fail("PairTable: composed id space overflows 64 bits");
  }

  PairMode Mode() const { return mode_; }

  uint64_t Key(StateId i, StateId j, uint64_t fs) const {
    return (fs * n_right_ + static_cast<uint64_t>(j)) * n_left_ + static_cast<uint64_t>(i);
  }

  uint64_t FindOrAdd(StateId i, StateId j, uint64_t fs) {
    if (i < 0 || static_cast<uint64_t>(i) >= n_left_ || j < 0 ||
        static_cast<uint64_t>(j) >= n_right_ || fs >= n_filter_)
      Fail("PairTable: triple (", i, ", ", j, ", ", fs, ") out of range");
    uint64_t key = Key(i, j, fs);
    if (mode_ == PairMode::kArithmetic) return key;
    auto [it, inserted] = ids_.try_emplace(key, keys_.size());
    if (inserted) keys_.push_back(key);
    return it->second;
  }

  Triple Lookup(uint64_t id) const {
    uint64_t key = id;
    if (mode_ == PairMode::kCounter) {
      if (id >= keys_.size()) Fail("unknown composed state id ", id);
      key = keys_[id];
    } else if (id / n_left_ / n_right_ >= n_filter_) {
      Fail("unknown composed state id ", id);
    }
    return {static_cast<StateId>(key % n_left_),
            static_cast<StateId>(key / n_left_ % n_right_), key / n_left_ / n_right_};
  }

  // Stored entries; arithmetic mode stores nothing.
  size_t Entries() const { return keys_.size(); }

  size_t BytesEstimate() const {
    return keys_.size() * (sizeof(uint64_t) * 3 + 2 * sizeof(void *));
  }

 private:
  PairMode mode_;
  uint64_t n_left_, n_right_, n_filter_;
  std::unordered_map<uint64_t, uint64_t> ids_;
  std::vector<uint64_t> keys_;
};

struct ComposeOptions {
  FilterStack filters;
  PairMode pair_mode = PairMode::kCounter;
  size_t cache_capacity = 0;  // states; 0 = unbounded, else LRU
  const LookaheadTable *lookahead = nullptr;
};

struct ComposedArc {
  Label ilabel;
  Label olabel;
  Weight weight;
  uint64_t nextstate;
  friend bool operator==(const ComposedArc &, const ComposedArc &) = default;
};

struct ComposedState {
  Weight final = Weight::Zero();
  std::vector<ComposedArc> arcs;
};

struct ComposeStats {
  uint64_t states_expanded = 0;  // cache misses
  uint64_t states_cached = 0;
  uint64_t arcs_cached = 0;
  uint64_t pair_table_entries = 0;
  uint64_t peak_cache_bytes = 0;
};

// On-the-fly composition. Operands (and the lookahead table) are borrowed and
// must outlive the session. A session is not thread-safe; use one per thread.
template <FstLike Right>
class LazyCompose {
 public:
  using Triple = PairTable::Triple;

  LazyCompose(const Wfst &left, const Right &right, const ComposeOptions &opts)
      : left_(left), right_(right), opts_(opts), f_(opts.filters),
        pairs_(MakePairTable(left, right, opts)) {
    f_.Validate();
    if (!left.Frozen() || !left.Has(kOLabelSorted))
      Fail("lazy compose: left operand must be frozen and olabel-sorted");
    if (!right.Has(kILabelSorted))
      Fail("lazy compose: right operand must be ilabel-sorted");
    if (left.OutputSymbols() && right.InputSymbols() &&
        !left.OutputSymbols()->CompatibleWith(*right.InputSymbols()))
      Fail("lazy compose: output symbols of the left operand do not match input "
           "symbols of the right operand");
    if (opts.cache_capacity > 0 && opts.pair_mode != PairMode::kArithmetic)
      Fail("lazy compose: a bounded cache requires arithmetic pair indexing");
    if (f_.NeedsLookahead()) {
      if (!opts.lookahead) Fail("lazy compose: lookahead filters need a lookahead table");
      if (opts.lookahead->NumStates() != left.NumStates())
        Fail("lazy compose: lookahead table has ", opts.lookahead->NumStates(),
             " states, left operand has ", left.NumStates());
    }
    if (left.Empty() || right.Start() == kNoStateId) {
      empty_ = true;
      return;
    }
    start_ = pairs_.FindOrAdd(left.Start(), right.Start(), 0);
    Expand(start_);
  }

  bool Empty() const { return empty_; }
  uint64_t Start() const {
    if (empty_) Fail("lazy compose: empty composition has no start state");
    return start_;
  }

  Triple StateTuple(uint64_t id) const { return pairs_.Lookup(id); }

  std::shared_ptr<const ComposedState> Expand(uint64_t id) {
    if (empty_) Fail("lazy compose: empty composition has no states");
    auto it = cache_.find(id);
    if (it != cache_.end()) {
      if (opts_.cache_capacity > 0) lru_.splice(lru_.begin(), lru_, it->second.pos);
      return it->second.state;
    }
    auto st = std::make_shared<const ComposedState>(Compute(id));
    CacheEntry e;
    e.state = st;
    if (opts_.cache_capacity > 0) {
      lru_.push_front(id);
      e.pos = lru_.begin();
    }
    cache_.emplace(id, std::move(e));
    ++stats_.states_expanded;
    stats_.arcs_cached += st->arcs.size();
    while (opts_.cache_capacity > 0 && cache_.size() > opts_.cache_capacity) {
      auto victim = cache_.find(lru_.back());
      stats_.arcs_cached -= victim->second.state->arcs.size();
      cache_.erase(victim);
      lru_.pop_back();
    }
    stats_.states_cached = cache_.size();
    stats_.pair_table_entries = pairs_.Entries();
    stats_.peak_cache_bytes = std::max<uint64_t>(stats_.peak_cache_bytes, BytesEstimate());
    return st;
  }

  const ComposeStats &Stats() const { return stats_; }
  const PairTable &Pairs() const { return pairs_; }
  SymbolTablePtr InputSymbols() const { return left_.InputSymbols(); }
  SymbolTablePtr OutputSymbols() const { return right_.OutputSymbols(); }

 private:
  struct CacheEntry {
    std::shared_ptr<const ComposedState> state;
    std::list<uint64_t>::iterator pos;
  };

  struct Closure {
    std::vector<std::pair<StateId, Weight>> states;
    bool clean = true;  // every eps arc inside has an eps output
  };

  // What lies ahead of a composed state before its next match.
  struct Future {
    bool live = false;
    Weight potential = Weight::One();
    Label push_label = kNoLabel;
  };

  static uint64_t NumOutputLabels(const Right &r) {
    uint64_t n = r.OutputSymbols() ? r.OutputSymbols()->Size() : 1;
    for (size_t s = 0; s < r.NumStates(); ++s)
      r.ForEachArc(static_cast<StateId>(s), [&](const Arc &a) {
        n = std::max<uint64_t>(n, static_cast<uint64_t>(a.olabel) + 1);
      });
    return n;
  }

  static PairTable MakePairTable(const Wfst &l, const Right &r, const ComposeOptions &o) {
    uint64_t nf = (o.filters.eps_matching ? 2 : 1) * (o.filters.weight_pushing ? 2 : 1);
    if (o.filters.label_pushing) nf *= NumOutputLabels(r);
    return PairTable(o.pair_mode, std::max<uint64_t>(l.NumStates(), 1),
                     std::max<uint64_t>(r.NumStates(), 1), nf);
  }

  // fs = (pending * P + pushed) * S + seq
  uint64_t S() const { return f_.eps_matching ? 2 : 1; }
  uint64_t P() const { return f_.weight_pushing ? 2 : 1; }
  uint64_t EncodeFs(int seq, int pushed, Label pending) const {
    return (static_cast<uint64_t>(pending) * P() + pushed) * S() + seq;
  }

  size_t BytesEstimate() const {
    size_t per_state = sizeof(ComposedState) + sizeof(CacheEntry) + 4 * sizeof(void *);
    return stats_.arcs_cached * sizeof(ComposedArc) + cache_.size() * per_state +
           pairs_.BytesEstimate();
  }

  const Closure &RightClosure(StateId j) {
    auto it = closures_.find(j);
    if (it != closures_.end()) return it->second;
    Closure c;
    std::unordered_map<StateId, double> dist{{j, 0.0}};
    std::deque<StateId> queue{j};
    size_t relax = 0, limit = 64 + 16 * right_.NumStates();
    while (!queue.empty()) {
      StateId q = queue.front();
      queue.pop_front();
      double d = dist[q];
      right_.ForEachInputMatch(q, kEpsilon, [&](const Arc &a) {
        if (a.olabel != kEpsilon) c.clean = false;
        double nd = d + a.weight.Value();
        auto [pos, fresh] = dist.try_emplace(a.nextstate, nd);
        if (fresh || nd < pos->second - 1e-12) {
          pos->second = nd;
          if (++relax > limit) Fail("lazy compose: negative eps cycle in right operand");
          queue.push_back(a.nextstate);
        }
      });
    }
    for (const auto &[q, d] : dist) c.states.emplace_back(q, Weight(d));
    std::sort(c.states.begin(), c.states.end(),
              [](const auto &a, const auto &b) { return a.first < b.first; });
    return closures_.emplace(j, std::move(c)).first->second;
  }

  bool LeftHasOutput(StateId i, Label l) const {
    auto arcs = left_.Arcs(i);
    auto it = std::lower_bound(arcs.begin(), arcs.end(), l,
                               [](const Arc &a, Label x) { return a.olabel < x; });
    return it != arcs.end() && it->olabel == l;
  }

  // seq == 1 means the left operand may not move on eps before the next
  // match, so only its own arcs count.
  Future LookAhead(StateId i, StateId j, int seq) {
    uint64_t key = pairs_.Key(i, j, seq);
    auto it = futures_.find(key);
    if (it != futures_.end()) return it->second;
    const LookaheadTable &t = *opts_.lookahead;
    bool direct = seq == 1;
    bool fin_i = direct ? left_.IsFinal(i) : t.ReachesFinal(i);
    const Closure &c = RightClosure(j);
    Future r;
    Weight best = Weight::Zero();
    bool final_possible = false, conflict = false;
    Label out = kNoLabel;
    auto visit = [&](const Arc &a, Weight d) {
      r.live = true;
      best = Plus(best, Times(d, a.weight));
      if (out == kNoLabel) out = a.olabel;
      else if (out != a.olabel) conflict = true;
    };
    for (const auto &[q, d] : c.states) {
      if (fin_i && right_.IsFinal(q)) {
        r.live = true;
        final_possible = true;
        best = Plus(best, Times(d, right_.Final(q)));
      }
      if (direct) {
        Label prev = kNoLabel;
        for (const Arc &la : left_.Arcs(i)) {
          if (la.olabel == kEpsilon || la.olabel == prev) continue;
          prev = la.olabel;
          right_.ForEachInputMatch(q, la.olabel, [&](const Arc &a) { visit(a, d); });
        }
      } else if (t.Count(i) < right_.NumArcs(q)) {
        for (const LabelInterval &v : t.Intervals(i))
          for (Label l = v.lo; l <= v.hi; ++l)
            right_.ForEachInputMatch(q, l, [&](const Arc &a) { visit(a, d); });
      } else {
        right_.ForEachArc(q, [&](const Arc &a) {
          if (a.ilabel != kEpsilon && t.Contains(i, a.ilabel)) visit(a, d);
        });
      }
    }
    if (r.live) r.potential = best;
    if (r.live && !final_possible && c.clean && !conflict && out != kEpsilon) r.push_label = out;
    futures_.emplace(key, r);
    return r;
  }

  ComposedState Compute(uint64_t id) {
    Triple tr = pairs_.Lookup(id);
    StateId i = tr.left, j = tr.right;
    int seq = static_cast<int>(tr.filter % S());
    int pushed = static_cast<int>(tr.filter / S() % P());
    Label pending = static_cast<Label>(tr.filter / S() / P());
    Weight base = Weight::One();
    if (pushed) base = LookAhead(i, j, seq).potential;

    ComposedState st;
    if (left_.IsFinal(i) && right_.IsFinal(j) && pending == 0)
      st.final = Divide(Times(left_.Final(i), right_.Final(j)), base);

    auto emit = [&](Label il, Label ol, Weight w, StateId ni, StateId nj, int nseq,
                    Label npending) {
      int npushed = 0;
      if (f_.reachability) {
        Future fu = LookAhead(ni, nj, nseq);
        if (!fu.live) return;
        if (f_.weight_pushing) {
          w = Times(w, fu.potential);
          npushed = 1;
        }
        if (f_.label_pushing && ol == kEpsilon && npending == 0 && fu.push_label != kNoLabel) {
          ol = fu.push_label;
          npending = fu.push_label;
        }
      }
      if (!base.IsZero()) w = Divide(w, base);
      uint64_t next = pairs_.FindOrAdd(ni, nj, EncodeFs(nseq, npushed, npending));
      st.arcs.push_back({il, ol, w, next});
    };

    for (const Arc &la : left_.Arcs(i)) {
      if (la.olabel == kEpsilon) {
        if (seq == 0) emit(la.ilabel, kEpsilon, la.weight, la.nextstate, j, 0, pending);
        continue;
      }
      right_.ForEachInputMatch(j, la.olabel, [&](const Arc &ra) {
        Label ol = ra.olabel;
        Label np = pending;
        if (pending != 0) {
          if (ol != pending) Fail("lazy compose: pushed label ", pending, " not matched");
          ol = kEpsilon;
          np = 0;
        }
        emit(la.ilabel, ol, Times(la.weight, ra.weight), la.nextstate, ra.nextstate, 0, np);
      });
    }
    right_.ForEachInputMatch(j, kEpsilon, [&](const Arc &ra) {
      if (pending != 0 && ra.olabel != kEpsilon)
        Fail("lazy compose: output on right eps arc after a pushed label");
      emit(kEpsilon, ra.olabel, ra.weight, i, ra.nextstate, f_.eps_matching ? 1 : 0, pending);
    });
    return st;
  }

  const Wfst &left_;
  const Right &right_;
  ComposeOptions opts_;
  FilterStack f_;
  PairTable pairs_;
  bool empty_ = false;
  uint64_t start_ = 0;
  std::unordered_map<uint64_t, CacheEntry> cache_;
  std::list<uint64_t> lru_;
  std::unordered_map<StateId, Closure> closures_;
  std::unordered_map<uint64_t, Future> futures_;
  ComposeStats stats_;
};

// Expands every reachable composed state into a static Wfst (ids renumbered
// densely in BFS order).
template <FstLike Right>
Wfst Materialize(LazyCompose<Right> &lc, size_t max_states = 10000000) {
  Wfst out;
  out.SetInputSymbols(lc.InputSymbols());
  out.SetOutputSymbols(lc.OutputSymbols());
  if (lc.Empty()) {
    out.Freeze();
    return out;
  }
  std::unordered_map<uint64_t, StateId> ids;
  std::deque<uint64_t> queue;
  auto find = [&](uint64_t id) {
    auto [it, inserted] = ids.try_emplace(id, static_cast<StateId>(ids.size()));
    if (inserted) {
      if (ids.size() > max_states) Fail("Materialize: more than ", max_states, " states");
      out.AddState();
      queue.push_back(id);
    }
    return it->second;
  };
  out.SetStart(find(lc.Start()));
  while (!queue.empty()) {
    uint64_t id = queue.front();
    queue.pop_front();
    StateId s = ids[id];
    auto st = lc.Expand(id);
    out.SetFinal(s, st->final);
    for (const ComposedArc &a : st->arcs) out.AddArc(s, a.ilabel, a.olabel, a.weight, find(a.nextstate));
  }
  out.Freeze();
  return out;
}

}  // namespace dynvoc

#endif  // DYNVOC_LAZY_COMPOSE_H_
