// include/dynvoc/decode.h

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

#ifndef DYNVOC_DECODE_H_
#define DYNVOC_DECODE_H_

#include <algorithm>
#include <concepts>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <iomanip>
#include <istream>
#include <limits>
#include <ostream>
#include <queue>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <type_traits>
#include <unordered_map>
#include <vector>

#include "dynvoc/graph_build.h"
#include "dynvoc/lazy_compose.h"
#include "dynvoc/paths.h"
#include "dynvoc/symbol_table.h"
#include "dynvoc/wfst.h"

namespace dynvoc {

// frames x units matrix of acoustic costs. Unit u (1-based emitting label)
// is column u - 1.
class FrameScores {
 public:
  FrameScores() = default;
  FrameScores(size_t frames, size_t units, double fill = 0.0)
      : frames_(frames), units_(units), data_(frames * units, fill) {}

  size_t NumFrames() const { return frames_; }
  size_t NumUnits() const { return units_; }
  double Cost(size_t t, Label unit) const { return data_[t * units_ + unit - 1]; }
  void SetCost(size_t t, Label unit, double c) { data_[t * units_ + unit - 1] = c; }

  void Validate() const {
    for (double c : data_)
      if (!std::isfinite(c)) Fail("frame scores contain a non-finite cost");
  }

  friend bool operator==(const FrameScores &, const FrameScores &) = default;

 private:
  size_t frames_ = 0;
  size_t units_ = 0;
  std::vector<double> data_;
};

inline FrameScores ReadFrameScores(std::istream &is) {
  size_t frames = 0, units = 0;
  std::string line;
  int lineno = 0;
  while (std::getline(is, line)) {
    ++lineno;
    std::istringstream ls(line);
    if (ls >> frames) {
      if (!(ls >> units) || units == 0) throw ParseError("bad frame-score header", lineno);
      break;
    }
    ls.clear();
    std::string tok;
    if (std::istringstream(line) >> tok) throw ParseError("bad frame-score header", lineno);
  }
  if (units == 0) throw ParseError("missing frame-score header", lineno);
  FrameScores fs(frames, units);
  for (size_t t = 0; t < frames; ++t) {
    if (!std::getline(is, line)) throw ParseError("missing frame row", lineno + 1);
    ++lineno;
    std::istringstream ls(line);
    for (Label u = 1; u <= static_cast<Label>(units); ++u) {
      std::string tok;
      if (!(ls >> tok)) throw ParseError("short frame row", lineno);
      size_t used = 0;
      double c;
      try {
        c = std::stod(tok, &used);
      } catch (const std::exception &) {
        used = 0;
      }
      if (used != tok.size() || !std::isfinite(c)) throw ParseError("bad cost '" + tok + "'", lineno);
      fs.SetCost(t, u, c);
    }
    std::string extra;
    if (ls >> extra) throw ParseError("long frame row", lineno);
  }
  return fs;
}

inline FrameScores ReadFrameScoresFile(const std::string &path) {
  std::ifstream is(path);
  if (!is) Fail("cannot open '", path, "'");
  return ReadFrameScores(is);
}

inline void WriteFrameScores(const FrameScores &fs, std::ostream &os) {
  os << fs.NumFrames() << ' ' << fs.NumUnits() << '\n' << std::setprecision(17);
  for (size_t t = 0; t < fs.NumFrames(); ++t) {
    for (Label u = 1; u <= static_cast<Label>(fs.NumUnits()); ++u)
      os << (u > 1 ? " " : "") << fs.Cost(t, u);
    os << '\n';
  }
}

inline void WriteFrameScoresFile(const FrameScores &fs, const std::string &path) {
  std::ofstream os(path);
  if (!os) Fail("cannot write '", path, "'");
  WriteFrameScores(fs, os);
}

// Decoder view of a graph. States are 64-bit so that composed ids fit.
// A bare Wfst goes through the StaticGraph overload of Decode.
template <typename G>
concept DecodeGraph = !std::same_as<std::remove_cvref_t<G>, Wfst> && requires(G &g, uint64_t s) {
  { g.Start() } -> std::convertible_to<uint64_t>;
  { g.Final(s) } -> std::convertible_to<Weight>;
  { g.OutputSymbols() } -> std::convertible_to<SymbolTablePtr>;
  g.ForEachArc(s, [](Label, Label, Weight, uint64_t) {});
};

class StaticGraph {
 public:
  explicit StaticGraph(const Wfst &f) : f_(f) {
    if (f.Empty()) Fail("decode: empty graph");
  }
  uint64_t Start() const { return static_cast<uint64_t>(f_.Start()); }
  Weight Final(uint64_t s) const { return f_.Final(static_cast<StateId>(s)); }
  SymbolTablePtr OutputSymbols() const { return f_.OutputSymbols(); }
  template <typename F>
  void ForEachArc(uint64_t s, F &&fn) const {
    for (const Arc &a : f_.Arcs(static_cast<StateId>(s))) fn(a.ilabel, a.olabel, a.weight, static_cast<uint64_t>(a.nextstate));
  }

 private:
  const Wfst &f_;
};

template <FstLike Right>
class LazyGraph {
 public:
  explicit LazyGraph(LazyCompose<Right> &lc) : lc_(lc) {
    if (lc.Empty()) Fail("decode: empty graph");
  }
  uint64_t Start() const { return lc_.Start(); }
  Weight Final(uint64_t s) const { return lc_.Expand(s)->final; }
  SymbolTablePtr OutputSymbols() const { return lc_.OutputSymbols(); }
  template <typename F>
  void ForEachArc(uint64_t s, F &&fn) const {
    auto st = lc_.Expand(s);
    for (const ComposedArc &a : st->arcs) fn(a.ilabel, a.olabel, a.weight, a.nextstate);
  }

 private:
  LazyCompose<Right> &lc_;
};

struct BeamConfig {
  double beam = std::numeric_limits<double>::infinity();
  size_t max_active = 0;  // 0 = unlimited
  double self_loop_cost = 0.0;
  // Relaxations per frame in the non-emitting closure before giving up.
  size_t max_relaxations = 10'000'000;

  void Validate() const {
    if (!(beam > 0)) Fail("beam must be positive");
    if (!std::isfinite(self_loop_cost)) Fail("self-loop cost must be finite");
  }
};

struct DecodeStats {
  size_t frames = 0;
  size_t max_tokens = 0;     // largest surviving token set
  size_t tokens_created = 0;
};

struct DecodeResult {
  LabelSeq olabels;                // every non-eps output on the best path
  std::vector<std::string> words;  // olabels minus auxiliary symbols
  Weight weight;
  DecodeStats stats;

  std::string Transcript() const {
    std::string s;
    for (const auto &w : words) s += (s.empty() ? "" : " ") + w;
    return s;
  }
};

namespace internal {

// Output words as shown to users: #-prefixed symbols (phone words,
// disambiguation) and $unknown are dropped.
inline std::vector<std::string> VisibleWords(const LabelSeq &olabels, const SymbolTable *syms) {
  std::vector<std::string> out;
  for (Label l : olabels) {
    std::string w = syms ? syms->Symbol(l) : std::to_string(l);
    if (w.empty() || w[0] == '#' || w == kUnknownSymbol) continue;
    out.push_back(std::move(w));
  }
  return out;
}

// Append-only output history shared by tokens.
struct Traceback {
  struct Node {
    int32_t parent;
    Label olabel;
  };
  std::vector<Node> nodes;

  int32_t Extend(int32_t parent, Label olabel) {
    if (olabel == kEpsilon) return parent;
    nodes.push_back({parent, olabel});
    return static_cast<int32_t>(nodes.size() - 1);
  }
  LabelSeq Collect(int32_t n) const {
    LabelSeq out;
    for (; n >= 0; n = nodes[n].parent) out.push_back(nodes[n].olabel);
    std::reverse(out.begin(), out.end());
    return out;
  }
};

inline void CheckUnit(Label ilabel, const FrameScores &scores) {
  if (ilabel < 0 || static_cast<size_t>(ilabel) > scores.NumUnits())
    Fail("decode: graph input label ", ilabel, " exceeds the ", scores.NumUnits(),
         " scored units");
}

}  // namespace internal

// Token-passing Viterbi beam search. A token is keyed by (graph state, last
// emitted unit); it may re-emit that unit in place at self_loop_cost.
template <DecodeGraph G>
DecodeResult Decode(G &graph, const FrameScores &scores, const BeamConfig &beam = {}) {
  beam.Validate();
  struct Key {
    uint64_t state;
    Label last;
    bool operator==(const Key &) const = default;
  };
  struct KeyHash {
    size_t operator()(const Key &k) const {
      return std::hash<uint64_t>()(k.state * 0x9E3779B97F4A7C15ull ^ static_cast<uint64_t>(k.last));
    }
  };
  struct Token {
    Key key;
    double cost;
    int32_t trace;
  };
  using TokenMap = std::unordered_map<Key, size_t, KeyHash>;

  internal::Traceback tb;
  DecodeStats stats;
  std::vector<Token> cur, next;
  TokenMap index;

  auto relax = [&](std::vector<Token> &toks, const Key &k, double cost, int32_t trace) -> int64_t {
    auto [it, inserted] = index.try_emplace(k, toks.size());
    if (inserted) {
      toks.push_back({k, cost, trace});
      ++stats.tokens_created;
      return static_cast<int64_t>(it->second);
    }
    Token &t = toks[it->second];
    if (cost < t.cost) {
      t.cost = cost;
      t.trace = trace;
      return static_cast<int64_t>(it->second);
    }
    return -1;
  };

  // Cost-ordered non-emitting closure over toks (index must describe toks).
  auto closure = [&](std::vector<Token> &toks) {
    using Item = std::pair<double, size_t>;
    std::priority_queue<Item, std::vector<Item>, std::greater<>> heap;
    for (size_t k = 0; k < toks.size(); ++k) heap.push({toks[k].cost, k});
    size_t relaxations = 0;
    while (!heap.empty()) {
      auto [c, k] = heap.top();
      heap.pop();
      if (c > toks[k].cost) continue;
      Key key = toks[k].key;
      int32_t trace = toks[k].trace;
      graph.ForEachArc(key.state, [&](Label il, Label ol, Weight w, uint64_t n) {
        if (il != kEpsilon) return;
        if (++relaxations > beam.max_relaxations)
          Fail("decode: non-emitting closure did not converge (negative cycle?)");
        double nc = c + w.Value();
        int64_t r = relax(toks, {n, key.last}, nc, tb.Extend(trace, ol));
        if (r >= 0) heap.push({nc, static_cast<size_t>(r)});
      });
    }
  };

  auto prune = [&](std::vector<Token> &toks) {
    if (toks.empty()) return;
    double best = std::numeric_limits<double>::infinity();
    for (const Token &t : toks) best = std::min(best, t.cost);
    double cutoff = best + beam.beam;
    std::vector<Token> kept;
    kept.reserve(toks.size());
    for (const Token &t : toks)
      if (t.cost <= cutoff) kept.push_back(t);
    if (beam.max_active > 0 && kept.size() > beam.max_active) {
      std::nth_element(kept.begin(), kept.begin() + static_cast<std::ptrdiff_t>(beam.max_active) - 1,
                       kept.end(), [](const Token &a, const Token &b) { return a.cost < b.cost; });
      kept.resize(beam.max_active);
    }
    toks = std::move(kept);
  };

  index.clear();
  relax(cur, {graph.Start(), kEpsilon}, 0.0, -1);
  closure(cur);
  prune(cur);
  stats.max_tokens = cur.size();
  for (size_t t = 0; t < scores.NumFrames(); ++t) {
    next.clear();
    index.clear();
    for (const Token &tok : cur) {
      if (tok.key.last != kEpsilon)
        relax(next, tok.key, tok.cost + beam.self_loop_cost + scores.Cost(t, tok.key.last), tok.trace);
      graph.ForEachArc(tok.key.state, [&](Label il, Label ol, Weight w, uint64_t n) {
        if (il == kEpsilon) return;
        internal::CheckUnit(il, scores);
        relax(next, {n, il}, tok.cost + w.Value() + scores.Cost(t, il), tb.Extend(tok.trace, ol));
      });
    }
    closure(next);
    prune(next);
    if (next.empty()) Fail("decode: no surviving token at frame ", t);
    std::swap(cur, next);
    stats.max_tokens = std::max(stats.max_tokens, cur.size());
  }
  stats.frames = scores.NumFrames();

  double best = std::numeric_limits<double>::infinity();
  int32_t best_trace = -1;
  for (const Token &tok : cur) {
    Weight f = graph.Final(tok.key.state);
    if (f.IsZero()) continue;
    double c = tok.cost + f.Value();
    if (c < best) {
      best = c;
      best_trace = tok.trace;
    }
  }
  if (!std::isfinite(best)) Fail("decode: no token reached a final state");
  DecodeResult r;
  r.olabels = tb.Collect(best_trace);
  SymbolTablePtr syms = graph.OutputSymbols();
  r.words = internal::VisibleWords(r.olabels, syms.get());
  r.weight = Weight(best);
  r.stats = stats;
  return r;
}

inline DecodeResult Decode(const Wfst &f, const FrameScores &scores, const BeamConfig &beam = {}) {
  StaticGraph g(f);
  return Decode(g, scores, beam);
}

// Exhaustive Viterbi over every (state, last unit) pair of a materialized
// graph. Non-emitting arcs are relaxed by repeated sweeps until nothing
// changes. Oracle for Decode.
inline DecodeResult ExactDecode(const Wfst &f, const FrameScores &scores,
                                double self_loop_cost = 0.0, size_t max_states = 200000) {
  if (f.Empty()) Fail("exact decode: empty graph");
  if (f.NumStates() > max_states)
    Fail("exact decode: graph has ", f.NumStates(), " states, limit is ", max_states);
  const double inf = std::numeric_limits<double>::infinity();
  const StateId n = static_cast<StateId>(f.NumStates());
  // Pair ids: (s, u) for every unit u that can be the last one emitted on
  // arrival at s, <eps> included. Units travel along non-emitting arcs.
  std::vector<std::set<Label>> reach(n);
  std::vector<StateId> work;
  auto add = [&](StateId s, Label u) {
    if (reach[s].insert(u).second) work.push_back(s);
  };
  for (StateId s = 0; s < n; ++s) add(s, kEpsilon);
  for (StateId s = 0; s < n; ++s)
    for (const Arc &a : f.Arcs(s))
      if (a.ilabel != kEpsilon) {
        internal::CheckUnit(a.ilabel, scores);
        add(a.nextstate, a.ilabel);
      }
  while (!work.empty()) {
    StateId s = work.back();
    work.pop_back();
    for (const Arc &a : f.Arcs(s))
      if (a.ilabel == kEpsilon)
        for (Label u : std::vector<Label>(reach[s].begin(), reach[s].end())) add(a.nextstate, u);
  }
  std::vector<std::vector<Label>> lasts(n);
  std::vector<size_t> base(n + 1, 0);
  for (StateId s = 0; s < n; ++s) {
    lasts[s].assign(reach[s].begin(), reach[s].end());
    base[s + 1] = base[s] + lasts[s].size();
  }
  const size_t np = base[n];
  auto pair_id = [&](StateId s, Label u) {
    auto it = std::lower_bound(lasts[s].begin(), lasts[s].end(), u);
    return base[s] + static_cast<size_t>(it - lasts[s].begin());
  };
  std::vector<StateId> pair_state(np);
  std::vector<Label> pair_last(np);
  for (StateId s = 0; s < n; ++s)
    for (size_t k = 0; k < lasts[s].size(); ++k) {
      pair_state[base[s] + k] = s;
      pair_last[base[s] + k] = lasts[s][k];
    }

  internal::Traceback tb;
  std::vector<double> cost(np, inf), nc(np);
  std::vector<int32_t> trace(np, -1), ntrace(np);
  auto sweep = [&]() {
    for (size_t round = 0;; ++round) {
      if (round > np + 1) Fail("exact decode: non-emitting closure diverges (negative cycle)");
      bool changed = false;
      for (size_t p = 0; p < np; ++p) {
        if (cost[p] == inf) continue;
        for (const Arc &a : f.Arcs(pair_state[p])) {
          if (a.ilabel != kEpsilon) continue;
          size_t q = pair_id(a.nextstate, pair_last[p]);
          double c = cost[p] + a.weight.Value();
          if (c < cost[q] - 1e-12 * std::max(1.0, std::abs(c))) {
            cost[q] = c;
            trace[q] = tb.Extend(trace[p], a.olabel);
            changed = true;
          }
        }
      }
      if (!changed) return;
    }
  };
  cost[pair_id(f.Start(), kEpsilon)] = 0.0;
  sweep();
  for (size_t t = 0; t < scores.NumFrames(); ++t) {
    std::fill(nc.begin(), nc.end(), inf);
    for (size_t p = 0; p < np; ++p) {
      if (cost[p] == inf) continue;
      if (pair_last[p] != kEpsilon) {
        double c = cost[p] + self_loop_cost + scores.Cost(t, pair_last[p]);
        if (c < nc[p]) {
          nc[p] = c;
          ntrace[p] = trace[p];
        }
      }
      for (const Arc &a : f.Arcs(pair_state[p])) {
        if (a.ilabel == kEpsilon) continue;
        size_t q = pair_id(a.nextstate, a.ilabel);
        double c = cost[p] + a.weight.Value() + scores.Cost(t, a.ilabel);
        if (c < nc[q]) {
          nc[q] = c;
          ntrace[q] = tb.Extend(trace[p], a.olabel);
        }
      }
    }
    std::swap(cost, nc);
    std::swap(trace, ntrace);
    sweep();
  }
  double best = inf;
  int32_t best_trace = -1;
  for (size_t p = 0; p < np; ++p) {
    Weight fw = f.Final(pair_state[p]);
    if (cost[p] == inf || fw.IsZero()) continue;
    if (cost[p] + fw.Value() < best) {
      best = cost[p] + fw.Value();
      best_trace = trace[p];
    }
  }
  if (best == inf) Fail("exact decode: no path reaches a final state");
  DecodeResult r;
  r.olabels = tb.Collect(best_trace);
  r.words = internal::VisibleWords(r.olabels, f.OutputSymbols().get());
  r.weight = Weight(best);
  r.stats.frames = scores.NumFrames();
  r.stats.max_tokens = np;
  return r;
}

// Emitting units for a phone string under the given context, using the
// emit table names "<unit>.<q>".
inline LabelSeq UnitsForPhones(const std::vector<std::string> &phones, const SymbolTable &emit,
                               ContextType ctx, int states_per_phone) {
  LabelSeq out;
  std::string prev(kNoContext);
  for (const auto &p : phones) {
    std::string unit = ctx == ContextType::kMono ? p : prev + "/" + p;
    for (int q = 0; q < states_per_phone; ++q) {
      Label l = emit.Find(unit + "." + std::to_string(q));
      if (l == kNoLabel) Fail("no emitting unit for '", unit, ".", q, "'");
      out.push_back(l);
    }
    prev = p;
  }
  return out;
}

struct ScoreGenOptions {
  int min_duration = 1;
  int max_duration = 3;
  double target_cost = 0.5;
  double other_cost = 4.0;
  double noise = 1.0;
  unsigned seed = 1;
};

// Scores in which each target unit, held for a random duration, is cheapest
// on its frames (when noise < other_cost - target_cost).
inline FrameScores GenerateScores(const LabelSeq &units, size_t num_units,
                                  const ScoreGenOptions &o = {}) {
  if (o.min_duration < 1 || o.max_duration < o.min_duration) Fail("bad duration range");
  std::mt19937 rng(o.seed);
  std::uniform_int_distribution<int> dur(o.min_duration, o.max_duration);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::vector<Label> frames;
  for (Label l : units) {
    if (l <= 0 || static_cast<size_t>(l) > num_units) Fail("unit ", l, " out of range");
    frames.insert(frames.end(), static_cast<size_t>(dur(rng)), l);
  }
  FrameScores fs(frames.size(), num_units);
  for (size_t t = 0; t < frames.size(); ++t)
    for (Label k = 1; k <= static_cast<Label>(num_units); ++k)
      fs.SetCost(t, k, (k == frames[t] ? o.target_cost : o.other_cost) + o.noise * u(rng));
  return fs;
}

}  // namespace dynvoc

#endif  // DYNVOC_DECODE_H_
