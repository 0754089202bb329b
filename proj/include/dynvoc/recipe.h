// include/dynvoc/recipe.h

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

#ifndef DYNVOC_RECIPE_H_
#define DYNVOC_RECIPE_H_

#include <cctype>
#include <filesystem>
#include <fstream>
#include <istream>
#include <map>
#include <memory>
#include <set>
#include <sstream>
#include <string>
#include <variant>
#include <vector>

#include "dynvoc/arpa.h"
#include "dynvoc/compose.h"
#include "dynvoc/connect.h"
#include "dynvoc/decode.h"
#include "dynvoc/determinize.h"
#include "dynvoc/graph_build.h"
#include "dynvoc/io.h"
#include "dynvoc/lazy_compose.h"
#include "dynvoc/lexicon.h"
#include "dynvoc/lookahead.h"
#include "dynvoc/minimize.h"
#include "dynvoc/push.h"
#include "dynvoc/vocab_expand.h"

namespace dynvoc {

// Recipe text, one statement per line ('#' starts a comment):
//
//   set <key> = <value>
//   <name> = <op>(<arg>, ..., <key>=<value>, ...)
//
// The last statement must be `result = static(X)` or `result = lazy(X, Y)`.
struct RecipeStep {
  std::string target;
  std::string op;
  std::vector<std::string> args;
  std::map<std::string, std::string> kwargs;
  int line = 0;
};

struct Recipe {
  std::string name;
  std::map<std::string, std::string> settings;
  std::vector<RecipeStep> steps;
};

inline const std::map<std::string, std::string> &DefaultRecipeSettings() {
  static const std::map<std::string, std::string> d = {
      {"context", "mono"},        {"hmm_states", "3"},      {"hash0", "off"},
      {"phone_words", "self-loop"}, {"sil_phone_word", "on"}, {"pre_sil_final", "on"},
      {"filters", "eps"},         {"relabel", "on"},        {"pair_mode", "counter"},
      {"cache", "0"},             {"phone_word_weight", "0"}};
  return d;
}

inline const std::map<std::string, std::string> &RecipeOpHelp() {
  static const std::map<std::string, std::string> h = {
      {"lexicon", "lexicon(disambig=on) -> L with phone words per `phone_words`"},
      {"grammar", "grammar() -> G from the ARPA model"},
      {"context", "context() -> C for `context` (mono | biphone)"},
      {"hmm", "hmm(C) -> H with `hmm_states` emitting states per unit of C"},
      {"compose", "compose(A, B)"},
      {"determinize", "determinize(A)"},
      {"minimize", "minimize(A)"},
      {"rmdisambig", "rmdisambig(A) -> input #k symbols become <eps>"},
      {"connect", "connect(A)"},
      {"pushweights", "pushweights(A)"},
      {"arcsort", "arcsort(A, input|output)"},
      {"multiply_unigrams", "multiply_unigrams(A) -> word arcs times their unigram weight"},
      {"divide_unigrams", "divide_unigrams(G) -> word arcs divided by their unigram weight"},
      {"phone_word_grammar", "phone_word_grammar() -> G with #phn unigrams (`phone_word_weight`)"},
      {"tlprime", "tlprime() -> T o L' over the new words (empty without them)"},
      {"replace", "replace(G, T) -> $unknown replaced by T (#0 connectors if `hash0`)"},
      {"g0", "g0(T) -> range-compressed G0 with T attached"},
      {"static", "static(X) -> decode X directly"},
      {"lazy", "lazy(X, Y) -> decode X o Y composed on demand with `filters`"}};
  return h;
}

namespace internal {

inline std::string Trim(const std::string &s) {
  size_t b = s.find_first_not_of(" \t\r"), e = s.find_last_not_of(" \t\r");
  return b == std::string::npos ? "" : s.substr(b, e - b + 1);
}

inline bool IsIdentifier(const std::string &s) {
  if (s.empty() || !(std::isalpha(static_cast<unsigned char>(s[0])) || s[0] == '_')) return false;
  for (char c : s)
    if (!std::isalnum(static_cast<unsigned char>(c)) && c != '_') return false;
  return true;
}

}  // namespace internal

inline Recipe ParseRecipe(std::istream &is, const std::string &name = "") {
  using internal::Trim;
  Recipe r;
  r.name = name;
  std::set<std::string> defined;
  std::string raw;
  int lineno = 0;
  while (std::getline(is, raw)) {
    ++lineno;
    std::string line = Trim(raw.substr(0, raw.find('#')));
    if (line.empty()) continue;
    size_t eq = line.find('=');
    if (eq == std::string::npos) throw ParseError("expected '='", lineno);
    std::string lhs = Trim(line.substr(0, eq)), rhs = Trim(line.substr(eq + 1));
    if (lhs.rfind("set ", 0) == 0) {
      std::string key = Trim(lhs.substr(4));
      if (!DefaultRecipeSettings().count(key) && key != "name")
        throw ParseError("unknown setting '" + key + "'", lineno);
      if (key == "name") r.name = rhs;
      else r.settings[key] = rhs;
      continue;
    }
    RecipeStep st;
    st.line = lineno;
    st.target = lhs;
    if (!internal::IsIdentifier(lhs)) throw ParseError("bad name '" + lhs + "'", lineno);
    if (defined.count(lhs)) throw ParseError("'" + lhs + "' defined twice", lineno);
    size_t open = rhs.find('(');
    if (open == std::string::npos || rhs.back() != ')') throw ParseError("expected op(args)", lineno);
    st.op = Trim(rhs.substr(0, open));
    if (!RecipeOpHelp().count(st.op)) throw ParseError("unknown op '" + st.op + "'", lineno);
    std::string inner = rhs.substr(open + 1, rhs.size() - open - 2);
    std::stringstream ss(inner);
    for (std::string tok; std::getline(ss, tok, ',');) {
      tok = Trim(tok);
      if (tok.empty()) {
        if (Trim(inner).empty()) break;
        throw ParseError("empty argument", lineno);
      }
      size_t k = tok.find('=');
      if (k != std::string::npos) {
        st.kwargs[Trim(tok.substr(0, k))] = Trim(tok.substr(k + 1));
      } else {
        st.args.push_back(tok);
      }
    }
    defined.insert(lhs);
    r.steps.push_back(std::move(st));
  }
  if (r.steps.empty() || (r.steps.back().op != "static" && r.steps.back().op != "lazy"))
    throw ParseError("recipe must end with static(...) or lazy(...)", lineno);
  for (size_t k = 0; k + 1 < r.steps.size(); ++k)
    if (r.steps[k].op == "static" || r.steps[k].op == "lazy")
      throw ParseError("only the last statement may be static/lazy", r.steps[k].line);
  return r;
}

inline Recipe ParseRecipeText(const std::string &text, const std::string &name = "") {
  std::istringstream ss(text);
  return ParseRecipe(ss, name);
}

inline Recipe ReadRecipeFile(const std::string &path) {
  std::ifstream is(path);
  if (!is) Fail("cannot open recipe '", path, "'");
  return ParseRecipe(is, std::filesystem::path(path).stem().string());
}

inline void WriteRecipe(const Recipe &r, std::ostream &os) {
  if (!r.name.empty()) os << "set name = " << r.name << '\n';
  for (const auto &[k, v] : r.settings) os << "set " << k << " = " << v << '\n';
  for (const RecipeStep &st : r.steps) {
    os << st.target << " = " << st.op << '(';
    bool first = true;
    for (const auto &a : st.args) {
      os << (first ? "" : ", ") << a;
      first = false;
    }
    for (const auto &[k, v] : st.kwargs) {
      os << (first ? "" : ", ") << k << '=' << v;
      first = false;
    }
    os << ")\n";
  }
}

namespace internal {

inline constexpr const char *kHclSteps =
    "L = lexicon()\n"
    "C = context()\n"
    "H = hmm(C)\n"
    "HC = compose(H, C)\n"
    "HCL0 = compose(HC, L)\n";

inline constexpr const char *kHclFinish =
    "HCLd = determinize(HCL1)\n"
    "HCLm = minimize(HCLd)\n"
    "HCL = rmdisambig(HCLm)\n";

}  // namespace internal

inline std::vector<std::string> BuiltinRecipeNames() {
  return {"static", "online", "online-la", "online-la-push", "split-k1", "split-kn"};
}

// Graph configurations compared in the equivalence matrix.
inline std::string BuiltinRecipeText(const std::string &name) {
  std::string hcl = std::string(internal::kHclSteps) + "HCL1 = connect(HCL0)\n" + internal::kHclFinish;
  std::string expand = "G = grammar()\nT = tlprime()\nGx = replace(G, T)\n";
  if (name == "static")
    return hcl + expand + "HCLG0 = compose(HCL, Gx)\nHCLG = connect(HCLG0)\nresult = static(HCLG)\n";
  if (name == "online") return "set filters = eps\n" + hcl + expand + "result = lazy(HCL, Gx)\n";
  if (name == "online-la")
    return "set filters = eps+reach\n" + hcl + expand + "result = lazy(HCL, Gx)\n";
  if (name == "online-la-push")
    return "set filters = eps+reach+wpush+lpush\n" + hcl + expand + "result = lazy(HCL, Gx)\n";
  if (name == "split-k1")
    return "set filters = eps+reach\n" + std::string(internal::kHclSteps) +
           "HCL1 = multiply_unigrams(HCL0)\n" + internal::kHclFinish +
           "G = grammar()\nGn1 = divide_unigrams(G)\nT = tlprime()\nGx = replace(Gn1, T)\n"
           "result = lazy(HCL, Gx)\n";
  if (name == "split-kn")
    return "set filters = eps+reach\nset relabel = off\n" + hcl +
           "Ga = phone_word_grammar()\nHCLGn0 = compose(HCL, Ga)\nHCLGn = connect(HCLGn0)\n"
           "T = tlprime()\nG0 = g0(T)\nresult = lazy(HCLGn, G0)\n";
  Fail("unknown built-in recipe '", name, "'");
}

inline Recipe BuiltinRecipe(const std::string &name) {
  return ParseRecipeText(BuiltinRecipeText(name), name);
}

inline FilterStack ParseFilterStack(const std::string &s) {
  for (const FilterStack &f : FilterStack::AllValid())
    if (f.Name() == s) return f;
  Fail("unknown filter stack '", s, "'");
}

inline bool ParseOnOff(const std::string &s, const std::string &what) {
  if (s == "on" || s == "1" || s == "true") return true;
  if (s == "off" || s == "0" || s == "false") return false;
  Fail(what, ": expected on|off, got '", s, "'");
}

using Artifact = std::variant<Wfst, VocabAcceptor>;

struct Resources {
  Lexicon lexicon;
  NGramModel lm;
  NewWordList new_words;
};

// Prepared decoding graph: a single Wfst, or a left Wfst composed on demand
// with a right operand.
struct Cascade {
  Recipe recipe;
  bool lazy = false;
  Wfst graph;
  std::variant<std::monostate, Wfst, VocabAcceptor> right;
  ComposeOptions compose;
  std::shared_ptr<const LookaheadTable> table;
  std::map<std::string, Artifact> artifacts;
  std::set<std::string> dependent;  // artifacts that change with the new words
  size_t steps_run = 0;
  size_t steps_reused = 0;

  const SymbolTablePtr &EmitSymbols() const { return graph.InputSymbols(); }
  SymbolTablePtr OutputSymbols() const {
    if (auto *w = std::get_if<Wfst>(&right)) return w->OutputSymbols();
    if (auto *v = std::get_if<VocabAcceptor>(&right)) return v->OutputSymbols();
    return graph.OutputSymbols();
  }
  size_t NumUnits() const { return NumEmittingUnits(*EmitSymbols()); }
};

class RecipeRunner {
 public:
  RecipeRunner(Recipe recipe, const Resources &res) : recipe_(std::move(recipe)), res_(res) {
    for (const auto &[k, v] : DefaultRecipeSettings())
      if (!recipe_.settings.count(k)) recipe_.settings[k] = v;
    style_ = ParsePhonemeWordStyle(Setting("phone_words"));
    res_.lexicon.Validate();
    hash0_ = ParseOnOff(Setting("hash0"), "hash0");
    LexiconOptions lo = LexiconOpts(true);
    phones_ = MakePhoneTableFor(res_.lexicon, lo);
    words_ = MakeWordTable(res_.lexicon);
    ext_ = ExtendWordTable(words_, res_.new_words);
  }

  const std::string &Setting(const std::string &k) const { return recipe_.settings.at(k); }
  const SymbolTablePtr &Phones() const { return phones_; }
  const SymbolTablePtr &Words() const { return words_; }

  // Artifacts in `cached` are reused for steps that do not depend on the new
  // words.
  Cascade Run(const std::map<std::string, Artifact> *cached = nullptr) {
    Cascade c;
    c.recipe = recipe_;
    for (const RecipeStep &st : recipe_.steps) {
      bool dep = st.op == "tlprime";
      for (const auto &a : st.args)
        if (c.dependent.count(a)) dep = true;
      if (st.op == "static" || st.op == "lazy") {
        Finish(st, &c);
        continue;
      }
      if (dep) c.dependent.insert(st.target);
      if (!dep && cached) {
        auto it = cached->find(st.target);
        if (it != cached->end()) {
          c.artifacts.emplace(st.target, it->second);
          ++c.steps_reused;
          continue;
        }
      }
      try {
        c.artifacts.emplace(st.target, Execute(st, c));
      } catch (const ParseError &) {
        throw;
      } catch (const Error &e) {
        Fail("recipe line ", st.line, " (", st.target, " = ", st.op, "): ", e.what());
      }
      ++c.steps_run;
    }
    return c;
  }

 private:
  LexiconOptions LexiconOpts(bool disambig) const {
    LexiconOptions lo;
    lo.disambig = disambig;
    lo.hash0 = hash0_;
    lo.hash0_input = hash0_;
    lo.phone_words = {style_, ParseOnOff(Setting("sil_phone_word"), "sil_phone_word")};
    return lo;
  }

  static void Arity(const RecipeStep &st, size_t n) {
    if (st.args.size() != n)
      Fail("'", st.op, "' takes ", n, " graph argument(s), got ", st.args.size());
  }

  static const Wfst &Fst(const Cascade &c, const std::string &name) {
    auto it = c.artifacts.find(name);
    if (it == c.artifacts.end()) Fail("undefined graph '", name, "'");
    if (!std::holds_alternative<Wfst>(it->second)) Fail("'", name, "' is not a plain graph");
    return std::get<Wfst>(it->second);
  }

  Artifact Execute(const RecipeStep &st, const Cascade &c) {
    const std::string &op = st.op;
    auto arg = [&](size_t k) -> const Wfst & { return Fst(c, st.args[k]); };
    if (op == "lexicon") {
      Arity(st, 0);
      bool dis = st.kwargs.count("disambig") ? ParseOnOff(st.kwargs.at("disambig"), "disambig") : true;
      return ArcSort(BuildL(res_.lexicon, LexiconOpts(dis), phones_, words_), SortSide::kInput);
    }
    if (op == "grammar") {
      Arity(st, 0);
      return ArcSort(BuildG(res_.lm, {hash0_}, words_), SortSide::kInput);
    }
    if (op == "context") {
      Arity(st, 0);
      return ArcSort(BuildC(phones_, ParseContextType(Setting("context"))), SortSide::kInput);
    }
    if (op == "hmm") {
      Arity(st, 1);
      HmmTopology topo;
      topo.states_per_phone = std::stoi(Setting("hmm_states"));
      if (topo.states_per_phone < 1) Fail("hmm_states must be >= 1");
      return BuildH(arg(0).InputSymbols(), topo);
    }
    if (op == "compose") {
      Arity(st, 2);
      const Wfst &b = arg(1);
      if (b.Has(kILabelSorted)) return Compose(arg(0), b);
      return Compose(arg(0), ArcSort(b, SortSide::kInput));
    }
    if (op == "determinize") {
      Arity(st, 1);
      return Determinize(arg(0));
    }
    if (op == "minimize") {
      Arity(st, 1);
      return Minimize(arg(0));
    }
    if (op == "rmdisambig") {
      Arity(st, 1);
      return RemoveDisambig(arg(0));
    }
    if (op == "connect") {
      Arity(st, 1);
      return Connect(arg(0));
    }
    if (op == "pushweights") {
      Arity(st, 1);
      return PushWeights(arg(0));
    }
    if (op == "arcsort") {
      Arity(st, 2);
      if (st.args[1] != "input" && st.args[1] != "output") Fail("arcsort side must be input|output");
      return ArcSort(arg(0), st.args[1] == "input" ? SortSide::kInput : SortSide::kOutput);
    }
    if (op == "multiply_unigrams") {
      Arity(st, 1);
      return ApplyUnigramWeights(arg(0), res_.lm);
    }
    if (op == "divide_unigrams") {
      Arity(st, 1);
      if (res_.lm.Order() < 2) Fail("divide_unigrams needs a language model of order >= 2");
      return DivideUnigramWeights(arg(0), res_.lm);
    }
    if (op == "phone_word_grammar") {
      Arity(st, 0);
      NGramModel aug = AugmentLmWithPhoneWords(res_.lm, *words_,
                                               Weight(std::stod(Setting("phone_word_weight"))));
      return ArcSort(BuildG(aug, {hash0_}, words_), SortSide::kInput);
    }
    if (op == "tlprime") {
      Arity(st, 0);
      TLprimeOptions o;
      o.silence = res_.lexicon.silence;
      o.pre_sil_final = ParseOnOff(Setting("pre_sil_final"), "pre_sil_final");
      return BuildTLprime(res_.new_words, ext_, o);
    }
    if (op == "replace") {
      Arity(st, 2);
      return ArcSort(ReplaceUnknown(arg(0), arg(1), hash0_).fst, SortSide::kInput);
    }
    if (op == "g0") {
      Arity(st, 1);
      return VocabAcceptor::Compress(BuildG0(ext_, &arg(0), UnknownEntryWeight(res_.lm)));
    }
    Fail("unknown op '", op, "'");
  }

  void Finish(const RecipeStep &st, Cascade *c) const {
    if (st.op == "static") {
      Arity(st, 1);
      c->graph = Fst(*c, st.args[0]);
      return;
    }
    Arity(st, 2);
    c->lazy = true;
    c->compose.filters = ParseFilterStack(Setting("filters"));
    c->compose.filters.Validate();
    std::string pm = Setting("pair_mode");
    if (pm != "counter" && pm != "arithmetic") Fail("pair_mode must be counter|arithmetic");
    c->compose.pair_mode = pm == "counter" ? PairMode::kCounter : PairMode::kArithmetic;
    c->compose.cache_capacity = std::stoul(Setting("cache"));
    Wfst left = ArcSort(Fst(*c, st.args[0]), SortSide::kOutput);
    auto rit = c->artifacts.find(st.args[1]);
    if (rit == c->artifacts.end()) Fail("undefined graph '", st.args[1], "'");
    Artifact right = rit->second;
    if (c->compose.filters.NeedsLookahead()) {
      bool relabel = ParseOnOff(Setting("relabel"), "relabel");
      LookaheadResult la = BuildLookahead(left, relabel);
      if (relabel) {
        left = std::move(la.left);
        if (auto *w = std::get_if<Wfst>(&right)) {
          right = ArcSort(RelabelInputs(*w, la.map), SortSide::kInput);
        } else {
          auto &v = std::get<VocabAcceptor>(right);
          right = VocabAcceptor::Compress(ArcSort(RelabelInputs(v.ToWfst(), la.map), SortSide::kInput));
        }
      }
      c->table = std::make_shared<LookaheadTable>(std::move(la.table));
    }
    c->graph = std::move(left);
    if (auto *w = std::get_if<Wfst>(&right)) {
      c->right = *w;
    } else {
      c->right = std::get<VocabAcceptor>(right);
    }
  }

  Recipe recipe_;
  Resources res_;
  PhonemeWordStyle style_;
  bool hash0_ = false;
  SymbolTablePtr phones_, words_, ext_;
};

namespace internal {

template <typename F>
auto WithSession(const Cascade &c, F &&fn) {
  ComposeOptions o = c.compose;
  o.lookahead = c.table.get();
  if (auto *w = std::get_if<Wfst>(&c.right)) {
    LazyCompose<Wfst> lc(c.graph, *w, o);
    return fn(lc);
  }
  LazyCompose<VocabAcceptor> lc(c.graph, std::get<VocabAcceptor>(c.right), o);
  return fn(lc);
}

}  // namespace internal

// One composition session per call; `stats` receives its counters.
inline DecodeResult DecodeCascade(const Cascade &c, const FrameScores &scores,
                                  const BeamConfig &beam = {}, ComposeStats *stats = nullptr) {
  if (scores.NumUnits() != c.NumUnits())
    Fail("frame scores have ", scores.NumUnits(), " units, graph has ", c.NumUnits());
  if (!c.lazy) return Decode(c.graph, scores, beam);
  return internal::WithSession(c, [&](auto &lc) {
    if (lc.Empty()) Fail("decode: empty graph");
    LazyGraph lg(lc);
    DecodeResult r = Decode(lg, scores, beam);
    if (stats) *stats = lc.Stats();
    return r;
  });
}

// Fully expanded graph; for lazy cascades `stats` receives the session
// counters after expansion.
inline Wfst MaterializeCascade(const Cascade &c, size_t max_states = 5'000'000,
                               ComposeStats *stats = nullptr) {
  if (!c.lazy) return c.graph;
  return internal::WithSession(c, [&](auto &lc) {
    Wfst f = Materialize(lc, max_states);
    if (stats) *stats = lc.Stats();
    return f;
  });
}

// Directory layout: manifest.txt (key=value), recipe.txt, lexicon.txt,
// phones.txt, lm.arpa, new_words.txt, and per artifact <name>.fst|.g0 with
// <name>.isyms/.osyms. The prepared operands are stored as result.*.
namespace internal {

inline void SaveFstWithSymbols(const Wfst &f, const std::filesystem::path &base) {
  WriteBinaryFile(f, base.string() + ".fst");
  if (f.InputSymbols()) f.InputSymbols()->WriteTextFile(base.string() + ".isyms");
  if (f.OutputSymbols()) f.OutputSymbols()->WriteTextFile(base.string() + ".osyms");
}

inline SymbolTablePtr LoadSymbols(const std::string &path) {
  if (!std::filesystem::exists(path)) return nullptr;
  return std::make_shared<SymbolTable>(SymbolTable::ReadTextFile(path));
}

inline Wfst LoadFstWithSymbols(const std::filesystem::path &base) {
  return ReadBinaryFile(base.string() + ".fst", LoadSymbols(base.string() + ".isyms"),
                        LoadSymbols(base.string() + ".osyms"));
}

inline void SaveArtifact(const Artifact &a, const std::filesystem::path &base) {
  if (auto *w = std::get_if<Wfst>(&a)) {
    SaveFstWithSymbols(*w, base);
    return;
  }
  const auto &v = std::get<VocabAcceptor>(a);
  WriteVocabAcceptorFile(v, base.string() + ".g0");
  if (v.InputSymbols()) v.InputSymbols()->WriteTextFile(base.string() + ".isyms");
}

inline Artifact LoadArtifact(const std::filesystem::path &base, const std::string &kind) {
  if (kind == "fst") return LoadFstWithSymbols(base);
  if (kind == "g0") return ReadVocabAcceptorFile(base.string() + ".g0", LoadSymbols(base.string() + ".isyms"));
  Fail("unknown artifact kind '", kind, "'");
}

inline std::map<std::string, std::string> ReadKeyValues(const std::string &path) {
  std::ifstream is(path);
  if (!is) Fail("cannot open '", path, "'");
  std::map<std::string, std::string> kv;
  std::string line;
  int lineno = 0;
  while (std::getline(is, line)) {
    ++lineno;
    if (line.empty()) continue;
    size_t eq = line.find('=');
    if (eq == std::string::npos) throw ParseError("expected key=value", lineno);
    kv[line.substr(0, eq)] = line.substr(eq + 1);
  }
  return kv;
}

}  // namespace internal

inline constexpr const char *kCascadeFormat = "dynvoc-cascade-1";

inline void SaveCascade(const Cascade &c, const Resources &res, const std::string &dir) {
  namespace fs = std::filesystem;
  fs::path d(dir);
  fs::create_directories(d);
  {
    std::ofstream os(d / "recipe.txt");
    WriteRecipe(c.recipe, os);
    std::ofstream lx(d / "lexicon.txt");
    WriteLexicon(res.lexicon, lx, true);
    std::ofstream lm(d / "lm.arpa");
    WriteArpa(res.lm, lm);
    std::ofstream ph(d / "phones.txt");
    for (const auto &p : res.lexicon.Phones()) ph << p << '\n';
    std::ofstream nw(d / "new_words.txt");
    for (const NewWord &w : res.new_words.entries) {
      nw << w.word << ' ' << w.weight.Value();
      for (const auto &p : w.phones) nw << ' ' << p;
      nw << '\n';
    }
  }
  std::ofstream m(d / "manifest.txt");
  m << "format=" << kCascadeFormat << '\n'
    << "recipe=" << c.recipe.name << '\n'
    << "lazy=" << (c.lazy ? 1 : 0) << '\n';
  for (const auto &[name, a] : c.artifacts) {
    internal::SaveArtifact(a, d / name);
    m << "artifact." << name << '=' << (std::holds_alternative<Wfst>(a) ? "fst" : "g0") << ' '
      << (c.dependent.count(name) ? 1 : 0) << '\n';
  }
  internal::SaveFstWithSymbols(c.graph, d / "result.left");
  if (auto *w = std::get_if<Wfst>(&c.right)) internal::SaveArtifact(*w, d / "result.right");
  if (auto *v = std::get_if<VocabAcceptor>(&c.right)) internal::SaveArtifact(*v, d / "result.right");
  if (c.lazy)
    m << "right=" << (std::holds_alternative<Wfst>(c.right) ? "fst" : "g0") << '\n'
      << "filters=" << c.compose.filters.Name() << '\n'
      << "pair_mode=" << (c.compose.pair_mode == PairMode::kCounter ? "counter" : "arithmetic") << '\n'
      << "cache=" << c.compose.cache_capacity << '\n';
  if (c.table) {
    WriteLookaheadFile(*c.table, (d / "result.lookahead").string());
    m << "lookahead=1\n";
  }
}

// New words are stored one per line as `word weight phone...`.
inline Resources LoadCascadeResources(const std::string &dir) {
  namespace fs = std::filesystem;
  fs::path d(dir);
  Resources r;
  r.lexicon = ReadLexiconFile((d / "lexicon.txt").string(), true);
  r.lm = ReadArpaFile((d / "lm.arpa").string());
  std::ifstream ph(d / "phones.txt");
  for (std::string p; ph >> p;) r.lexicon.extra_phones.insert(p);
  std::ifstream nw(d / "new_words.txt");
  std::string line;
  while (std::getline(nw, line)) {
    std::istringstream ls(line);
    NewWord w;
    double weight;
    if (!(ls >> w.word >> weight)) continue;
    w.weight = Weight(weight);
    for (std::string p; ls >> p;) w.phones.push_back(p);
    r.new_words.entries.push_back(std::move(w));
  }
  return r;
}

inline Cascade LoadCascade(const std::string &dir) {
  namespace fs = std::filesystem;
  fs::path d(dir);
  auto kv = internal::ReadKeyValues((d / "manifest.txt").string());
  if (kv["format"] != kCascadeFormat) Fail("'", dir, "' is not a cascade directory");
  Cascade c;
  c.recipe = ReadRecipeFile((d / "recipe.txt").string());
  c.lazy = kv["lazy"] == "1";
  for (const auto &[k, v] : kv) {
    if (k.rfind("artifact.", 0) != 0) continue;
    std::string name = k.substr(9);
    std::istringstream ls(v);
    std::string kind;
    int dep = 0;
    ls >> kind >> dep;
    c.artifacts.emplace(name, internal::LoadArtifact(d / name, kind));
    if (dep) c.dependent.insert(name);
  }
  c.graph = internal::LoadFstWithSymbols(d / "result.left");
  if (c.lazy) {
    Artifact r = internal::LoadArtifact(d / "result.right", kv["right"]);
    if (auto *w = std::get_if<Wfst>(&r)) c.right = *w;
    else c.right = std::get<VocabAcceptor>(r);
    c.compose.filters = ParseFilterStack(kv["filters"]);
    c.compose.pair_mode = kv["pair_mode"] == "arithmetic" ? PairMode::kArithmetic : PairMode::kCounter;
    c.compose.cache_capacity = std::stoul(kv["cache"]);
    if (kv["lookahead"] == "1")
      c.table = std::make_shared<LookaheadTable>(ReadLookaheadFile((d / "result.lookahead").string()));
  }
  return c;
}

}  // namespace dynvoc

#endif  // DYNVOC_RECIPE_H_
