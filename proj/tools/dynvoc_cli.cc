// tools/dynvoc_cli.cc

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

#include <algorithm>
#include <atomic>
#include <chrono>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <limits>
#include <mutex>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "CLI11.hpp"
#include "dynvoc/corpus.h"
#include "dynvoc/equiv.h"
#include "dynvoc/recipe.h"
#include "dynvoc/toy.h"

namespace fs = std::filesystem;
using namespace dynvoc;

namespace {

constexpr const char *kVersion = "0.1.0";

// Failure carrying the fields of the one-line error report.
struct CliError : std::runtime_error {
  std::string kind, file;
  int line = 0;
  CliError(std::string kind_, const std::string &msg, std::string file_ = "", int line_ = 0)
      : std::runtime_error(msg), kind(std::move(kind_)), file(std::move(file_)), line(line_) {}
};

template <typename F>
auto Load(const std::string &path, F &&fn) {
  if (!fs::exists(path)) throw CliError("input", "no such file or directory", path);
  try {
    return fn(path);
  } catch (const ParseError &e) {
    throw CliError("parse", e.what(), path, e.line());
  } catch (const Error &e) {
    throw CliError("input", e.what(), path);
  }
}

std::string Quote(const std::string &s) {
  std::string o = "\"";
  for (char c : s) {
    if (c == '"' || c == '\\') o += '\\';
    o += c == '\n' ? ' ' : c;
  }
  return o + '"';
}

class Report {
 public:
  explicit Report(std::string command) : start_(std::chrono::steady_clock::now()) {
    Add("tool", "dynvoc");
    Add("version", kVersion);
    Add("command", std::move(command));
  }
  template <typename T>
  void Add(const std::string &k, const T &v) {
    std::ostringstream ss;
    ss << std::setprecision(12) << v;
    kv_.emplace_back(k, ss.str());
  }
  void AddGraph(const std::string &prefix, const Wfst &f) {
    Add(prefix + ".states", f.NumStates());
    Add(prefix + ".arcs", f.TotalArcs());
  }
  void AddFile(const std::string &prefix, const fs::path &p) {
    Add(prefix + ".path", p.string());
    if (fs::is_regular_file(p)) Add(prefix + ".bytes", fs::file_size(p));
  }
  void Lap(const std::string &name) {
    auto now = std::chrono::steady_clock::now();
    Add("time." + name + "_s", std::chrono::duration<double>(now - last_).count());
    last_ = now;
  }
  void Write(const std::string &path) {
    Add("time.total_s", std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count());
    Add("status", "ok");
    std::ostringstream os;
    for (const auto &[k, v] : kv_) os << k << '=' << v << '\n';
    if (path.empty() || path == "-") {
      std::cerr << os.str();
      return;
    }
    std::ofstream f(path);
    if (!f) throw CliError("output", "cannot write report", path);
    f << os.str();
  }

 private:
  std::vector<std::pair<std::string, std::string>> kv_;
  std::chrono::steady_clock::time_point start_, last_ = std::chrono::steady_clock::now();
};

// Outputs are written under temporary names and renamed into place by
// Commit(); anything left uncommitted is removed.
class Outputs {
 public:
  ~Outputs() {
    std::error_code ec;
    for (const auto &[tmp, final_path] : pending_) fs::remove_all(tmp, ec);
  }
  fs::path Stage(const fs::path &final_path) {
    fs::path tmp = final_path;
    tmp += ".partial";
    std::error_code ec;
    fs::remove_all(tmp, ec);
    if (final_path.has_parent_path()) fs::create_directories(final_path.parent_path());
    pending_.emplace_back(tmp, final_path);
    return tmp;
  }
  void Commit() {
    for (const auto &[tmp, final_path] : pending_) {
      std::error_code ec;
      fs::remove_all(final_path, ec);
      fs::rename(tmp, final_path);
    }
    pending_.clear();
  }

 private:
  std::vector<std::pair<fs::path, fs::path>> pending_;
};

fs::path Sibling(const fs::path &fst, const char *ext) {
  fs::path p = fst;
  return p.replace_extension(ext);
}

void WriteFst(const Wfst &f, const fs::path &path) {
  WriteBinaryFile(f, path.string());
  if (f.InputSymbols()) f.InputSymbols()->WriteTextFile(Sibling(path, ".isyms").string());
  if (f.OutputSymbols()) f.OutputSymbols()->WriteTextFile(Sibling(path, ".osyms").string());
}

Wfst ReadFst(const std::string &path) {
  return Load(path, [](const std::string &p) {
    auto syms = [&](const char *ext) -> SymbolTablePtr {
      fs::path s = Sibling(p, ext);
      if (!fs::exists(s)) return nullptr;
      return std::make_shared<SymbolTable>(SymbolTable::ReadTextFile(s.string()));
    };
    return ReadBinaryFile(p, syms(".isyms"), syms(".osyms"));
  });
}

// Options shared by the graph-building subcommands.
struct ResourceFlags {
  std::string lexicon, phones, lm, new_words;
  bool lexicon_weights = false;
  double word_weight = kDefaultNewWordWeight;

  void AddTo(CLI::App *app, bool need_lm, bool new_words_flag) {
    app->add_option("--lexicon", lexicon, "Lexicon: `word phone...` per line")->required();
    app->add_flag("--lexicon-weights", lexicon_weights, "Lexicon lines carry a weight after the word");
    app->add_option("--phones", phones, "Full phone inventory, one per line");
    if (need_lm) app->add_option("--lm", lm, "ARPA language model")->required();
    if (new_words_flag) app->add_option("--new-words", new_words, "New words: `word phone...` per line");
    app->add_option("--word-weight", word_weight, "Weight of each new word")->capture_default_str();
  }

  Resources Read() const {
    Resources r;
    r.lexicon = Load(lexicon, [&](const std::string &p) { return ReadLexiconFile(p, lexicon_weights); });
    if (!phones.empty()) {
      Load(phones, [&](const std::string &p) {
        std::ifstream is(p);
        for (std::string ph; is >> ph;) r.lexicon.extra_phones.insert(ph);
        return 0;
      });
    }
    if (!lm.empty()) r.lm = Load(lm, [](const std::string &p) { return ReadArpaFile(p); });
    if (!new_words.empty())
      r.new_words = Load(new_words, [&](const std::string &p) { return ReadNewWordsFile(p, word_weight); });
    return r;
  }
};

// Settings that map onto recipe `set` lines.
struct GraphFlags {
  std::string hash0, style, la_reach, la_push;

  void AddTo(CLI::App *app, bool lookahead) {
    app->add_option("--hash0", hash0, "Back-off arcs read #0 (on|off)")
        ->check(CLI::IsMember({"on", "off"}));
    app->add_option("--phoneme-word-style", style, "Phoneme words in L (path|self-loop|posdep)")
        ->check(CLI::IsMember({"path", "self-loop", "posdep", "none"}));
    if (lookahead) {
      app->add_option("--la-reachability", la_reach, "Lookahead reachability filter (on|off)")
          ->check(CLI::IsMember({"on", "off"}));
      app->add_option("--la-pushing", la_push, "Lookahead weight and label pushing (on|off)")
          ->check(CLI::IsMember({"on", "off"}));
    }
  }

  void Apply(Recipe *r) const {
    if (!hash0.empty()) r->settings["hash0"] = hash0;
    if (!style.empty()) r->settings["phone_words"] = style;
    if (la_reach.empty() && la_push.empty()) return;
    std::string cur = r->settings.count("filters") ? r->settings["filters"] : "eps";
    bool reach = la_reach.empty() ? cur.find("reach") != std::string::npos : la_reach == "on";
    bool push = la_push.empty() ? cur.find("push") != std::string::npos : la_push == "on";
    if (push && !reach) throw CliError("usage", "--la-pushing on needs --la-reachability on");
    r->settings["filters"] = std::string("eps") + (reach ? "+reach" : "") + (push ? "+wpush+lpush" : "");
  }
};

std::string GraphTypeRecipe(const std::string &type, const GraphFlags &g) {
  if (type == "static") return "static";
  if (type == "hcl+g") {
    bool reach = g.la_reach != "off", push = g.la_push == "on";
    return push ? "online-la-push" : reach ? "online-la" : "online";
  }
  if (type == "hclg1+g") return "split-k1";
  if (type == "hclgn+g0") return "split-kn";
  throw CliError("usage", "unknown graph type '" + type + "'");
}

Recipe LoadRecipe(const std::string &spec) {
  for (const auto &n : BuiltinRecipeNames())
    if (n == spec) return BuiltinRecipe(n);
  return Load(spec, [](const std::string &p) { return ReadRecipeFile(p); });
}

std::string RecipeHelp() {
  std::ostringstream os;
  os << "Recipes are built-in names (";
  for (const auto &n : BuiltinRecipeNames()) os << n << (n == "split-kn" ? "" : ", ");
  os << ") or files with lines\n"
        "  set <key> = <value>\n"
        "  <name> = <op>(<arg>, ..., <key>=<value>)\n"
        "ending in `result = static(X)` or `result = lazy(X, Y)`. '#' starts a comment.\n"
        "Settings (default):\n";
  for (const auto &[k, v] : DefaultRecipeSettings()) os << "  " << k << " (" << v << ")\n";
  os << "Ops:\n";
  for (const auto &[k, v] : RecipeOpHelp()) os << "  " << v << '\n';
  return os.str();
}

void ReportCascade(Report &rep, const Cascade &c) {
  rep.Add("recipe", c.recipe.name);
  rep.Add("lazy", c.lazy ? 1 : 0);
  rep.Add("steps_run", c.steps_run);
  rep.Add("steps_reused", c.steps_reused);
  rep.Add("units", c.NumUnits());
  rep.AddGraph("graph", c.graph);
  if (auto *w = std::get_if<Wfst>(&c.right)) rep.AddGraph("right", *w);
  if (auto *v = std::get_if<VocabAcceptor>(&c.right)) {
    rep.Add("right.states", v->NumStates());
    rep.Add("right.ranges", v->NumRanges());
    rep.Add("right.bytes_estimate", v->BytesEstimate());
  }
  if (c.lazy) rep.Add("filters", c.compose.filters.Name());
}

Cascade LoadCascadeDir(const std::string &dir) {
  if (!fs::is_directory(dir)) throw CliError("input", "not a cascade directory", dir);
  try {
    return LoadCascade(dir);
  } catch (const ParseError &e) {
    throw CliError("parse", e.what(), dir, e.line());
  } catch (const Error &e) {
    throw CliError("input", e.what(), dir);
  }
}

// A graph argument is a .fst file or a cascade directory.
Wfst LoadGraph(const std::string &spec, size_t max_states) {
  if (fs::is_directory(spec)) return MaterializeCascade(LoadCascadeDir(spec), max_states);
  return ReadFst(spec);
}

int CmdBuildLexicon(const ResourceFlags &rf, const GraphFlags &gf, const std::string &out,
                    const std::string &report) {
  Report rep("build-lexicon");
  Resources r = rf.Read();
  Recipe rec = ParseRecipeText("L = lexicon()\nresult = static(L)\n", "lexicon");
  gf.Apply(&rec);
  Cascade c = RecipeRunner(rec, r).Run();
  const Wfst &l = std::get<Wfst>(c.artifacts.at("L"));
  Outputs o;
  fs::path tmp = o.Stage(out);
  WriteFst(l, tmp);
  for (const char *ext : {".isyms", ".osyms"}) fs::rename(Sibling(tmp, ext), Sibling(out, ext));
  o.Commit();
  rep.AddGraph("L", l);
  rep.Add("phones", r.lexicon.Phones().size());
  rep.Add("words", r.lexicon.Words().size());
  rep.AddFile("out", out);
  rep.Write(report);
  return 0;
}

int CmdBuildGrammar(const ResourceFlags &rf, const GraphFlags &gf, const std::string &out,
                    const std::string &report) {
  Report rep("build-grammar");
  Resources r = rf.Read();
  Recipe rec = ParseRecipeText("G = grammar()\nresult = static(G)\n", "grammar");
  gf.Apply(&rec);
  Cascade c = RecipeRunner(rec, r).Run();
  const Wfst &g = std::get<Wfst>(c.artifacts.at("G"));
  Outputs o;
  fs::path tmp = o.Stage(out);
  WriteFst(g, tmp);
  for (const char *ext : {".isyms", ".osyms"}) fs::rename(Sibling(tmp, ext), Sibling(out, ext));
  o.Commit();
  rep.AddGraph("G", g);
  rep.Add("order", r.lm.Order());
  rep.AddFile("out", out);
  rep.Write(report);
  return 0;
}

int CmdBuildCascade(const ResourceFlags &rf, const GraphFlags &gf, const std::string &recipe,
                    const std::string &graph_type, const std::string &out, const std::string &report) {
  Report rep("build-cascade");
  if (!recipe.empty() && !graph_type.empty())
    throw CliError("usage", "give --recipe or --graph-type, not both");
  Recipe rec = LoadRecipe(!recipe.empty() ? recipe : GraphTypeRecipe(graph_type.empty() ? "hcl+g" : graph_type, gf));
  gf.Apply(&rec);
  Resources r = rf.Read();
  if (!r.new_words.entries.empty()) ValidateNewWords(r.new_words, *MakeWordTable(r.lexicon));
  rep.Lap("load");
  Cascade c = RecipeRunner(rec, r).Run();
  rep.Lap("build");
  Outputs o;
  SaveCascade(c, r, o.Stage(out).string());
  o.Commit();
  rep.Lap("save");
  ReportCascade(rep, c);
  rep.Add("new_words", r.new_words.entries.size());
  rep.AddFile("out", out);
  rep.Write(report);
  return 0;
}

int CmdAddWords(const std::string &dir, const std::string &words_file, double weight,
                const std::string &out_dir, const std::string &report) {
  Report rep("add-words");
  Cascade old = LoadCascadeDir(dir);
  Resources r = LoadCascadeResources(dir);
  NewWordList add = Load(words_file, [&](const std::string &p) { return ReadNewWordsFile(p, weight); });
  NewWordList all = r.new_words;
  all.entries.insert(all.entries.end(), add.entries.begin(), add.entries.end());
  try {
    ValidateNewWords(all, *MakeWordTable(r.lexicon));
  } catch (const Error &e) {
    throw CliError("input", e.what(), words_file);
  }
  r.new_words = all;
  rep.Lap("load");
  Cascade c = RecipeRunner(old.recipe, r).Run(&old.artifacts);
  rep.Lap("build");
  std::string target = out_dir.empty() ? dir : out_dir;
  Outputs o;
  SaveCascade(c, r, o.Stage(target).string());
  o.Commit();
  rep.Lap("save");
  ReportCascade(rep, c);
  rep.Add("new_words.added", add.entries.size());
  rep.Add("new_words.total", all.entries.size());
  rep.AddFile("out", target);
  rep.Write(report);
  return 0;
}

struct DecodeFlags {
  BeamConfig beam;
  int jobs = 1;
};

int CmdDecode(const std::string &dir, const std::vector<std::string> &inputs, const DecodeFlags &df,
              const std::string &out, const std::string &report) {
  Report rep("decode");
  df.beam.Validate();
  Cascade c = LoadCascadeDir(dir);
  std::vector<std::pair<std::string, FrameScores>> utts;
  for (const auto &p : inputs)
    utts.emplace_back(fs::path(p).stem().string(),
                      Load(p, [](const std::string &f) { return ReadFrameScoresFile(f); }));
  rep.Lap("load");
  std::vector<std::optional<DecodeResult>> results(utts.size());
  std::vector<std::string> errors(utts.size());
  std::vector<ComposeStats> stats(utts.size());
  std::atomic<size_t> next{0};
  auto worker = [&] {
    for (size_t k; (k = next++) < utts.size();) {
      try {
        results[k] = DecodeCascade(c, utts[k].second, df.beam, &stats[k]);
      } catch (const Error &e) {
        errors[k] = e.what();
      }
    }
  };
  int jobs = std::max(1, std::min<int>(df.jobs, static_cast<int>(utts.size())));
  std::vector<std::thread> pool;
  for (int j = 1; j < jobs; ++j) pool.emplace_back(worker);
  worker();
  for (auto &t : pool) t.join();
  rep.Lap("decode");
  for (size_t k = 0; k < utts.size(); ++k)
    if (!errors[k].empty()) throw CliError("runtime", errors[k], inputs[k]);

  Outputs o;
  std::ostringstream text;
  size_t frames = 0, expanded = 0;
  for (size_t k = 0; k < utts.size(); ++k) {
    text << utts[k].first << ' ' << std::setprecision(10) << results[k]->weight.Value();
    for (const auto &w : results[k]->words) text << ' ' << w;
    text << '\n';
    frames += results[k]->stats.frames;
    expanded += stats[k].states_expanded;
  }
  if (out.empty() || out == "-") {
    std::cout << text.str();
  } else {
    fs::path tmp = o.Stage(out);
    std::ofstream(tmp) << text.str();
    o.Commit();
    rep.AddFile("out", out);
  }
  rep.Add("recipe", c.recipe.name);
  rep.Add("utterances", utts.size());
  rep.Add("frames", frames);
  rep.Add("jobs", jobs);
  if (c.lazy) rep.Add("states_expanded", expanded);
  rep.Write(report);
  return 0;
}

int CmdEquivCheck(const std::string &a, const std::string &b, const EquivalenceOptions &eo,
                  size_t max_states, const std::string &report) {
  Report rep("equiv-check");
  Wfst fa = LoadGraph(a, max_states), fb = LoadGraph(b, max_states);
  rep.Lap("load");
  rep.AddGraph("a", fa);
  rep.AddGraph("b", fb);
  EquivalenceReport r = CheckEquivalence(fa, fb, eo);
  rep.Lap("compare");
  std::cout << (r.equivalent ? "EQUIVALENT" : "NOT EQUIVALENT") << " max_weight_delta=" << std::setprecision(6)
            << r.max_weight_delta << " paths=" << r.paths;
  if (!r.equivalent) std::cout << " first_difference=" << Quote(r.first_difference);
  std::cout << '\n';
  rep.Add("equivalent", r.equivalent ? 1 : 0);
  rep.Add("max_weight_delta", r.max_weight_delta);
  rep.Add("paths", r.paths);
  rep.Add("max_in", eo.max_in);
  rep.Add("max_out", eo.max_out);
  rep.Write(report);
  return r.equivalent ? 0 : 1;
}

int CmdStats(const std::string &spec, bool expand, size_t max_states, const std::string &report) {
  Report rep("stats");
  if (!fs::is_directory(spec)) {
    Wfst f = ReadFst(spec);
    rep.AddGraph("graph", f);
    rep.AddFile("in", spec);
    rep.Write(report.empty() ? "-" : report);
    return 0;
  }
  Cascade c = LoadCascadeDir(spec);
  ReportCascade(rep, c);
  for (const auto &[name, a] : c.artifacts) {
    if (auto *w = std::get_if<Wfst>(&a)) rep.AddGraph("artifact." + name, *w);
    else rep.Add("artifact." + name + ".states", std::get<VocabAcceptor>(a).NumStates());
  }
  if (c.table) rep.Add("lookahead.entries", c.table->NumStates());
  if (expand && c.lazy) {
    ComposeStats s;
    Wfst m = MaterializeCascade(c, max_states, &s);
    rep.Lap("expand");
    rep.AddGraph("expanded", m);
    rep.Add("cache.states_expanded", s.states_expanded);
    rep.Add("cache.states_cached", s.states_cached);
    rep.Add("cache.arcs_cached", s.arcs_cached);
    rep.Add("cache.pair_table_entries", s.pair_table_entries);
    rep.Add("cache.peak_bytes", s.peak_cache_bytes);
  }
  rep.Write(report.empty() ? "-" : report);
  return 0;
}

int CmdGenScores(const std::string &dir, const std::string &words, bool trailing_sil,
                 const ScoreGenOptions &so, const std::string &out, const std::string &report) {
  Report rep("gen-scores");
  Cascade c = LoadCascadeDir(dir);
  Resources r = LoadCascadeResources(dir);
  Utterance u;
  std::istringstream ss(words);
  for (std::string w; ss >> w;) u.words.push_back(w);
  if (u.words.empty()) throw CliError("usage", "--words is empty");
  u.trailing_sil = trailing_sil;
  u.seed = so.seed;
  FrameScores fs;
  try {
    fs = UtteranceScores(r, c, u, so);
  } catch (const Error &e) {
    throw CliError("input", e.what());
  }
  Outputs o;
  WriteFrameScoresFile(fs, o.Stage(out).string());
  o.Commit();
  rep.Add("frames", fs.NumFrames());
  rep.Add("units", fs.NumUnits());
  rep.AddFile("out", out);
  rep.Write(report);
  return 0;
}

// Lexicon, inventory, bigram and trigram models, new words, and a scored
// corpus for every built-in recipe's unit table (they share one).
int CmdGenToy(const std::string &out, unsigned seed, int num_words, int num_new, int num_utts,
              const std::string &report) {
  Report rep("gen-toy");
  Outputs o;
  fs::path d = o.Stage(out);
  fs::create_directories(d / "corpus");
  Resources r;
  ToyLexiconOptions lo;
  lo.num_words = num_words;
  lo.seed = seed;
  r.lexicon = GenerateToyLexicon(lo);
  std::vector<std::string> vocab = r.lexicon.Words();
  for (int order : {2, 3}) {
    ToyLmOptions to;
    to.order = order;
    to.seed = seed + order;
    NGramModel lm = GenerateToyLm(vocab, to);
    std::ofstream os(d / (order == 2 ? "bigram.arpa" : "trigram.arpa"));
    WriteArpa(lm, os);
    if (order == 2) r.lm = lm;
  }
  r.new_words = ToNewWords(GenerateToyNewWords(r.lexicon, num_new, seed + 7));
  {
    std::ofstream lx(d / "lexicon.txt");
    WriteLexicon(r.lexicon, lx);
    std::ofstream ph(d / "phones.txt");
    for (const auto &p : r.lexicon.Phones()) ph << p << '\n';
    std::ofstream nw(d / "new_words.txt");
    WriteNewWords(r.new_words, nw);
  }
  for (const auto &n : BuiltinRecipeNames()) {
    std::ofstream rf(d / (n + ".recipe"));
    rf << "# built-in recipe '" << n << "'\n";
    WriteRecipe(BuiltinRecipe(n), rf);
  }
  ToyCorpusOptions co;
  co.num_utterances = num_utts;
  co.seed = seed + 11;
  std::vector<Utterance> utts = GenerateToyCorpus(r, co);
  Cascade c = RecipeRunner(BuiltinRecipe("online"), r).Run();
  for (const Utterance &u : utts) WriteFrameScoresFile(UtteranceScores(r, c, u), (d / "corpus" / (u.id + ".scores")).string());
  {
    std::ofstream tr(d / "corpus" / "transcripts.txt");
    WriteTranscripts(utts, tr);
  }
  o.Commit();
  rep.Add("words", r.lexicon.entries.size());
  rep.Add("phones", r.lexicon.Phones().size());
  rep.Add("new_words", r.new_words.entries.size());
  rep.Add("utterances", utts.size());
  rep.AddFile("out", out);
  rep.Write(report);
  return 0;
}

}  // namespace

int main(int argc, char **argv) {
  CLI::App app{"Decoding-graph toolkit with run-time vocabulary expansion"};
  app.set_version_flag("--version", kVersion);
  app.require_subcommand(1);
  app.fallthrough();
  app.footer(RecipeHelp());
  std::string report;
  app.add_option("--report", report, "Run report path ('-' for stderr)")->capture_default_str();

  ResourceFlags lex_rf, g_rf, c_rf, s_rf;
  GraphFlags lex_gf, g_gf, c_gf;
  std::string lex_out, g_out, c_out, recipe, graph_type;

  auto *blex = app.add_subcommand("build-lexicon", "Build L");
  lex_rf.AddTo(blex, false, false);
  lex_gf.AddTo(blex, false);
  blex->add_option("--out", lex_out, "Output .fst (.isyms/.osyms beside it)")->required();

  auto *bg = app.add_subcommand("build-grammar", "Build G from an ARPA model");
  g_rf.AddTo(bg, true, false);
  g_gf.AddTo(bg, false);
  bg->add_option("--out", g_out, "Output .fst (.isyms/.osyms beside it)")->required();

  auto *bc = app.add_subcommand("build-cascade", "Run a recipe and save the prepared graphs");
  c_rf.AddTo(bc, true, true);
  c_gf.AddTo(bc, true);
  bc->add_option("--recipe", recipe, "Built-in recipe name or recipe file");
  bc->add_option("--graph-type", graph_type, "static | hcl+g | hclg1+g | hclgn+g0")
      ->check(CLI::IsMember({"static", "hcl+g", "hclg1+g", "hclgn+g0"}));
  bc->add_option("--out", c_out, "Cascade directory")->required();

  std::string aw_dir, aw_file, aw_out;
  double aw_weight = kDefaultNewWordWeight;
  auto *aw = app.add_subcommand("add-words", "Add new words to a cascade");
  aw->add_option("--cascade", aw_dir, "Cascade directory")->required();
  aw->add_option("words", aw_file, "New words: `word phone...` per line")->required();
  aw->add_option("--word-weight", aw_weight, "Weight of each new word")->capture_default_str();
  aw->add_option("--out", aw_out, "Write the expanded cascade here instead of in place");

  std::string dc_dir, dc_out;
  std::vector<std::string> dc_in;
  DecodeFlags df;
  double beam = std::numeric_limits<double>::infinity();
  auto *dc = app.add_subcommand("decode", "Decode frame-score files");
  dc->add_option("--cascade", dc_dir, "Cascade directory")->required();
  dc->add_option("scores", dc_in, "Frame-score files (`frames units` header, one row per frame)")->required();
  dc->add_option("--beam", beam, "Beam width (default unbounded)");
  dc->add_option("--max-active", df.beam.max_active, "Token limit per frame (0 = none)")->capture_default_str();
  dc->add_option("--self-loop-cost", df.beam.self_loop_cost, "Cost of staying in a unit")->capture_default_str();
  dc->add_option("--jobs", df.jobs, "Worker threads")->capture_default_str();
  dc->add_option("--out", dc_out, "Transcript file (default stdout)");

  std::string eq_a, eq_b;
  EquivalenceOptions eo;
  size_t max_states = 5'000'000;
  auto *eq = app.add_subcommand("equiv-check", "Compare two graphs (.fst or cascade directory)");
  eq->add_option("--a", eq_a, "First graph")->required();
  eq->add_option("--b", eq_b, "Second graph")->required();
  eq->add_option("--max-in", eo.max_in, "Longest unit sequence compared")->capture_default_str();
  eq->add_option("--max-out", eo.max_out, "Longest word sequence compared")->capture_default_str();
  eq->add_option("--tolerance", eo.tolerance, "Weight tolerance")->capture_default_str();
  eq->add_option("--max-states", max_states, "Expansion limit for lazy cascades")->capture_default_str();

  std::string st_in;
  bool st_expand = false;
  auto *st = app.add_subcommand("stats", "Sizes of a graph or cascade");
  st->add_option("graph", st_in, ".fst file or cascade directory")->required();
  st->add_flag("--expand", st_expand, "Expand the lazy composition and report cache counters");
  st->add_option("--max-states", max_states, "Expansion limit")->capture_default_str();

  std::string gs_dir, gs_words, gs_out;
  bool gs_sil = false;
  ScoreGenOptions so;
  auto *gs = app.add_subcommand("gen-scores", "Synthetic frame scores for a word sequence");
  gs->add_option("--cascade", gs_dir, "Cascade directory (for units and pronunciations)")->required();
  gs->add_option("--words", gs_words, "Space-separated words")->required();
  gs->add_flag("--trailing-sil", gs_sil, "Append a silence block");
  gs->add_option("--seed", so.seed)->capture_default_str();
  gs->add_option("--noise", so.noise)->capture_default_str();
  gs->add_option("--out", gs_out, "Output file")->required();

  std::string gt_out;
  unsigned gt_seed = 7;
  int gt_words = 50, gt_new = 5, gt_utts = 30;
  auto *gt = app.add_subcommand("gen-toy", "Write a toy lexicon, models, new words and corpus");
  gt->add_option("--out", gt_out, "Output directory")->required();
  gt->add_option("--seed", gt_seed)->capture_default_str();
  gt->add_option("--words", gt_words)->capture_default_str();
  gt->add_option("--new-words", gt_new)->capture_default_str();
  gt->add_option("--utterances", gt_utts)->capture_default_str();

  CLI11_PARSE(app, argc, argv);

  std::string command = app.get_subcommands().front()->get_name();
  try {
    if (*blex) return CmdBuildLexicon(lex_rf, lex_gf, lex_out, report);
    if (*bg) return CmdBuildGrammar(g_rf, g_gf, g_out, report);
    if (*bc) return CmdBuildCascade(c_rf, c_gf, recipe, graph_type, c_out, report);
    if (*aw) return CmdAddWords(aw_dir, aw_file, aw_weight, aw_out, report);
    if (*dc) {
      df.beam.beam = beam;
      return CmdDecode(dc_dir, dc_in, df, dc_out, report);
    }
    if (*eq) return CmdEquivCheck(eq_a, eq_b, eo, max_states, report);
    if (*st) return CmdStats(st_in, st_expand, max_states, report);
    if (*gs) return CmdGenScores(gs_dir, gs_words, gs_sil, so, gs_out, report);
    if (*gt) return CmdGenToy(gt_out, gt_seed, gt_words, gt_new, gt_utts, report);
  } catch (const CliError &e) {
    std::cerr << "error: command=" << command << " kind=" << e.kind;
    if (!e.file.empty()) std::cerr << " file=" << Quote(e.file);
    if (e.line) std::cerr << " line=" << e.line;
    std::cerr << " message=" << Quote(e.what()) << '\n';
    return e.kind == "usage" ? 2 : 1;
  } catch (const std::exception &e) {
    std::cerr << "error: command=" << command << " kind=runtime message=" << Quote(e.what()) << '\n';
    return 1;
  }
  return 0;
}
