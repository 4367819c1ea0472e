// Acceptance checks, one per criterion. Prints one line per criterion run:
//   PASS|FAIL|BLOCKED  <n> <name>: <detail>
// Exit status: 0 all selected passed, 1 any failed, 77 nothing failed but
// something could not run (the ACOS release files are absent).
//
// Checks that need the ACOS v2 release read it from $S2IT_ACOS_DIR, laid out
// as Restaurant-ACOS/*.tsv and Laptop-ACOS/*.tsv. A "<stem>.conllu" next to a
// .tsv supplies its parses.

#include <cstdlib>
#include <fstream>
#include <functional>
#include <iostream>
#include <random>
#include <set>
#include <sstream>

#include "CLI11.hpp"
#include "s2it/baseline.hpp"
#include "s2it/corpus.hpp"
#include "s2it/decode.hpp"
#include "s2it/eval.hpp"
#include "s2it/pipeline.hpp"
#include "s2it/promptgen.hpp"
#include "s2it/syntax.hpp"

using namespace s2it;
namespace fs = std::filesystem;

namespace {

enum class Verdict { pass, fail, blocked };

struct Outcome {
  Verdict verdict;
  std::string detail;
};

fs::path data_dir() { return S2IT_TEST_DATA; }

std::vector<SentenceGraph> fixture() {
  return align_corpus(load_acos(data_dir() / "fixture.tsv", CategorySet{}), load_conllu(data_dir() / "fixture.conllu"));
}

struct Domain {
  std::string name;
  std::vector<SentenceGraph> graphs;
  std::size_t sentences = 0;
  bool parsed = true;
};

// Both ACOS domains, or nullopt when the release is not available.
std::optional<std::vector<Domain>> acos_release() {
  const char* root = std::getenv("S2IT_ACOS_DIR");
  if (!root || !*root) return std::nullopt;
  std::vector<Domain> out;
  for (const std::string name : {"Restaurant-ACOS", "Laptop-ACOS"}) {
    const fs::path dir = fs::path(root) / name;
    if (!fs::is_directory(dir)) return std::nullopt;
    std::vector<fs::path> files;
    for (const auto& e : fs::directory_iterator(dir))
      if (e.path().extension() == ".tsv") files.push_back(e.path());
    if (files.empty()) return std::nullopt;
    std::sort(files.begin(), files.end());
    Domain d{name, {}, 0, true};
    for (const auto& f : files) {
      auto sentences = load_acos(f, CategorySet{});
      d.sentences += sentences.size();
      auto conllu = fs::path(f).replace_extension(".conllu");
      std::vector<SentenceGraph> graphs;
      if (fs::exists(conllu)) {
        graphs = align_corpus(sentences, load_conllu(conllu));
      } else {
        graphs = unparsed_corpus(sentences);
        d.parsed = false;
      }
      d.graphs.insert(d.graphs.end(), graphs.begin(), graphs.end());
    }
    out.push_back(std::move(d));
  }
  return out;
}

std::string fmt(double v) {
  std::ostringstream ss;
  ss.precision(1);
  ss << std::fixed << v * 100.0;
  return ss.str();
}

// --- 1 -------------------------------------------------------------------

Outcome golden_fidelity() {
  const auto graphs = fixture();
  const auto& g = graphs.front();
  std::ifstream in(std::string(S2IT_GOLDEN) + "/worked_examples.jsonl");
  PromptConfig config;
  std::vector<std::string> mismatched;
  std::size_t checked = 0;
  for (std::string line; std::getline(in, line);) {
    if (line.empty()) continue;
    const auto want = from_jsonl(line);
    const auto got = generate(g, want.task, config);
    // training form carries the end marker; strip it back off for the comparison
    auto trained = from_jsonl(to_jsonl(got, config.end_marker));
    trained.output.resize(trained.output.size() - config.end_marker.size());
    ++checked;
    if (trained.instruction != want.instruction || trained.input != want.input || trained.output != want.output) {
      std::string field = trained.instruction != want.instruction ? "instruction"
                          : trained.input != want.input           ? "input"
                                                                  : "output";
      mismatched.push_back(std::string(to_string(want.task)) + "(" + field + ")");
    }
  }
  if (checked != 9) return {Verdict::fail, "expected 9 reference examples, found " + std::to_string(checked)};
  if (mismatched.empty()) return {Verdict::pass, "9/9 examples byte-identical"};
  std::string list;
  for (const auto& m : mismatched) list += (list.empty() ? "" : ", ") + m;
  return {Verdict::fail, std::to_string(9 - mismatched.size()) + "/9 byte-identical; differing: " + list +
                             " (neighbor listing order in the reference is not derivable from the tree)"};
}

// --- 2 -------------------------------------------------------------------

struct RoundTrip {
  double quad_f1, pair_f1, category_accuracy, sentiment_accuracy;
  bool perfect() const { return quad_f1 == 1.0 && pair_f1 == 1.0 && category_accuracy == 1.0 && sentiment_accuracy == 1.0; }
  std::string summary() const {
    return "quad F1 " + fmt(quad_f1) + ", pair F1 " + fmt(pair_f1) + ", category acc " + fmt(category_accuracy) +
           ", sentiment acc " + fmt(sentiment_accuracy);
  }
};

RoundTrip gold_round_trip(const std::vector<SentenceGraph>& corpus, SyntaxStyle style, const std::string& tag) {
  PipelineConfig config;
  config.prompt.style = style;
  config.run_dir = fs::temp_directory_path() / ("s2it_acceptance_" + tag);
  fs::remove_all(config.run_dir);
  GoldReplayPredictor gold(corpus, config.prompt);
  const auto report = run_two_stage(corpus, gold, config);
  const auto s2 = run_stage2_isolated(corpus, gold, config);
  return {report.quad.f1, report.pair.f1, s2.category_accuracy, s2.sentiment_accuracy};
}

Outcome oracle_round_trip() {
  const auto fx = gold_round_trip(fixture(), SyntaxStyle::natural_language, "fixture");
  if (!fx.perfect()) return {Verdict::fail, "fixture corpus: " + fx.summary()};
  const auto release = acos_release();
  if (!release) return {Verdict::blocked, "ACOS release not found ($S2IT_ACOS_DIR); fixture corpus: " + fx.summary()};
  std::string detail;
  bool ok = true;
  for (const auto& d : *release) {
    const auto r = gold_round_trip(d.graphs, d.parsed ? SyntaxStyle::natural_language : SyntaxStyle::none, d.name);
    ok = ok && r.perfect();
    detail += (detail.empty() ? "" : "; ") + d.name + ": " + r.summary();
  }
  return {ok ? Verdict::pass : Verdict::fail, detail};
}

// --- 3 -------------------------------------------------------------------

Outcome corpus_statistics() {
  const auto release = acos_release();
  if (!release) return {Verdict::blocked, "ACOS release not found ($S2IT_ACOS_DIR)"};
  const std::size_t restaurant = (*release)[0].sentences, laptop = (*release)[1].sentences;
  const bool ok = restaurant == 2286 && laptop == 4076;
  return {ok ? Verdict::pass : Verdict::fail, "Restaurant " + std::to_string(restaurant) + " (want 2286), Laptop " +
                                                  std::to_string(laptop) + " (want 4076)"};
}

// --- 4 -------------------------------------------------------------------

// Independent matcher: for every prediction, claim the first unclaimed equal gold quad.
std::size_t brute_force_matches(const std::vector<QuadPrediction>& gold, const std::vector<QuadPrediction>& pred) {
  std::vector<bool> used(gold.size(), false);
  std::size_t tp = 0;
  for (const auto& p : pred)
    for (std::size_t i = 0; i < gold.size(); ++i)
      if (!used[i] && gold[i].aspect == p.aspect && gold[i].opinion == p.opinion && gold[i].category == p.category &&
          gold[i].sentiment == p.sentiment) {
        used[i] = true;
        ++tp;
        break;
      }
  return tp;
}

Outcome evaluator_oracle() {
  std::mt19937 rng(20240601);
  const std::vector<std::string> terms{"pizza", "staff", "great", "rude", "cheap"};
  auto term = [&]() -> Term { return rng() % 6 ? Term{terms[rng() % terms.size()]} : std::nullopt; };
  auto quads = [&] {
    std::vector<QuadPrediction> out;
    for (int i = static_cast<int>(rng() % 7); i > 0; --i)
      out.push_back({term(), term(), rng() % 2 ? "food quality" : "service general", static_cast<Sentiment>(rng() % 3)});
    return out;
  };
  const int instances = 5000;
  std::vector<SentenceScore> rows;
  std::size_t tp = 0, np = 0, ng = 0;
  for (int i = 0; i < instances; ++i) {
    const auto gold = quads(), pred = quads();
    const auto counts = match_quads(gold, pred);
    const auto want = brute_force_matches(gold, pred);
    if (counts.true_positives != want || counts.predicted_total != pred.size() || counts.gold_total != gold.size())
      return {Verdict::fail, "instance " + std::to_string(i) + ": tp " + std::to_string(counts.true_positives) +
                                 " vs oracle " + std::to_string(want)};
    const auto one = micro_scores(counts);
    const double p = pred.empty() ? 0.0 : static_cast<double>(want) / pred.size();
    const double r = gold.empty() ? 0.0 : static_cast<double>(want) / gold.size();
    const double f = p + r > 0 ? 2 * p * r / (p + r) : 0.0;
    if (one.precision != p || one.recall != r || one.f1 != f)
      return {Verdict::fail, "instance " + std::to_string(i) + ": P/R/F1 disagree with the oracle"};
    rows.push_back({std::to_string(i), counts});
    tp += want;
    np += pred.size();
    ng += gold.size();
  }
  const auto micro = micro_scores(rows);
  const double p = static_cast<double>(tp) / np, r = static_cast<double>(tp) / ng, f = 2 * p * r / (p + r);
  if (micro.precision != p || micro.recall != r || micro.f1 != f)
    return {Verdict::fail, "corpus-level micro scores disagree with the oracle"};
  return {Verdict::pass, std::to_string(instances) + " random instances agree exactly (micro F1 " + fmt(f) + ")"};
}

// --- 5 -------------------------------------------------------------------

std::string fuzz_text(std::mt19937& rng) {
  static const std::vector<std::string> pieces{
      "aspect", "opinion", "category", "sentiment", "ASPECT", ":", ",", "|", " | ", "null", "none", "positive",
      "negative", " ", "\n", "food", "très", "😀", "日本語", "<|im_end|>", "<|", "\"", "\\", "{", "-", "."};
  std::string s;
  for (int i = static_cast<int>(rng() % 48); i > 0; --i)
    s += rng() % 8 ? pieces[rng() % pieces.size()] : std::string(1, static_cast<char>(0x20 + rng() % 0x5f));
  return s;
}

bool renders_back(const SentenceGraph& g, const PromptConfig& config) {
  const auto gold = gold_quads(g);
  const auto quads = decode_quads(generate(g, TaskKind::classify_pair, config).output);
  const auto ao = decode_pairs(generate(g, TaskKind::extract_ao, config).output, false);
  const auto oa = decode_pairs(generate(g, TaskKind::extract_oa, config).output, true);
  return quads.malformed == 0 && quads.quads == gold && ao.pairs == gold_pair_predictions(g) &&
         oa.pairs == gold_pair_predictions(g);
}

Outcome decoder_robustness() {
  std::mt19937 rng(424242);
  const std::vector<std::vector<std::string>> specs{
      {"aspect", "opinion"}, {"opinion", "aspect"}, {"aspect", "opinion", "category", "sentiment"}, {"aspect", "category"}};
  for (int i = 0; i < 10000; ++i) {
    const auto text = fuzz_text(rng);
    try {
      const auto& fields = specs[i % specs.size()];
      for (const auto& r : parse_records(text, fields).records)
        if (r.size() != fields.size()) return {Verdict::fail, "fuzz input " + std::to_string(i) + ": short record"};
    } catch (const std::exception& e) {
      return {Verdict::fail, "fuzz input " + std::to_string(i) + " threw: " + e.what()};
    }
  }
  PromptConfig config;
  config.style = SyntaxStyle::none;  // outputs do not depend on syntax
  std::size_t fixture_sentences = 0;
  for (const auto& g : fixture()) {
    if (!renders_back(g, config)) return {Verdict::fail, "fixture sentence " + g.id() + " does not round-trip"};
    ++fixture_sentences;
  }
  const std::string done = "10000 fuzzed inputs decoded without failure; " + std::to_string(fixture_sentences) +
                           " fixture sentences round-trip";
  const auto release = acos_release();
  if (!release) return {Verdict::blocked, done + "; ACOS release not found ($S2IT_ACOS_DIR)"};
  std::size_t n = 0;
  for (const auto& d : *release)
    for (const auto& g : d.graphs) {
      if (!renders_back(g, config)) return {Verdict::fail, d.name + " sentence " + g.id() + " does not round-trip"};
      ++n;
    }
  return {Verdict::pass, done + "; " + std::to_string(n) + " corpus sentences round-trip"};
}

// --- 6 -------------------------------------------------------------------

// Empty when every invariant holds, else a description of the first violation.
std::string syntax_violation(const SentenceGraph& g) {
  try {
    check_single_head(g.edges(), g.size());
  } catch (const DataError& e) {
    return e.what();
  }
  const int n = static_cast<int>(g.size());
  for (int i = 1; i <= n; ++i)
    for (int j = 1; j <= n; ++j)
      if (g.adjacent(i, j) != g.adjacent(j, i)) return "adjacency not symmetric at " + std::to_string(i);
  for (int i = 1; i <= n; ++i) {
    std::vector<int> prev;
    for (int k = 1; k <= 4; ++k) {
      const auto cur = neighbors(g, Span{i, i}, k);
      if (!std::includes(cur.begin(), cur.end(), prev.begin(), prev.end()))
        return "neighbors of " + std::to_string(i) + " shrink at k=" + std::to_string(k);
      prev = cur;
    }
    // 1-hop neighbors are exactly the tokens sharing a retained edge
    std::set<int> direct;
    for (std::size_t e = 0; e < g.edges().size(); ++e) {
      const auto& edge = g.edges()[e];
      if (!g.retained(e) || edge.head == 0) continue;
      if (edge.head == i) direct.insert(edge.dependent);
      if (edge.dependent == i) direct.insert(edge.head);
    }
    const auto one = neighbors(g, Span{i, i}, 1);
    if (std::set<int>(one.begin(), one.end()) != direct) return "1-hop neighbors of " + std::to_string(i) + " wrong";
  }
  return {};
}

SentenceGraph random_tree(std::mt19937& rng, int n) {
  static const std::vector<std::string> labels{"amod", "nsubj", "punct", "det", "conj", "obj", "advmod", "cc"};
  AnnotatedSentence s;
  s.id = "random";
  for (int i = 1; i <= n; ++i) s.tokens.push_back({i, "w" + std::to_string(i)});
  std::vector<int> order(n);
  for (int i = 0; i < n; ++i) order[i] = i + 1;
  std::shuffle(order.begin(), order.end(), rng);
  s.edges.resize(n);
  for (int k = 0; k < n; ++k) {
    const int head = k == 0 ? 0 : order[rng() % k];
    s.edges[order[k] - 1] = {head, order[k], k == 0 ? "root" : labels[rng() % labels.size()]};
  }
  return SentenceGraph(std::move(s));
}

Outcome syntax_invariants() {
  std::mt19937 rng(777);
  for (int i = 0; i < 1000; ++i) {
    const auto g = random_tree(rng, 1 + static_cast<int>(rng() % 30));
    if (auto v = syntax_violation(g); !v.empty()) return {Verdict::fail, "random tree " + std::to_string(i) + ": " + v};
  }
  for (const auto& g : fixture())
    if (auto v = syntax_violation(g); !v.empty()) return {Verdict::fail, g.id() + ": " + v};
  const std::string done = "1000 random trees and the fixture corpus satisfy all invariants";
  const auto release = acos_release();
  if (!release) return {Verdict::blocked, done + "; ACOS release not found ($S2IT_ACOS_DIR)"};
  std::size_t n = 0;
  for (const auto& d : *release) {
    if (!d.parsed) return {Verdict::blocked, done + "; " + d.name + " has no .conllu parses next to its .tsv files"};
    for (const auto& g : d.graphs) {
      if (auto v = syntax_violation(g); !v.empty()) return {Verdict::fail, g.id() + ": " + v};
      ++n;
    }
  }
  return {Verdict::pass, done + "; so do " + std::to_string(n) + " corpus sentences"};
}

// --- 7 -------------------------------------------------------------------

std::vector<std::string> split_lines(const std::string& s) {
  std::vector<std::string> out;
  std::istringstream in(s);
  for (std::string line; std::getline(in, line);) out.push_back(line);
  return out;
}

bool is_syntax_line(const std::string& line) {
  return line.rfind("dependency relation: ", 0) == 0 || line.rfind("subgraph: ", 0) == 0;
}

Outcome ablation_plumbing() {
  const auto corpus = fixture();
  const fs::path root = fs::temp_directory_path() / "s2it_acceptance_ablation";
  fs::remove_all(root);
  const std::vector<SyntaxStyle> styles{SyntaxStyle::natural_language, SyntaxStyle::symbol, SyntaxStyle::none};
  for (auto style : styles) {
    PromptConfig config;
    config.style = style;
    for (auto task : kAllTasks) {
      std::vector<InstructionExample> examples;
      for (const auto& g : corpus) examples.push_back(generate(g, task, config));
      emit_jsonl(examples, root / std::string(to_string(style)) / (std::string(to_string(task)) + ".jsonl"), true);
    }
  }
  std::size_t differing = 0, records = 0;
  for (auto task : kAllTasks) {
    const std::string file = std::string(to_string(task)) + ".jsonl";
    std::vector<std::vector<InstructionExample>> variant;
    for (auto style : styles) variant.push_back(read_jsonl(root / std::string(to_string(style)) / file));
    for (std::size_t r = 0; r < variant[0].size(); ++r) {
      ++records;
      const auto &nl = variant[0][r], &sym = variant[1][r], &none = variant[2][r];
      for (const auto* other : {&sym, &none})
        if (other->instruction != nl.instruction || other->output != nl.output || other->sentence_id != nl.sentence_id)
          return {Verdict::fail, file + " record " + std::to_string(r + 1) + ": a non-syntax field differs"};
      std::vector<std::string> plain[3];
      std::size_t syntax_lines[3] = {0, 0, 0};
      for (int v = 0; v < 3; ++v)
        for (const auto& line : split_lines(variant[v][r].input)) {
          if (is_syntax_line(line))
            ++syntax_lines[v];
          else
            plain[v].push_back(line);
        }
      if (plain[0] != plain[1] || plain[0] != plain[2])
        return {Verdict::fail, file + " record " + std::to_string(r + 1) + ": a non-syntax input line differs"};
      if (syntax_lines[0] == 0 || syntax_lines[0] != syntax_lines[1] || syntax_lines[2] != 0)
        return {Verdict::fail, file + " record " + std::to_string(r + 1) + ": syntax blocks missing or misplaced"};
      if (nl.input != sym.input) ++differing;
    }
  }
  if (differing == 0) return {Verdict::fail, "nl and symbol variants are identical"};
  return {Verdict::pass, "3 variants x 9 tasks x " + std::to_string(corpus.size()) +
                             " sentences differ only in syntax blocks (" + std::to_string(differing) + "/" +
                             std::to_string(records) + " nl/symbol records differ)"};
}

struct Criterion {
  int number;
  std::string name;
  std::function<Outcome()> run;
};

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Acceptance checks"};
  std::vector<int> selected;
  app.add_option("--criterion", selected, "Criterion number(s) to run (default: all)")->check(CLI::Range(1, 7));
  CLI11_PARSE(app, argc, argv);

  const std::vector<Criterion> criteria{
      {1, "golden template fidelity", golden_fidelity},
      {2, "gold oracle round trip", oracle_round_trip},
      {3, "corpus statistics", corpus_statistics},
      {4, "evaluator oracle equivalence", evaluator_oracle},
      {5, "decoder robustness", decoder_robustness},
      {6, "syntax invariants", syntax_invariants},
      {7, "ablation plumbing", ablation_plumbing},
  };
  bool failed = false, blocked = false;
  for (const auto& c : criteria) {
    if (!selected.empty() && std::find(selected.begin(), selected.end(), c.number) == selected.end()) continue;
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o = {Verdict::fail, std::string("threw: ") + e.what()};
    }
    const char* tag = o.verdict == Verdict::pass ? "PASS" : o.verdict == Verdict::fail ? "FAIL" : "BLOCKED";
    std::cout << tag << "  " << c.number << " " << c.name << ": " << o.detail << std::endl;
    failed = failed || o.verdict == Verdict::fail;
    blocked = blocked || o.verdict == Verdict::blocked;
  }
  return failed ? 1 : blocked ? 77 : 0;
}
