#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <fstream>
#include <sstream>

#include "s2it/parallel.hpp"
#include "s2it/pipeline.hpp"
#include "support.hpp"

using namespace s2it;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
  auto dir = fs::temp_directory_path() / ("s2it_pipeline_" + name);
  fs::remove_all(dir);
  return dir;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::string flip(std::string_view s) {
  if (s == "negative") return "positive";
  if (s == "positive") return "neutral";
  return "negative";
}

// Gold answers with the sentiment of the first `flips` records changed.
class SentimentFlipper : public Predictor {
 public:
  SentimentFlipper(const std::vector<SentenceGraph>& corpus, std::size_t flips) : gold_(corpus, PromptConfig{}), flips_(flips) {}
  std::string predict(const InstructionExample& prompt) override {
    std::string out = gold_.predict(prompt);
    if (prompt.task != TaskKind::classify_pair) return out;
    std::string result;
    std::size_t pos = 0, record = 0;
    const std::string key = "sentiment: ";
    for (std::size_t k; (k = out.find(key, pos)) != std::string::npos; ++record) {
      const std::size_t b = k + key.size();
      std::size_t e = b;
      while (e < out.size() && out[e] >= 'a' && out[e] <= 'z') ++e;
      result += out.substr(pos, b - pos);
      const std::string word = out.substr(b, e - b);
      result += record < flips_ ? flip(word) : word;
      pos = e;
    }
    return result + out.substr(pos);
  }

 private:
  GoldReplayPredictor gold_;
  std::size_t flips_;
};

PipelineConfig config_for(const fs::path& dir, unsigned jobs = 1) {
  PipelineConfig c;
  c.run_dir = dir;
  c.jobs = jobs;
  return c;
}

}  // namespace

TEST_CASE("parallel_map keeps index order and propagates errors") {
  auto squares = parallel_map<int>(1000, 8, [](std::size_t i) { return static_cast<int>(i * i); });
  for (std::size_t i = 0; i < squares.size(); ++i) REQUIRE(squares[i] == static_cast<int>(i * i));
  CHECK(parallel_map<int>(0, 4, [](std::size_t) { return 1; }).empty());
  CHECK_THROWS_AS(parallel_map<int>(100, 4,
                                    [](std::size_t i) {
                                      if (i == 37) throw DataError("bad");
                                      return 0;
                                    }),
                  DataError);
}

TEST_CASE("gold predictor scores perfectly") {
  const auto corpus = s2it::testing::fixture_graphs();
  GoldReplayPredictor gold(corpus, PromptConfig{});
  auto dir = scratch("gold");
  auto report = run_two_stage(corpus, gold, config_for(dir, 4));
  CHECK(report.quad.f1 == 1.0);
  CHECK(report.pair.f1 == 1.0);
  CHECK(report.quad.totals == MatchCounts{10, 10, 10});
  CHECK(report.stage1_malformed == 0);
  CHECK(report.stage2_malformed == 0);
  CHECK(report.stage2_prompts == 6);  // "hello ." has no pairs and skips stage 2
  for (auto f : {"config.json", "report.json", "report.txt", "stage1/prompts_extract_ao.jsonl",
                 "stage1/raw_extract_oa.jsonl", "stage1/decoded_extract_ao.jsonl", "stage1/merged_pairs.jsonl",
                 "stage2/prompts_classify_pair.jsonl", "stage2/raw_classify_pair.jsonl",
                 "stage2/decoded_classify_pair.jsonl"})
    CHECK_MESSAGE(fs::exists(dir / f), f);
  auto s2 = run_stage2_isolated(corpus, gold, config_for(dir));
  CHECK(s2.category_accuracy == 1.0);
  CHECK(s2.sentiment_accuracy == 1.0);
  CHECK(s2.quad.f1 == 1.0);
  CHECK(fs::exists(dir / "stage2_gold"));
}

TEST_CASE("heuristic predictor is a weak but valid baseline") {
  const auto corpus = s2it::testing::fixture_graphs();
  HeuristicPredictor h(corpus, {"restaurant general", Sentiment::positive}, PromptConfig{});
  auto report = run_two_stage(corpus, h, config_for(scratch("heuristic")));
  CHECK(report.quad.f1 >= 0.0);
  CHECK(report.quad.f1 < 1.0);
  CHECK(report.pair.f1 > 0.0);
  CHECK(report.pair.f1 < 1.0);
}

TEST_CASE("stage 2 alone: flipped sentiments score zero, partial flips two thirds") {
  const auto corpus = s2it::testing::fixture_graphs();
  SentimentFlipper all(corpus, 100);
  auto s2 = run_stage2_isolated(corpus, all, config_for(scratch("flip_all")));
  CHECK(s2.sentiment_accuracy == 0.0);
  CHECK(s2.category_accuracy == 1.0);
  CHECK(s2.quad.f1 == 0.0);

  const std::vector<SentenceGraph> worked{corpus.front()};
  SentimentFlipper one(worked, 1);
  auto partial = run_stage2_isolated(worked, one, config_for(scratch("flip_one")));
  CHECK(partial.sentiment_accuracy == doctest::Approx(2.0 / 3));
  CHECK(partial.quad.f1 == doctest::Approx(2.0 / 3));
}

TEST_CASE("intersection merge keeps the pairs both directions agree on") {
  // the heuristic gives the same pairs in both directions
  const auto corpus = s2it::testing::fixture_graphs();
  HeuristicPredictor h(corpus, {"restaurant general", Sentiment::positive}, PromptConfig{});
  auto u = run_two_stage(corpus, h, config_for(scratch("union")));
  auto c = config_for(scratch("intersection"));
  c.merge = MergeStrategy::intersection;
  auto i = run_two_stage(corpus, h, c);
  CHECK(i.pair.totals == u.pair.totals);
}

TEST_CASE("reruns are byte-identical regardless of thread count") {
  const auto corpus = s2it::testing::fixture_graphs();
  HeuristicPredictor h(corpus, {"restaurant general", Sentiment::positive}, PromptConfig{});
  auto a = scratch("rerun_a"), b = scratch("rerun_b");
  run_two_stage(corpus, h, config_for(a, 1));
  run_two_stage(corpus, h, config_for(b, 8));
  std::size_t compared = 0;
  for (const auto& entry : fs::recursive_directory_iterator(a)) {
    if (!entry.is_regular_file()) continue;
    const auto rel = fs::relative(entry.path(), a);
    if (rel == "config.json") continue;  // records the job count and run dir
    CHECK_MESSAGE(slurp(entry.path()) == slurp(b / rel), rel.string());
    ++compared;
  }
  CHECK(compared >= 9);
}

TEST_CASE("decoded record files") {
  auto rec = decode_raw("s:1", "classify_pair",
                        "aspect: pizza, opinion: great, category: food quality, sentiment: great | aspect: junk",
                        task_fields(TaskKind::classify_pair), DecodeOptions{});
  CHECK(rec.malformed == 1);
  auto back = decoded_from_json(decoded_to_json(rec));
  CHECK(back.predictions == rec.predictions);
  auto quads = to_quads(back);
  REQUIRE(quads.size() == 1);
  CHECK_FALSE(quads[0].sentiment.has_value());
  CHECK(task_fields(TaskKind::extract_oa) == std::vector<std::string>{"opinion", "aspect"});
  CHECK(to_pairs(decode_raw("s:1", "extract_oa", "opinion: ok, aspect: NULL", task_fields(TaskKind::extract_oa), {})) ==
        std::vector<PairPrediction>{{std::nullopt, "ok"}});
}
