#include "s2it/eval.hpp"

#include <cstdio>

#include "json.hpp"

namespace s2it {
namespace {

double ratio(std::size_t num, std::size_t den) { return den ? static_cast<double>(num) / static_cast<double>(den) : 0.0; }

std::string percent(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.1f", v * 100.0);
  return buf;
}

}  // namespace

MatchCounts match_quads(const std::vector<QuadPrediction>& gold, const std::vector<QuadPrediction>& pred) {
  return match_multisets(gold, pred);
}

MatchCounts match_pairs(const std::vector<PairPrediction>& gold, const std::vector<PairPrediction>& pred) {
  return match_multisets(gold, pred);
}

EvalReport micro_scores(const MatchCounts& totals) {
  EvalReport r;
  r.totals = totals;
  r.precision = ratio(totals.true_positives, totals.predicted_total);
  r.recall = ratio(totals.true_positives, totals.gold_total);
  r.f1 = r.precision + r.recall > 0 ? 2 * r.precision * r.recall / (r.precision + r.recall) : 0.0;
  return r;
}

EvalReport micro_scores(const std::vector<SentenceScore>& per_sentence, std::size_t malformed) {
  MatchCounts totals;
  for (const auto& s : per_sentence) totals += s.counts;
  EvalReport r = micro_scores(totals);
  r.per_sentence = per_sentence;
  r.malformed_count = malformed;
  return r;
}

MatchCounts score_quads(const std::vector<QuadPrediction>& gold, const std::vector<QuadPrediction>& pred) {
  return match_quads(dedup(gold), dedup(pred));
}

MatchCounts score_pairs(const std::vector<PairPrediction>& gold, const std::vector<PairPrediction>& pred) {
  return match_pairs(dedup(gold), dedup(pred));
}

EvalReport pair_scores(const std::vector<PairPrediction>& gold, const std::vector<PairPrediction>& pred) {
  return micro_scores(score_pairs(gold, pred));
}

double element_accuracy(const std::vector<QuadPrediction>& gold, const std::vector<QuadPrediction>& pred,
                        Target target) {
  if (gold.size() != pred.size())
    throw DataError("element_accuracy: " + std::to_string(pred.size()) + " predictions for " +
                    std::to_string(gold.size()) + " gold quads");
  if (gold.empty()) return 1.0;
  std::size_t hits = 0;
  for (std::size_t i = 0; i < gold.size(); ++i) {
    const bool same = target == Target::category ? gold[i].category == pred[i].category
                                                 : gold[i].sentiment && gold[i].sentiment == pred[i].sentiment;
    hits += same ? 1 : 0;
  }
  return ratio(hits, gold.size());
}

std::vector<QuadPrediction> align_to_gold(const std::vector<QuadPrediction>& gold,
                                          const std::vector<QuadPrediction>& pred) {
  std::vector<bool> used(pred.size(), false);
  std::vector<QuadPrediction> out;
  out.reserve(gold.size());
  for (const auto& g : gold) {
    QuadPrediction match{g.aspect, g.opinion, "", std::nullopt};
    for (std::size_t i = 0; i < pred.size(); ++i) {
      if (!used[i] && pred[i].aspect == g.aspect && pred[i].opinion == g.opinion) {
        used[i] = true;
        match = pred[i];
        break;
      }
    }
    out.push_back(std::move(match));
  }
  return out;
}

std::vector<QuadPrediction> gold_quads(const SentenceGraph& graph) {
  std::vector<QuadPrediction> out;
  for (const auto& q : graph.quads()) {
    out.push_back({normalize(graph.sentence().span_text(q.aspect)), normalize(graph.sentence().span_text(q.opinion)),
                   term_text(normalize(q.category)), q.sentiment});
  }
  return out;
}

std::vector<PairPrediction> gold_pair_predictions(const SentenceGraph& graph) {
  std::vector<PairPrediction> out;
  for (const auto& q : gold_quads(graph)) out.push_back({q.aspect, q.opinion});
  return out;
}

std::string report_json(const EvalReport& report, std::string_view granularity, bool per_sentence) {
  nlohmann::ordered_json j;
  j["granularity"] = granularity;
  j["precision"] = report.precision;
  j["recall"] = report.recall;
  j["f1"] = report.f1;
  j["true_positives"] = report.totals.true_positives;
  j["predicted_total"] = report.totals.predicted_total;
  j["gold_total"] = report.totals.gold_total;
  j["malformed_count"] = report.malformed_count;
  if (per_sentence) {
    auto& rows = j["per_sentence"] = nlohmann::ordered_json::array();
    for (const auto& s : report.per_sentence)
      rows.push_back({{"sentence_id", s.sentence_id},
                      {"true_positives", s.counts.true_positives},
                      {"predicted_total", s.counts.predicted_total},
                      {"gold_total", s.counts.gold_total}});
  }
  return j.dump(2);
}

std::string report_table(const EvalReport& report, std::string_view granularity) {
  std::string out = "granularity  P      R      F1     tp/pred/gold  malformed\n";
  char line[160];
  std::snprintf(line, sizeof line, "%-12.*s %-6s %-6s %-6s %zu/%zu/%zu  %zu\n", static_cast<int>(granularity.size()),
                granularity.data(), percent(report.precision).c_str(), percent(report.recall).c_str(),
                percent(report.f1).c_str(), report.totals.true_positives, report.totals.predicted_total,
                report.totals.gold_total, report.malformed_count);
  return out + line;
}

}  // namespace s2it
