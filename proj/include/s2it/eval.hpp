#pragma once

#include <map>
#include <string>
#include <vector>

#include "s2it/decode.hpp"
#include "s2it/graph.hpp"

namespace s2it {

struct MatchCounts {
  std::size_t true_positives = 0;
  std::size_t predicted_total = 0;
  std::size_t gold_total = 0;

  MatchCounts& operator+=(const MatchCounts& o) {
    true_positives += o.true_positives;
    predicted_total += o.predicted_total;
    gold_total += o.gold_total;
    return *this;
  }
  bool operator==(const MatchCounts&) const = default;
};

// Size of the multiset intersection under exact equality.
template <typename T>
MatchCounts match_multisets(const std::vector<T>& gold, const std::vector<T>& pred) {
  std::map<T, std::size_t> remaining;
  for (const auto& g : gold) ++remaining[g];
  MatchCounts c{0, pred.size(), gold.size()};
  for (const auto& p : pred) {
    auto it = remaining.find(p);
    if (it != remaining.end() && it->second > 0) {
      --it->second;
      ++c.true_positives;
    }
  }
  return c;
}

MatchCounts match_quads(const std::vector<QuadPrediction>& gold, const std::vector<QuadPrediction>& pred);
MatchCounts match_pairs(const std::vector<PairPrediction>& gold, const std::vector<PairPrediction>& pred);

struct SentenceScore {
  std::string sentence_id;
  MatchCounts counts;
};

struct EvalReport {
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
  MatchCounts totals;
  std::vector<SentenceScore> per_sentence;
  std::size_t malformed_count = 0;
};

// Micro-averaged scores: counts are summed before dividing; 0/0 is 0.
EvalReport micro_scores(const std::vector<SentenceScore>& per_sentence, std::size_t malformed = 0);
EvalReport micro_scores(const MatchCounts& totals);

// Set-level scoring for one sentence: both sides are deduplicated first.
MatchCounts score_quads(const std::vector<QuadPrediction>& gold, const std::vector<QuadPrediction>& pred);
MatchCounts score_pairs(const std::vector<PairPrediction>& gold, const std::vector<PairPrediction>& pred);

// Single-sentence convenience wrapper over score_pairs.
EvalReport pair_scores(const std::vector<PairPrediction>& gold, const std::vector<PairPrediction>& pred);

// Fraction of positions whose category (or sentiment) agrees. Predictions must
// be aligned one-to-one with gold. Empty gold scores 1.
double element_accuracy(const std::vector<QuadPrediction>& gold, const std::vector<QuadPrediction>& pred,
                        Target target);

// Reorders predictions so position j carries the first unused prediction for
// gold pair j; a gold pair with no prediction gets an empty, unparseable quad.
std::vector<QuadPrediction> align_to_gold(const std::vector<QuadPrediction>& gold,
                                          const std::vector<QuadPrediction>& pred);

// Gold quads / pairs of a sentence as normalized strings.
std::vector<QuadPrediction> gold_quads(const SentenceGraph& graph);
std::vector<PairPrediction> gold_pair_predictions(const SentenceGraph& graph);

std::string report_json(const EvalReport& report, std::string_view granularity, bool per_sentence = false);
// Percentages to one decimal, e.g. "P 66.7  R 50.0  F1 57.1".
std::string report_table(const EvalReport& report, std::string_view granularity);

}  // namespace s2it
