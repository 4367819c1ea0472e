#pragma once

#include <algorithm>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "s2it/types.hpp"

namespace s2it {

// A normalized term; std::nullopt is the NULL (implicit) marker.
using Term = std::optional<std::string>;

// Lowercase, collapse whitespace, strip leading/trailing punctuation.
// "null" in any case maps to the NULL marker.
Term normalize(std::string_view value);
std::string term_text(const Term& term);  // "NULL" for the marker

struct PairPrediction {
  Term aspect;
  Term opinion;
  auto operator<=>(const PairPrediction&) const = default;
};

// sentiment == nullopt means the model produced something unparseable; such
// quads are kept and score as wrong.
struct QuadPrediction {
  Term aspect;
  Term opinion;
  std::string category;
  std::optional<Sentiment> sentiment;
  auto operator<=>(const QuadPrediction&) const = default;
};

// Single element labeled with category or sentiment (node classification output).
struct LabeledElement {
  Term element;
  std::string label;
  auto operator<=>(const LabeledElement&) const = default;
};

struct ParsedRecords {
  std::vector<std::vector<std::string>> records;  // trimmed raw values, one per field
  std::size_t malformed = 0;
};

struct DecodeOptions {
  std::string end_marker = "<|im_end|>";
  std::string empty_literal = "none";
};

// "aspect,opinion" -> {"aspect", "opinion"}. Throws ContractError on an empty,
// duplicated or unknown key.
std::vector<std::string> parse_field_spec(std::string_view spec);

// Splits model output into records of the expected keys. Never throws on content.
ParsedRecords parse_records(std::string_view text, const std::vector<std::string>& fields,
                            const DecodeOptions& options = {});

struct DecodedPairs {
  std::vector<PairPrediction> pairs;
  std::size_t malformed = 0;
};
struct DecodedQuads {
  std::vector<QuadPrediction> quads;
  std::size_t malformed = 0;
};
struct DecodedLabels {
  std::vector<LabeledElement> labels;
  std::size_t malformed = 0;
};

// opinion_first selects the "opinion: ..., aspect: ..." record layout.
DecodedPairs decode_pairs(std::string_view text, bool opinion_first, const DecodeOptions& options = {});
DecodedQuads decode_quads(std::string_view text, const DecodeOptions& options = {});
DecodedLabels decode_labels(std::string_view text, Role element, Target target,
                            const DecodeOptions& options = {});

enum class MergeStrategy { union_, intersection };
MergeStrategy parse_merge_strategy(std::string_view text);
std::string_view to_string(MergeStrategy m);

// Combines the aspect-first and opinion-first generations. Both results are
// duplicate-free and keep first-seen order.
std::vector<PairPrediction> merge_bidirectional(const std::vector<PairPrediction>& ao,
                                                const std::vector<PairPrediction>& oa,
                                                MergeStrategy strategy = MergeStrategy::union_);

template <typename T>
std::vector<T> dedup(const std::vector<T>& items) {
  std::vector<T> out;
  for (const auto& item : items)
    if (std::find(out.begin(), out.end(), item) == out.end()) out.push_back(item);
  return out;
}

// Drops predicted pairs whose explicit terms are not substrings of the
// (normalized) sentence. Off unless the pipeline asks for it.
std::vector<PairPrediction> filter_to_sentence(const std::vector<PairPrediction>& pairs,
                                               std::string_view sentence);

}  // namespace s2it
