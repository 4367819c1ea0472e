#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "s2it/baseline.hpp"
#include "s2it/decode.hpp"
#include "s2it/eval.hpp"
#include "s2it/promptgen.hpp"

namespace s2it {

struct PipelineConfig {
  PromptConfig prompt;
  MergeStrategy merge = MergeStrategy::union_;
  bool filter_to_sentence = false;
  unsigned jobs = 0;  // 0 = hardware concurrency
  std::filesystem::path run_dir;

  DecodeOptions decode_options() const { return {prompt.end_marker, prompt.empty_literal}; }
};

// Machine-readable snapshot of a pipeline config (written to the run dir).
std::string config_json(const PipelineConfig& config);

struct PipelineReport {
  EvalReport quad;
  EvalReport pair;  // merged stage-1 pairs vs gold pairs
  std::size_t stage1_malformed = 0;
  std::size_t stage2_malformed = 0;
  std::size_t stage2_prompts = 0;
};

// Stage 1: extract_ao + extract_oa prompts, decode, merge. Stage 2:
// classify_pair prompts over the merged pairs, decode, score against gold.
// Every intermediate file lands under config.run_dir:
//   config.json
//   stage1/{prompts,raw,decoded}_extract_{ao,oa}.jsonl, stage1/merged_pairs.jsonl
//   stage2/{prompts,raw,decoded}_classify_pair.jsonl
//   report.json, report.txt
PipelineReport run_two_stage(const std::vector<SentenceGraph>& corpus, Predictor& predictor,
                             const PipelineConfig& config);

struct Stage2Report {
  double category_accuracy = 1.0;
  double sentiment_accuracy = 1.0;
  EvalReport quad;
};

// Stage 2 alone, prompted with gold pairs. Artifacts go to run_dir/stage2_gold/.
Stage2Report run_stage2_isolated(const std::vector<SentenceGraph>& corpus, Predictor& predictor,
                                 const PipelineConfig& config);

std::string pipeline_report_json(const PipelineReport& report);

// --- decoded prediction files ----------------------------------------------
// Input line:  {"sentence_id", "task", "raw_output"}
// Output line: {"sentence_id", "task", "raw_output", "predictions": [{key: value|null}], "malformed_count"}
// Values are normalized; null is the NULL marker; an unrecognized sentiment is
// kept as "UNPARSEABLE".

struct DecodedRecord {
  std::string sentence_id;
  std::string task;
  std::string raw_output;
  std::vector<std::vector<std::pair<std::string, Term>>> predictions;
  std::size_t malformed = 0;
};

// Record keys a task's output carries, in output order.
std::vector<std::string> task_fields(TaskKind task);

DecodedRecord decode_raw(std::string sentence_id, std::string task, std::string raw,
                         const std::vector<std::string>& fields, const DecodeOptions& options);
std::string decoded_to_json(const DecodedRecord& record);
DecodedRecord decoded_from_json(std::string_view line, std::size_t line_no = 0);

std::vector<PairPrediction> to_pairs(const DecodedRecord& record);
std::vector<QuadPrediction> to_quads(const DecodedRecord& record);
std::string stage2_report_json(const Stage2Report& report);

}  // namespace s2it
