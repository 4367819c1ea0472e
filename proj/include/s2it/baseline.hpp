#pragma once

#include <filesystem>
#include <iosfwd>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "s2it/graph.hpp"
#include "s2it/promptgen.hpp"

namespace s2it {

// Anything that turns a prompt (output field empty) into raw model text.
// Implementations must be deterministic.
class Predictor {
 public:
  virtual ~Predictor() = default;
  virtual std::string predict(const InstructionExample& prompt) = 0;
  // Outputs line up with prompts. The default calls predict() in order.
  virtual std::vector<std::string> predict_batch(std::span<const InstructionExample> prompts);
};

using GraphLookup = std::unordered_map<std::string, const SentenceGraph*>;
GraphLookup index_by_id(const std::vector<SentenceGraph>& corpus);

// The training target promptgen would have produced for this prompt's task.
std::string gold_replay(const InstructionExample& prompt, const GraphLookup& gold, const PromptConfig& config);

class GoldReplayPredictor : public Predictor {
 public:
  GoldReplayPredictor(const std::vector<SentenceGraph>& corpus, PromptConfig config)
      : lookup_(index_by_id(corpus)), config_(std::move(config)) {}
  std::string predict(const InstructionExample& prompt) override;

 private:
  GraphLookup lookup_;
  PromptConfig config_;
};

// One pair per `modify` edge: head as aspect, dependent as opinion, in clause order.
std::string heuristic_extract(const SentenceGraph& graph, Direction direction = Direction::ao,
                              std::string_view empty_literal = "none");

struct HeuristicConfig {
  std::string category;  // label assigned by classification prompts
  Sentiment sentiment = Sentiment::positive;
};

// Extraction and linking prompts use heuristic_extract; classification prompts
// echo their candidates with the fixed labels of HeuristicConfig.
class HeuristicPredictor : public Predictor {
 public:
  HeuristicPredictor(const std::vector<SentenceGraph>& corpus, HeuristicConfig heuristic, PromptConfig config)
      : lookup_(index_by_id(corpus)), heuristic_(std::move(heuristic)), config_(std::move(config)) {}
  std::string predict(const InstructionExample& prompt) override;

 private:
  GraphLookup lookup_;
  HeuristicConfig heuristic_;
  PromptConfig config_;
};

// --- subprocess protocol -------------------------------------------------
// Request:  {"sentence_id", "task", "instruction", "input"} per line on stdin.
// Response: {"sentence_id", "task", "raw_output"} per line on stdout, in
//           request order; {"sentence_id", "task", "error"} for a failed line.

struct ProtocolResponse {
  std::string sentence_id;
  std::string task;
  std::string raw_output;
  std::string error;  // empty on success
};

std::string protocol_request(const InstructionExample& prompt);
std::string protocol_response(const ProtocolResponse& response);
ProtocolResponse parse_protocol_response(std::string_view line, std::size_t line_no = 0);

// Predictor side: answers every request line of `in` on `out`. A line that
// cannot be read as a prompt yields an error record and processing continues.
// Returns the number of error records written.
std::size_t serve(Predictor& predictor, std::istream& in, std::ostream& out);

// Runs `command` through the shell with the request file on stdin and the
// response file on stdout. Responses are checked for count and id order.
class ExecPredictor : public Predictor {
 public:
  ExecPredictor(std::string command, std::filesystem::path work_dir)
      : command_(std::move(command)), work_dir_(std::move(work_dir)) {}

  std::string predict(const InstructionExample& prompt) override;
  std::vector<std::string> predict_batch(std::span<const InstructionExample> prompts) override;
  std::size_t error_records() const { return errors_; }

 private:
  std::string command_;
  std::filesystem::path work_dir_;
  std::size_t calls_ = 0;
  std::size_t errors_ = 0;
};

}  // namespace s2it
