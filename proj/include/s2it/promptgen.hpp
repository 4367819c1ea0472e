#pragma once

#include <array>
#include <filesystem>
#include <map>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "s2it/graph.hpp"
#include "s2it/syntax.hpp"

namespace s2it {

enum class TaskKind {
  extract_ao,
  extract_oa,
  link_a2o,
  link_o2a,
  classify_pair,
  classify_a2c,
  classify_a2s,
  classify_o2c,
  classify_o2s,
};

inline constexpr std::array<TaskKind, 9> kAllTasks{
    TaskKind::extract_ao,   TaskKind::extract_oa,   TaskKind::link_a2o,
    TaskKind::link_o2a,     TaskKind::classify_pair, TaskKind::classify_a2c,
    TaskKind::classify_a2s, TaskKind::classify_o2c, TaskKind::classify_o2s,
};

std::string_view to_string(TaskKind t);
TaskKind parse_task_kind(std::string_view text);

enum class Direction { ao, oa, both };
Direction parse_direction(std::string_view text);

// Resolves a --task selector (a task name, "step1", "step2", "aux" or "all")
// and keeps only the directions asked for: ao keeps the aspect-first and
// aspect-centred tasks, oa the opinion ones. classify_pair is kept by both.
std::vector<TaskKind> select_tasks(std::string_view selector, Direction direction = Direction::both);

// Which training step a task belongs to: 1 (extraction), 2 (classification), 3 (aux).
int task_step(TaskKind t);

// Instruction text per task. The defaults are the canonical templates; a JSON
// object {"<task name>": "<instruction>"} overrides individual entries.
class Templates {
 public:
  Templates();
  static Templates load(const std::filesystem::path& path);
  const std::string& instruction(TaskKind t) const { return instructions_.at(t); }
  void set(TaskKind t, std::string text) { instructions_[t] = std::move(text); }

 private:
  std::map<TaskKind, std::string> instructions_;
};

struct PromptConfig {
  SyntaxStyle style = SyntaxStyle::natural_language;
  int hops = 1;
  std::string empty_literal = "none";
  std::string end_marker = "<|im_end|>";
  Templates templates;
};

// One sentiment element as it appears in a prompt. An implicit element has
// surface "NULL" and no span; an element predicted by a model that could not
// be located in the sentence keeps its surface and has no span.
struct ElementRef {
  std::string surface;
  ElementSpan span;

  bool implicit() const { return !span && surface == kNullTerm; }
  bool operator==(const ElementRef&) const = default;
};

struct ElementPair {
  ElementRef aspect;
  ElementRef opinion;
  bool operator==(const ElementPair&) const = default;
};

struct InstructionExample {
  TaskKind task = TaskKind::extract_ao;
  std::string instruction;
  std::string input;
  std::string output;
  std::string sentence_id;

  bool operator==(const InstructionExample&) const = default;
};

enum class Mode { training, inference };

ElementRef element_ref(const SentenceGraph& graph, const ElementSpan& span);
std::vector<ElementPair> gold_pairs(const SentenceGraph& graph);

// Locates a (normalized) predicted term in the sentence; "NULL" becomes an
// implicit element and a term not found stays unanchored.
ElementRef anchor(const SentenceGraph& graph, std::string_view term);

InstructionExample gen_extraction(const SentenceGraph& graph, Direction direction,
                                  const PromptConfig& config, Mode mode = Mode::training);
InstructionExample gen_link(const SentenceGraph& graph, Direction direction, const PromptConfig& config);
// Training mode pairs must be the gold pairs in quad order; inference mode
// leaves the output empty.
InstructionExample gen_classification(const SentenceGraph& graph, std::span<const ElementPair> pairs,
                                      const PromptConfig& config, Mode mode = Mode::training);
InstructionExample gen_node_classification(const SentenceGraph& graph, Role element, Target target,
                                           const PromptConfig& config);

// Training example for any task from the graph's gold quads.
InstructionExample generate(const SentenceGraph& graph, TaskKind task, const PromptConfig& config);

// Canonical JSONL record with keys task, instruction, input, output, sentence_id.
std::string to_jsonl(const InstructionExample& example, std::string_view output_suffix = {});
InstructionExample from_jsonl(std::string_view line);

// Writes one record per line; with training_mode the end marker is appended to
// every output. Returns the number of records written.
std::size_t emit_jsonl(std::span<const InstructionExample> examples, const std::filesystem::path& path,
                       bool training_mode, std::string_view end_marker = "<|im_end|>");

std::vector<InstructionExample> read_jsonl(const std::filesystem::path& path);

}  // namespace s2it
