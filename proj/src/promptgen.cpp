#include "s2it/promptgen.hpp"

#include <fstream>
#include <sstream>

#include "json.hpp"
#include "s2it/decode.hpp"

namespace s2it {

namespace {

struct TaskInfo {
  TaskKind kind;
  std::string_view name;
  int step;
};

constexpr TaskInfo kTaskInfo[] = {
    {TaskKind::extract_ao, "extract_ao", 1},     {TaskKind::extract_oa, "extract_oa", 1},
    {TaskKind::link_a2o, "link_a2o", 3},         {TaskKind::link_o2a, "link_o2a", 3},
    {TaskKind::classify_pair, "classify_pair", 2}, {TaskKind::classify_a2c, "classify_a2c", 3},
    {TaskKind::classify_a2s, "classify_a2s", 3}, {TaskKind::classify_o2c, "classify_o2c", 3},
    {TaskKind::classify_o2s, "classify_o2s", 3},
};

const TaskInfo& info(TaskKind t) {
  for (const auto& i : kTaskInfo)
    if (i.kind == t) return i;
  throw ContractError("unknown task kind");
}

constexpr std::string_view kSubgraphNodeInstruction =
    "Given a sentence, related dependency relations (will be presented in the form of subgraph) and known ";

// Lines of a prompt input, in layout order.
enum class Section { sentence, dependency, subgraph, candidates_keyed, candidate_pairs, candidate_compact };

std::vector<Section> layout(TaskKind t) {
  using S = Section;
  switch (t) {
    case TaskKind::extract_ao:
    case TaskKind::extract_oa: return {S::sentence, S::dependency};
    case TaskKind::link_a2o:
    case TaskKind::link_o2a: return {S::sentence, S::dependency, S::candidates_keyed};
    case TaskKind::classify_pair: return {S::sentence, S::subgraph, S::candidate_pairs};
    // The aspect-to-sentiment layout carries both candidate lines.
    case TaskKind::classify_a2s: return {S::sentence, S::subgraph, S::candidate_compact, S::candidates_keyed};
    case TaskKind::classify_a2c:
    case TaskKind::classify_o2c:
    case TaskKind::classify_o2s: return {S::sentence, S::subgraph, S::candidate_compact};
  }
  return {};
}

std::string join(const std::vector<std::string>& parts, std::string_view sep, std::string_view empty) {
  if (parts.empty()) return std::string(empty);
  std::string out;
  for (std::size_t i = 0; i < parts.size(); ++i) {
    if (i) out += sep;
    out += parts[i];
  }
  return out;
}

std::string pair_record(const ElementPair& p, bool opinion_first) {
  return opinion_first ? "opinion: " + p.opinion.surface + ", aspect: " + p.aspect.surface
                       : "aspect: " + p.aspect.surface + ", opinion: " + p.opinion.surface;
}

std::string subgraph_block(const SentenceGraph& graph, Role role, const ElementRef& e, const PromptConfig& config) {
  if (!e.span && !e.implicit()) return serialize_unanchored(role, e.surface, config.style);
  return serialize_subgraph(graph, role, e.span, config.hops, config.style);
}

// Everything a layout may need; unused fields stay empty.
struct InputParts {
  std::vector<std::string> subgraph_blocks;
  std::vector<std::string> keyed_candidates;    // "aspect: service"
  std::vector<std::string> pair_candidates;     // "aspect: service, opinion: ok"
  std::vector<std::string> compact_candidates;  // "service"
  Role compact_role = Role::aspect;
};

std::string render_input(const SentenceGraph& graph, TaskKind task, const InputParts& parts,
                         const PromptConfig& config) {
  const std::string& none = config.empty_literal;
  std::vector<std::string> lines;
  for (Section s : layout(task)) {
    switch (s) {
      case Section::sentence: lines.push_back("sentence: " + graph.sentence().text()); break;
      case Section::dependency:
        if (config.style != SyntaxStyle::none)
          lines.push_back("dependency relation: " + serialize_global(graph, config.style));
        break;
      case Section::subgraph:
        if (config.style != SyntaxStyle::none) lines.push_back("subgraph: " + join(parts.subgraph_blocks, " | ", none));
        break;
      case Section::candidates_keyed: lines.push_back("candidates: " + join(parts.keyed_candidates, " | ", none)); break;
      case Section::candidate_pairs: lines.push_back("candidate: " + join(parts.pair_candidates, " | ", none)); break;
      case Section::candidate_compact:
        lines.push_back("candidate " + std::string(to_string(parts.compact_role)) + ": " +
                        join(parts.compact_candidates, " | ", none));
        break;
    }
  }
  return join(lines, "\n", "");
}

InstructionExample make(const SentenceGraph& graph, TaskKind task, const PromptConfig& config) {
  InstructionExample ex;
  ex.task = task;
  ex.instruction = config.templates.instruction(task);
  ex.sentence_id = graph.id();
  return ex;
}

void check_ref(const SentenceGraph& graph, const ElementRef& e) {
  if (e.span && (e.span->begin < 1 || e.span->end < e.span->begin || e.span->end > static_cast<int>(graph.size())))
    throw DataError("pair element '" + e.surface + "' references tokens outside sentence " + graph.id());
}

}  // namespace

std::string_view to_string(TaskKind t) { return info(t).name; }

TaskKind parse_task_kind(std::string_view text) {
  for (const auto& i : kTaskInfo)
    if (i.name == text) return i.kind;
  throw ContractError("unknown task '" + std::string(text) + "'");
}

int task_step(TaskKind t) { return info(t).step; }

Direction parse_direction(std::string_view text) {
  if (text == "ao") return Direction::ao;
  if (text == "oa") return Direction::oa;
  if (text == "both") return Direction::both;
  throw ContractError("unknown direction '" + std::string(text) + "' (expected ao|oa|both)");
}

std::vector<TaskKind> select_tasks(std::string_view selector, Direction direction) {
  std::vector<TaskKind> picked;
  if (selector == "all") {
    picked.assign(kAllTasks.begin(), kAllTasks.end());
  } else if (selector == "step1" || selector == "step2" || selector == "aux") {
    const int step = selector == "step1" ? 1 : selector == "step2" ? 2 : 3;
    for (auto t : kAllTasks)
      if (task_step(t) == step) picked.push_back(t);
  } else {
    picked.push_back(parse_task_kind(selector));
  }
  if (direction == Direction::both) return picked;
  std::vector<TaskKind> out;
  for (auto t : picked) {
    const bool ao_only = t == TaskKind::extract_ao || t == TaskKind::link_a2o || t == TaskKind::classify_a2c ||
                         t == TaskKind::classify_a2s;
    const bool oa_only = t == TaskKind::extract_oa || t == TaskKind::link_o2a || t == TaskKind::classify_o2c ||
                         t == TaskKind::classify_o2s;
    if ((ao_only && direction == Direction::oa) || (oa_only && direction == Direction::ao)) continue;
    out.push_back(t);
  }
  return out;
}

Templates::Templates() {
  instructions_[TaskKind::extract_ao] =
      "Given a sentence and related dependency relations, extract aspect and opinion (both implicit and explicit) "
      "from the sentence and return pair(aspect, opinion). Pay attention to the one or multi hop dependency "
      "relationships between aspect and opinion.";
  instructions_[TaskKind::extract_oa] =
      "Given a sentence and related dependency relations, extract opinion and aspect (both implicit and explicit) "
      "from the sentence and return pair(opinion, aspect). Pay attention to the one or multi hop dependency "
      "relationships between aspect and opinion.";
  instructions_[TaskKind::link_a2o] =
      "Given a sentence, related dependency relations and known aspects, determine the opinion (both implicit and "
      "explicit) related to the each aspect from dependency relation and return the pair(aspect, opinion).";
  instructions_[TaskKind::link_o2a] =
      "Given a sentence, related dependency relations and known opinions, determine the aspect (both implicit and "
      "explicit) related to the each opinion from dependency relation and return the pair(opinion, aspect).";
  instructions_[TaskKind::classify_pair] =
      "Given a sentence, related dependency relations (will be presented in the form of subgraph) and (aspect, "
      "opinion) candidates, determine the category of the aspect and the sentiment (positive, neutral, negative) of "
      "the opinion and return the quadruple(aspect, opinion, category, sentiment).";
  const std::string node(kSubgraphNodeInstruction);
  instructions_[TaskKind::classify_a2c] =
      node + "aspects (both implicit and explicit) , determine the category related to the each aspects from "
             "dependency relation and return pair (aspect, category).";
  instructions_[TaskKind::classify_a2s] =
      node + "aspects (both implicit and explicit) , determine the sentiment related to the each aspects from "
             "dependency relation and return pair (aspect, sentiment).";
  instructions_[TaskKind::classify_o2c] =
      node + "opinions (both implicit and explicit) , determine the category related to the each opinions from "
             "dependency relation and return pair (opinion, category).";
  // Canonical text for opinion-to-sentiment is printed identical to opinion-to-category.
  instructions_[TaskKind::classify_o2s] = instructions_[TaskKind::classify_o2c];
}

Templates Templates::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open templates " + path.string());
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw DataError(path.string() + ": " + e.what());
  }
  if (!doc.is_object()) throw DataError(path.string() + ": expected an object of task -> instruction");
  Templates t;
  for (const auto& [name, text] : doc.items()) {
    TaskKind kind;
    try {
      kind = parse_task_kind(name);
    } catch (const ContractError& e) {
      throw DataError(path.string() + ": " + e.what());
    }
    if (!text.is_string()) throw DataError(path.string() + ": instruction for '" + name + "' is not a string");
    t.set(kind, text.get<std::string>());
  }
  return t;
}

ElementRef element_ref(const SentenceGraph& graph, const ElementSpan& span) {
  return {graph.sentence().span_text(span), span};
}

std::vector<ElementPair> gold_pairs(const SentenceGraph& graph) {
  std::vector<ElementPair> out;
  for (const auto& q : graph.quads()) out.push_back({element_ref(graph, q.aspect), element_ref(graph, q.opinion)});
  return out;
}

ElementRef anchor(const SentenceGraph& graph, std::string_view term) {
  const Term target = normalize(term);
  if (!target) return {std::string(kNullTerm), std::nullopt};
  const int n = static_cast<int>(graph.size());
  // a span may not start or end on a token that normalizes away (punctuation)
  auto solid = [&](int i) {
    const Term t = normalize(graph.surface(i));
    return !t || !t->empty();
  };
  for (int b = 1; b <= n; ++b) {
    if (!solid(b)) continue;
    std::string acc;
    for (int e = b; e <= n; ++e) {
      if (e > b) acc += ' ';
      acc += graph.surface(e);
      const Term here = normalize(acc);
      if (here && *here == *target && solid(e)) return element_ref(graph, Span{b, e});
      if (here && here->size() > target->size() + 1) break;
    }
  }
  return {std::string(term), std::nullopt};
}

InstructionExample gen_extraction(const SentenceGraph& graph, Direction direction, const PromptConfig& config,
                                  Mode mode) {
  if (direction == Direction::both) throw ContractError("gen_extraction needs a single direction");
  const bool oa = direction == Direction::oa;
  auto ex = make(graph, oa ? TaskKind::extract_oa : TaskKind::extract_ao, config);
  ex.input = render_input(graph, ex.task, {}, config);
  if (mode == Mode::training) {
    std::vector<std::string> records;
    for (const auto& p : gold_pairs(graph)) records.push_back(pair_record(p, oa));
    ex.output = join(records, " | ", config.empty_literal);
  }
  return ex;
}

InstructionExample gen_link(const SentenceGraph& graph, Direction direction, const PromptConfig& config) {
  if (direction == Direction::both) throw ContractError("gen_link needs a single direction");
  const bool oa = direction == Direction::oa;
  auto ex = make(graph, oa ? TaskKind::link_o2a : TaskKind::link_a2o, config);
  InputParts parts;
  std::vector<std::string> records;
  for (const auto& p : gold_pairs(graph)) {
    parts.keyed_candidates.push_back(oa ? "opinion: " + p.opinion.surface : "aspect: " + p.aspect.surface);
    records.push_back(pair_record(p, oa));
  }
  ex.input = render_input(graph, ex.task, parts, config);
  ex.output = join(records, " | ", config.empty_literal);
  return ex;
}

InstructionExample gen_classification(const SentenceGraph& graph, std::span<const ElementPair> pairs,
                                      const PromptConfig& config, Mode mode) {
  auto ex = make(graph, TaskKind::classify_pair, config);
  InputParts parts;
  for (const auto& p : pairs) {
    check_ref(graph, p.aspect);
    check_ref(graph, p.opinion);
    parts.subgraph_blocks.push_back(subgraph_block(graph, Role::aspect, p.aspect, config) + " " +
                                    subgraph_block(graph, Role::opinion, p.opinion, config));
    parts.pair_candidates.push_back(pair_record(p, false));
  }
  ex.input = render_input(graph, ex.task, parts, config);
  if (mode == Mode::training) {
    if (pairs.size() != graph.quads().size())
      throw ContractError("training classification needs the gold pairs of " + graph.id());
    std::vector<std::string> records;
    for (std::size_t j = 0; j < pairs.size(); ++j) {
      const auto& q = graph.quads()[j];
      records.push_back(pair_record(pairs[j], false) + ", category: " + q.category +
                        ", sentiment: " + std::string(to_string(q.sentiment)));
    }
    ex.output = join(records, " | ", config.empty_literal);
  }
  return ex;
}

InstructionExample gen_node_classification(const SentenceGraph& graph, Role element, Target target,
                                           const PromptConfig& config) {
  const bool aspect = element == Role::aspect;
  const bool category = target == Target::category;
  const TaskKind task = aspect ? (category ? TaskKind::classify_a2c : TaskKind::classify_a2s)
                               : (category ? TaskKind::classify_o2c : TaskKind::classify_o2s);
  auto ex = make(graph, task, config);
  InputParts parts;
  parts.compact_role = element;
  const std::string role(to_string(element));
  std::vector<std::string> records;
  for (const auto& q : graph.quads()) {
    const auto ref = element_ref(graph, aspect ? q.aspect : q.opinion);
    parts.subgraph_blocks.push_back(subgraph_block(graph, element, ref, config));
    parts.compact_candidates.push_back(ref.surface);
    parts.keyed_candidates.push_back(role + ": " + ref.surface);
    records.push_back(role + ": " + ref.surface + ", " + std::string(to_string(target)) + ": " +
                      (category ? q.category : std::string(to_string(q.sentiment))));
  }
  ex.input = render_input(graph, ex.task, parts, config);
  ex.output = join(records, " | ", config.empty_literal);
  return ex;
}

InstructionExample generate(const SentenceGraph& graph, TaskKind task, const PromptConfig& config) {
  switch (task) {
    case TaskKind::extract_ao: return gen_extraction(graph, Direction::ao, config);
    case TaskKind::extract_oa: return gen_extraction(graph, Direction::oa, config);
    case TaskKind::link_a2o: return gen_link(graph, Direction::ao, config);
    case TaskKind::link_o2a: return gen_link(graph, Direction::oa, config);
    case TaskKind::classify_pair: {
      const auto pairs = gold_pairs(graph);
      return gen_classification(graph, pairs, config);
    }
    case TaskKind::classify_a2c: return gen_node_classification(graph, Role::aspect, Target::category, config);
    case TaskKind::classify_a2s: return gen_node_classification(graph, Role::aspect, Target::sentiment, config);
    case TaskKind::classify_o2c: return gen_node_classification(graph, Role::opinion, Target::category, config);
    case TaskKind::classify_o2s: return gen_node_classification(graph, Role::opinion, Target::sentiment, config);
  }
  throw ContractError("unknown task kind");
}

std::string to_jsonl(const InstructionExample& example, std::string_view output_suffix) {
  nlohmann::ordered_json j;
  j["task"] = to_string(example.task);
  j["instruction"] = example.instruction;
  j["input"] = example.input;
  j["output"] = example.output + std::string(output_suffix);
  j["sentence_id"] = example.sentence_id;
  try {
    return j.dump();
  } catch (const nlohmann::json::type_error&) {
    throw DataError("example for " + example.sentence_id + " contains text that is not valid UTF-8");
  }
}

InstructionExample from_jsonl(std::string_view line) {
  try {
    auto j = nlohmann::json::parse(line);
    InstructionExample ex;
    ex.task = parse_task_kind(j.at("task").get<std::string>());
    ex.instruction = j.value("instruction", "");
    ex.input = j.value("input", "");
    ex.output = j.value("output", "");
    ex.sentence_id = j.value("sentence_id", "");
    return ex;
  } catch (const nlohmann::json::exception& e) {
    throw DataError(std::string("bad example record: ") + e.what());
  } catch (const ContractError& e) {
    throw DataError(std::string("bad example record: ") + e.what());
  }
}

std::size_t emit_jsonl(std::span<const InstructionExample> examples, const std::filesystem::path& path,
                       bool training_mode, std::string_view end_marker) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write " + path.string());
  for (const auto& ex : examples) out << to_jsonl(ex, training_mode ? end_marker : std::string_view{}) << '\n';
  out.flush();
  if (!out) throw DataError("write failed: " + path.string());
  return examples.size();
}

std::vector<InstructionExample> read_jsonl(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open " + path.string());
  std::vector<InstructionExample> out;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    try {
      out.push_back(from_jsonl(line));
    } catch (const DataError& e) {
      throw DataError(path.string() + ": " + e.what(), line_no);
    }
  }
  return out;
}

}  // namespace s2it
