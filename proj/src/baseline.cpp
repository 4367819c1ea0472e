#include "s2it/baseline.hpp"

#include <algorithm>
#include <cstdlib>
#include <fstream>
#include <istream>
#include <ostream>

#include "json.hpp"
#include "s2it/decode.hpp"
#include "s2it/syntax.hpp"

namespace s2it {
namespace {

// Text after "<prefix>" on the first input line that starts with it.
std::optional<std::string> input_line(std::string_view input, std::string_view prefix) {
  std::size_t start = 0;
  while (start <= input.size()) {
    auto end = input.find('\n', start);
    auto line = input.substr(start, end == std::string_view::npos ? std::string_view::npos : end - start);
    if (line.substr(0, prefix.size()) == prefix) return std::string(line.substr(prefix.size()));
    if (end == std::string_view::npos) break;
    start = end + 1;
  }
  return std::nullopt;
}

std::vector<std::string> split_bars(std::string_view text) {
  std::vector<std::string> out;
  std::size_t start = 0;
  for (;;) {
    auto pos = text.find(" | ", start);
    out.emplace_back(text.substr(start, pos == std::string_view::npos ? std::string_view::npos : pos - start));
    if (pos == std::string_view::npos) return out;
    start = pos + 3;
  }
}

std::string shell_quote(const std::string& s) {
  std::string out = "'";
  for (char c : s) out += c == '\'' ? std::string("'\\''") : std::string(1, c);
  return out + "'";
}

}  // namespace

std::vector<std::string> Predictor::predict_batch(std::span<const InstructionExample> prompts) {
  std::vector<std::string> out;
  out.reserve(prompts.size());
  for (const auto& p : prompts) out.push_back(predict(p));
  return out;
}

GraphLookup index_by_id(const std::vector<SentenceGraph>& corpus) {
  GraphLookup out;
  for (const auto& g : corpus) out.emplace(g.id(), &g);
  return out;
}

std::string gold_replay(const InstructionExample& prompt, const GraphLookup& gold, const PromptConfig& config) {
  auto it = gold.find(prompt.sentence_id);
  if (it == gold.end()) throw DataError("gold replay: unknown sentence_id '" + prompt.sentence_id + "'");
  return generate(*it->second, prompt.task, config).output;
}

std::string GoldReplayPredictor::predict(const InstructionExample& prompt) {
  return gold_replay(prompt, lookup_, config_);
}

std::string heuristic_extract(const SentenceGraph& graph, Direction direction, std::string_view empty_literal) {
  std::vector<std::size_t> order;
  for (std::size_t i = 0; i < graph.edges().size(); ++i)
    if (graph.word(i) == RelationWord::modify && graph.edges()[i].head != 0) order.push_back(i);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return graph.edges()[a].dependent < graph.edges()[b].dependent;
  });
  if (order.empty()) return std::string(empty_literal);
  std::string out;
  for (std::size_t i : order) {
    const auto& e = graph.edges()[i];
    if (!out.empty()) out += " | ";
    const auto& aspect = graph.surface(e.head);
    const auto& opinion = graph.surface(e.dependent);
    out += direction == Direction::oa ? "opinion: " + opinion + ", aspect: " + aspect
                                      : "aspect: " + aspect + ", opinion: " + opinion;
  }
  return out;
}

std::string HeuristicPredictor::predict(const InstructionExample& prompt) {
  const std::string sentiment(to_string(heuristic_.sentiment));
  switch (prompt.task) {
    case TaskKind::extract_ao:
    case TaskKind::extract_oa:
    case TaskKind::link_a2o:
    case TaskKind::link_o2a: {
      auto it = lookup_.find(prompt.sentence_id);
      if (it == lookup_.end()) throw DataError("heuristic: unknown sentence_id '" + prompt.sentence_id + "'");
      const bool oa = prompt.task == TaskKind::extract_oa || prompt.task == TaskKind::link_o2a;
      return heuristic_extract(*it->second, oa ? Direction::oa : Direction::ao, config_.empty_literal);
    }
    case TaskKind::classify_pair: {
      auto line = input_line(prompt.input, "candidate: ");
      if (!line) return config_.empty_literal;
      auto parsed = parse_records(*line, {"aspect", "opinion"}, {config_.end_marker, config_.empty_literal});
      std::string out;
      for (const auto& r : parsed.records) {
        if (!out.empty()) out += " | ";
        out += "aspect: " + r[0] + ", opinion: " + r[1] + ", category: " + heuristic_.category +
               ", sentiment: " + sentiment;
      }
      return out.empty() ? config_.empty_literal : out;
    }
    default: {
      const bool aspect = prompt.task == TaskKind::classify_a2c || prompt.task == TaskKind::classify_a2s;
      const bool category = prompt.task == TaskKind::classify_a2c || prompt.task == TaskKind::classify_o2c;
      const std::string role = aspect ? "aspect" : "opinion";
      auto line = input_line(prompt.input, "candidate " + role + ": ");
      if (!line || *line == config_.empty_literal) return config_.empty_literal;
      std::string out;
      for (const auto& element : split_bars(*line)) {
        if (!out.empty()) out += " | ";
        out += role + ": " + element + (category ? ", category: " + heuristic_.category : ", sentiment: " + sentiment);
      }
      return out;
    }
  }
}

std::string protocol_request(const InstructionExample& prompt) {
  nlohmann::ordered_json j;
  j["sentence_id"] = prompt.sentence_id;
  j["task"] = to_string(prompt.task);
  j["instruction"] = prompt.instruction;
  j["input"] = prompt.input;
  try {
    return j.dump();
  } catch (const nlohmann::json::type_error&) {
    throw DataError("prompt for " + prompt.sentence_id + " is not valid UTF-8");
  }
}

std::string protocol_response(const ProtocolResponse& response) {
  nlohmann::ordered_json j;
  j["sentence_id"] = response.sentence_id;
  j["task"] = response.task;
  if (response.error.empty())
    j["raw_output"] = response.raw_output;
  else
    j["error"] = response.error;
  return j.dump(-1, ' ', false, nlohmann::json::error_handler_t::replace);
}

ProtocolResponse parse_protocol_response(std::string_view line, std::size_t line_no) {
  try {
    auto j = nlohmann::json::parse(line);
    ProtocolResponse r;
    r.sentence_id = j.at("sentence_id").get<std::string>();
    r.task = j.value("task", "");
    if (j.contains("error")) {
      r.error = j.at("error").is_string() ? j.at("error").get<std::string>() : j.at("error").dump();
      if (r.error.empty()) r.error = "error";
    } else {
      r.raw_output = j.at("raw_output").get<std::string>();
    }
    return r;
  } catch (const nlohmann::json::exception& e) {
    throw DataError(std::string("bad predictor response: ") + e.what(), line_no);
  }
}

std::size_t serve(Predictor& predictor, std::istream& in, std::ostream& out) {
  std::size_t errors = 0;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty() || line == "\r") continue;
    ProtocolResponse r;
    try {
      auto prompt = from_jsonl(line);
      r.sentence_id = prompt.sentence_id;
      r.task = std::string(to_string(prompt.task));
      r.raw_output = predictor.predict(prompt);
    } catch (const std::exception& e) {
      // Keep whatever id the line carries so the caller can still line up.
      try {
        auto j = nlohmann::json::parse(line);
        if (j.is_object()) {
          r.sentence_id = j.value("sentence_id", "");
          r.task = j.value("task", "");
        }
      } catch (const nlohmann::json::exception&) {
      }
      r.raw_output.clear();
      r.error = e.what();
      ++errors;
    }
    out << protocol_response(r) << '\n' << std::flush;
  }
  return errors;
}

std::string ExecPredictor::predict(const InstructionExample& prompt) {
  return predict_batch(std::span<const InstructionExample>(&prompt, 1)).front();
}

std::vector<std::string> ExecPredictor::predict_batch(std::span<const InstructionExample> prompts) {
  std::filesystem::create_directories(work_dir_);
  const std::string tag = "exec_" + std::to_string(calls_++);
  const auto requests = work_dir_ / (tag + "_requests.jsonl");
  const auto responses = work_dir_ / (tag + "_responses.jsonl");
  {
    std::ofstream req(requests, std::ios::binary);
    if (!req) throw DataError("cannot write " + requests.string());
    for (const auto& p : prompts) req << protocol_request(p) << '\n';
  }
  const std::string cmd = command_ + " < " + shell_quote(requests.string()) + " > " + shell_quote(responses.string());
  if (int status = std::system(cmd.c_str()); status != 0)
    throw DataError("predictor command failed (status " + std::to_string(status) + "): " + command_);

  std::ifstream resp(responses, std::ios::binary);
  if (!resp) throw DataError("predictor produced no response file");
  std::vector<std::string> out;
  out.reserve(prompts.size());
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(resp, line)) {
    ++line_no;
    if (line.empty()) continue;
    if (out.size() == prompts.size())
      throw DataError("predictor returned more responses than the " + std::to_string(prompts.size()) + " prompts sent");
    auto r = parse_protocol_response(line, line_no);
    const auto& expect = prompts[out.size()];
    if (r.sentence_id != expect.sentence_id || (!r.task.empty() && r.task != to_string(expect.task)))
      throw DataError("predictor response " + std::to_string(out.size() + 1) + " is for '" + r.sentence_id +
                      "' but request was for '" + expect.sentence_id + "'");
    if (!r.error.empty()) ++errors_;
    out.push_back(r.error.empty() ? r.raw_output : std::string());
  }
  if (out.size() != prompts.size())
    throw DataError("predictor returned " + std::to_string(out.size()) + " responses for " +
                    std::to_string(prompts.size()) + " prompts");
  return out;
}

}  // namespace s2it
