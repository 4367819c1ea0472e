#include "s2it/pipeline.hpp"

#include <fstream>

#include "json.hpp"
#include "s2it/parallel.hpp"

namespace s2it {
namespace {

namespace fs = std::filesystem;
using ojson = nlohmann::ordered_json;

constexpr std::string_view kUnparseable = "UNPARSEABLE";

void write_lines(const fs::path& path, const std::vector<std::string>& lines) {
  fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write " + path.string());
  for (const auto& l : lines) out << l << '\n';
  if (!out) throw DataError("write failed: " + path.string());
}

void write_text(const fs::path& path, const std::string& text) {
  fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write " + path.string());
  out << text;
}

std::string raw_line(const InstructionExample& prompt, const std::string& raw) {
  return protocol_response({prompt.sentence_id, std::string(to_string(prompt.task)), raw, {}});
}

const Term* field(const std::vector<std::pair<std::string, Term>>& rec, std::string_view key) {
  for (const auto& [k, v] : rec)
    if (k == key) return &v;
  return nullptr;
}

// Runs one task's prompts through the predictor and writes prompts/raw/decoded files.
std::vector<DecodedRecord> run_task(std::span<const InstructionExample> prompts, TaskKind task, Predictor& predictor,
                                    const PipelineConfig& config, const fs::path& dir) {
  const std::string name(to_string(task));
  emit_jsonl(prompts, dir / ("prompts_" + name + ".jsonl"), false);
  const auto raw = predictor.predict_batch(prompts);
  if (raw.size() != prompts.size())
    throw DataError("predictor returned " + std::to_string(raw.size()) + " outputs for " +
                    std::to_string(prompts.size()) + " prompts");
  std::vector<std::string> raw_lines;
  for (std::size_t i = 0; i < prompts.size(); ++i) raw_lines.push_back(raw_line(prompts[i], raw[i]));
  write_lines(dir / ("raw_" + name + ".jsonl"), raw_lines);

  const auto fields = task_fields(task);
  const auto options = config.decode_options();
  auto decoded = parallel_map<DecodedRecord>(prompts.size(), config.jobs, [&](std::size_t i) {
    return decode_raw(prompts[i].sentence_id, name, raw[i], fields, options);
  });
  std::vector<std::string> lines;
  for (const auto& d : decoded) lines.push_back(decoded_to_json(d));
  write_lines(dir / ("decoded_" + name + ".jsonl"), lines);
  return decoded;
}

ojson term_json(const Term& t) { return t ? ojson(*t) : ojson(nullptr); }

}  // namespace

std::vector<std::string> task_fields(TaskKind task) {
  switch (task) {
    case TaskKind::extract_ao:
    case TaskKind::link_a2o: return {"aspect", "opinion"};
    case TaskKind::extract_oa:
    case TaskKind::link_o2a: return {"opinion", "aspect"};
    case TaskKind::classify_pair: return {"aspect", "opinion", "category", "sentiment"};
    case TaskKind::classify_a2c: return {"aspect", "category"};
    case TaskKind::classify_a2s: return {"aspect", "sentiment"};
    case TaskKind::classify_o2c: return {"opinion", "category"};
    case TaskKind::classify_o2s: return {"opinion", "sentiment"};
  }
  return {};
}

DecodedRecord decode_raw(std::string sentence_id, std::string task, std::string raw,
                         const std::vector<std::string>& fields, const DecodeOptions& options) {
  DecodedRecord out{std::move(sentence_id), std::move(task), std::move(raw), {}, 0};
  auto parsed = parse_records(out.raw_output, fields, options);
  out.malformed = parsed.malformed;
  for (const auto& values : parsed.records) {
    std::vector<std::pair<std::string, Term>> rec;
    bool all_empty = true;
    for (std::size_t k = 0; k < fields.size(); ++k) {
      Term v = normalize(values[k]);
      if (fields[k] == "sentiment" && (!v || !parse_sentiment(*v))) v = std::string(kUnparseable);
      if (fields[k] == "category" && !v) v = "null";
      all_empty = all_empty && v && v->empty();
      rec.emplace_back(fields[k], std::move(v));
    }
    if (all_empty) {
      ++out.malformed;
      continue;
    }
    out.predictions.push_back(std::move(rec));
  }
  return out;
}

std::string decoded_to_json(const DecodedRecord& record) {
  ojson j;
  j["sentence_id"] = record.sentence_id;
  j["task"] = record.task;
  j["raw_output"] = record.raw_output;
  auto& preds = j["predictions"] = ojson::array();
  for (const auto& rec : record.predictions) {
    ojson p = ojson::object();
    for (const auto& [k, v] : rec) p[k] = term_json(v);
    preds.push_back(std::move(p));
  }
  j["malformed_count"] = record.malformed;
  return j.dump(-1, ' ', false, nlohmann::json::error_handler_t::replace);
}

DecodedRecord decoded_from_json(std::string_view line, std::size_t line_no) {
  try {
    auto j = ojson::parse(line);
    DecodedRecord r;
    r.sentence_id = j.at("sentence_id").get<std::string>();
    r.task = j.value("task", "");
    r.raw_output = j.value("raw_output", "");
    r.malformed = j.value("malformed_count", std::size_t{0});
    for (const auto& p : j.at("predictions")) {
      std::vector<std::pair<std::string, Term>> rec;
      for (const auto& [k, v] : p.items())
        rec.emplace_back(k, v.is_null() ? Term{} : Term{v.get<std::string>()});
      r.predictions.push_back(std::move(rec));
    }
    return r;
  } catch (const nlohmann::json::exception& e) {
    throw DataError(std::string("bad decoded record: ") + e.what(), line_no);
  }
}

std::vector<PairPrediction> to_pairs(const DecodedRecord& record) {
  std::vector<PairPrediction> out;
  for (const auto& rec : record.predictions) {
    const Term* a = field(rec, "aspect");
    const Term* o = field(rec, "opinion");
    if (a && o) out.push_back({*a, *o});
  }
  return out;
}

std::vector<QuadPrediction> to_quads(const DecodedRecord& record) {
  std::vector<QuadPrediction> out;
  for (const auto& rec : record.predictions) {
    const Term* a = field(rec, "aspect");
    const Term* o = field(rec, "opinion");
    const Term* c = field(rec, "category");
    const Term* s = field(rec, "sentiment");
    if (!(a && o && c && s)) continue;
    out.push_back({*a, *o, term_text(*c), *s ? parse_sentiment(**s) : std::nullopt});
  }
  return out;
}

std::string config_json(const PipelineConfig& config) {
  ojson j;
  j["style"] = to_string(config.prompt.style);
  j["hops"] = config.prompt.hops;
  j["merge"] = to_string(config.merge);
  j["filter_to_sentence"] = config.filter_to_sentence;
  j["empty_literal"] = config.prompt.empty_literal;
  j["end_marker"] = config.prompt.end_marker;
  auto& tmpl = j["instructions"] = ojson::object();
  for (auto t : kAllTasks) tmpl[std::string(to_string(t))] = config.prompt.templates.instruction(t);
  return j.dump(2) + "\n";
}

PipelineReport run_two_stage(const std::vector<SentenceGraph>& corpus, Predictor& predictor,
                             const PipelineConfig& config) {
  if (config.run_dir.empty()) throw ContractError("run_two_stage needs a run directory");
  const fs::path stage1 = config.run_dir / "stage1", stage2 = config.run_dir / "stage2";
  fs::create_directories(stage1);
  fs::create_directories(stage2);
  write_text(config.run_dir / "config.json", config_json(config));

  PipelineReport report;
  const std::size_t n = corpus.size();

  std::vector<std::vector<DecodedRecord>> by_direction;
  for (Direction d : {Direction::ao, Direction::oa}) {
    auto prompts = parallel_map<InstructionExample>(
        n, config.jobs, [&](std::size_t i) { return gen_extraction(corpus[i], d, config.prompt, Mode::inference); });
    by_direction.push_back(
        run_task(prompts, d == Direction::ao ? TaskKind::extract_ao : TaskKind::extract_oa, predictor, config, stage1));
    for (const auto& r : by_direction.back()) report.stage1_malformed += r.malformed;
  }

  std::vector<std::vector<PairPrediction>> merged(n);
  std::vector<std::string> merged_lines;
  std::vector<SentenceScore> pair_rows;
  for (std::size_t i = 0; i < n; ++i) {
    merged[i] = merge_bidirectional(to_pairs(by_direction[0][i]), to_pairs(by_direction[1][i]), config.merge);
    if (config.filter_to_sentence) merged[i] = filter_to_sentence(merged[i], corpus[i].sentence().text());
    pair_rows.push_back({corpus[i].id(), score_pairs(gold_pair_predictions(corpus[i]), merged[i])});
    ojson j;
    j["sentence_id"] = corpus[i].id();
    auto& arr = j["pairs"] = ojson::array();
    for (const auto& p : merged[i]) arr.push_back({{"aspect", term_json(p.aspect)}, {"opinion", term_json(p.opinion)}});
    merged_lines.push_back(j.dump(-1, ' ', false, nlohmann::json::error_handler_t::replace));
  }
  write_lines(stage1 / "merged_pairs.jsonl", merged_lines);
  report.pair = micro_scores(pair_rows, report.stage1_malformed);

  // Sentences without any merged pair skip stage 2 and predict nothing.
  std::vector<std::size_t> active;
  for (std::size_t i = 0; i < n; ++i)
    if (!merged[i].empty()) active.push_back(i);
  auto prompts = parallel_map<InstructionExample>(active.size(), config.jobs, [&](std::size_t k) {
    const auto& g = corpus[active[k]];
    std::vector<ElementPair> pairs;
    for (const auto& p : merged[active[k]]) pairs.push_back({anchor(g, term_text(p.aspect)), anchor(g, term_text(p.opinion))});
    return gen_classification(g, pairs, config.prompt, Mode::inference);
  });
  report.stage2_prompts = prompts.size();
  const auto decoded = run_task(prompts, TaskKind::classify_pair, predictor, config, stage2);

  std::vector<std::vector<QuadPrediction>> predicted(n);
  for (std::size_t k = 0; k < active.size(); ++k) {
    predicted[active[k]] = to_quads(decoded[k]);
    report.stage2_malformed += decoded[k].malformed;
  }
  std::vector<SentenceScore> quad_rows;
  for (std::size_t i = 0; i < n; ++i) quad_rows.push_back({corpus[i].id(), score_quads(gold_quads(corpus[i]), predicted[i])});
  report.quad = micro_scores(quad_rows, report.stage2_malformed);

  write_text(config.run_dir / "report.json", pipeline_report_json(report));
  write_text(config.run_dir / "report.txt", report_table(report.pair, "pair") + report_table(report.quad, "quad"));
  return report;
}

Stage2Report run_stage2_isolated(const std::vector<SentenceGraph>& corpus, Predictor& predictor,
                                 const PipelineConfig& config) {
  if (config.run_dir.empty()) throw ContractError("run_stage2_isolated needs a run directory");
  const fs::path dir = config.run_dir / "stage2_gold";
  fs::create_directories(dir);

  std::vector<std::size_t> active;
  for (std::size_t i = 0; i < corpus.size(); ++i)
    if (!corpus[i].quads().empty()) active.push_back(i);
  auto prompts = parallel_map<InstructionExample>(active.size(), config.jobs, [&](std::size_t k) {
    const auto pairs = gold_pairs(corpus[active[k]]);
    return gen_classification(corpus[active[k]], pairs, config.prompt, Mode::inference);
  });
  const auto decoded = run_task(prompts, TaskKind::classify_pair, predictor, config, dir);

  Stage2Report report;
  std::size_t positions = 0;
  double category_hits = 0, sentiment_hits = 0;
  std::vector<SentenceScore> rows;
  std::size_t malformed = 0;
  for (std::size_t i = 0, k = 0; i < corpus.size(); ++i) {
    const auto gold = gold_quads(corpus[i]);
    std::vector<QuadPrediction> pred;
    if (k < active.size() && active[k] == i) {
      pred = to_quads(decoded[k]);
      malformed += decoded[k].malformed;
      ++k;
    }
    rows.push_back({corpus[i].id(), score_quads(gold, pred)});
    if (gold.empty()) continue;
    const auto aligned = align_to_gold(gold, pred);
    category_hits += element_accuracy(gold, aligned, Target::category) * static_cast<double>(gold.size());
    sentiment_hits += element_accuracy(gold, aligned, Target::sentiment) * static_cast<double>(gold.size());
    positions += gold.size();
  }
  if (positions) {
    report.category_accuracy = category_hits / static_cast<double>(positions);
    report.sentiment_accuracy = sentiment_hits / static_cast<double>(positions);
  }
  report.quad = micro_scores(rows, malformed);
  write_text(dir / "report.json", stage2_report_json(report));
  return report;
}

std::string pipeline_report_json(const PipelineReport& report) {
  ojson j;
  j["pair"] = ojson::parse(report_json(report.pair, "pair"));
  j["quad"] = ojson::parse(report_json(report.quad, "quad"));
  j["stage1_malformed"] = report.stage1_malformed;
  j["stage2_malformed"] = report.stage2_malformed;
  j["stage2_prompts"] = report.stage2_prompts;
  return j.dump(2) + "\n";
}

std::string stage2_report_json(const Stage2Report& report) {
  ojson j;
  j["category_accuracy"] = report.category_accuracy;
  j["sentiment_accuracy"] = report.sentiment_accuracy;
  j["quad"] = ojson::parse(report_json(report.quad, "quad"));
  return j.dump(2) + "\n";
}

}  // namespace s2it
